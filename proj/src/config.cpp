#include "neuroacc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "neuroacc/errors.hpp"
#include "neuroacc/io.hpp"
#include "neuroacc/version.hpp"

namespace neuroacc::config {

namespace {

using nlohmann::json;

// Dispatch every key of a JSON object to a named handler; any key without a
// handler is a configuration error (catches typos instead of ignoring them).
struct Section {
  std::string prefix;
  std::vector<std::pair<std::string, std::function<void(const json&)>>> handlers;

  void add(const std::string& key, std::function<void(const json&)> fn) {
    handlers.emplace_back(key, std::move(fn));
  }
  void apply(const json& j) const {
    if (!j.is_object()) {
      throw ConfigError("section '" + prefix + "' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
      bool handled = false;
      for (const auto& [name, fn] : handlers) {
        if (name == key) {
          fn(value);
          handled = true;
          break;
        }
      }
      if (!handled) {
        throw ConfigError("unknown config key: " + prefix + "." + key);
      }
    }
  }
};

void apply_task_drive(TaskDrive& td, const json& j, const std::string& prefix) {
  Section s{prefix, {}};
  s.add("alpha", [&td](const json& v) { td.alpha = v.get<double>(); });
  s.add("input_gain", [&td](const json& v) { td.input_gain = v.get<double>(); });
  s.apply(j);
}

void apply_tree(ExperimentConfig& cfg, const json& root) {
  Section top{"", {}};

  top.add("physics", [&cfg](const json& jp) {
    Section phys{"physics", {}};
    phys.add("beam", [&cfg](const json& jb) {
      auto& b = cfg.physics.beam;
      Section s{"physics.beam", {}};
      s.add("frequency_hz", [&b](const json& v) {
        b.omega0 = 2.0 * kPi * v.get<double>();
      });
      s.add("q_factor", [&b](const json& v) { b.q_factor = v.get<double>(); });
      s.add("beta", [&b](const json& v) { b.beta = v.get<double>(); });
      s.add("effective_mass",
            [&b](const json& v) { b.effective_mass = v.get<double>(); });
      s.add("rest_gap", [&b](const json& v) { b.rest_gap = v.get<double>(); });
      s.add("electrode_area",
            [&b](const json& v) { b.electrode_area = v.get<double>(); });
      s.add("drive_gain", [&b](const json& v) { b.drive_gain = v.get<double>(); });
      s.apply(jb);
    });
    phys.add("mass", [&cfg](const json& jm) {
      auto& m = cfg.physics.mass;
      Section s{"physics.mass", {}};
      s.add("mass_kg", [&m](const json& v) { m.mass = v.get<double>(); });
      s.add("stiffness", [&m](const json& v) { m.stiffness = v.get<double>(); });
      s.add("q_factor", [&m](const json& v) { m.q_factor = v.get<double>(); });
      s.add("travel_limit",
            [&m](const json& v) { m.travel_limit = v.get<double>(); });
      s.add("dc_pull_area_fraction",
            [&m](const json& v) { m.dc_pull_area_fraction = v.get<double>(); });
      s.apply(jm);
    });
    phys.apply(jp);
  });

  top.add("drive", [&cfg](const json& jd) {
    auto& d = cfg.drive;
    Section s{"drive", {}};
    s.add("v0", [&d](const json& v) { d.v0 = v.get<double>(); });
    s.add("fd", [&d](const json& v) { d.fd = v.get<double>(); });
    s.add("mask_low", [&d](const json& v) { d.mask_low = v.get<double>(); });
    s.add("mask_high", [&d](const json& v) { d.mask_high = v.get<double>(); });
    s.add("mask_seed",
          [&d](const json& v) { d.mask_seed = v.get<std::uint64_t>(); });
    s.add("n_nodes", [&d](const json& v) { d.n_nodes = v.get<int>(); });
    s.add("theta", [&d](const json& v) { d.theta = v.get<double>(); });
    s.add("alpha", [&d](const json& v) { d.alpha = v.get<double>(); });
    s.add("input_gain", [&d](const json& v) { d.input_gain = v.get<double>(); });
    s.add("transduction_gain",
          [&d](const json& v) { d.transduction_gain = v.get<double>(); });
    s.add("adc_bits", [&d](const json& v) { d.adc_bits = v.get<int>(); });
    s.add("adc_full_scale",
          [&d](const json& v) { d.adc_full_scale = v.get<double>(); });
    s.add("noise_sigma", [&d](const json& v) { d.noise_sigma = v.get<double>(); });
    s.add("noise_seed",
          [&d](const json& v) { d.noise_seed = v.get<std::uint64_t>(); });
    s.add("steps_per_period",
          [&d](const json& v) { d.steps_per_period = v.get<int>(); });
    s.apply(jd);
  });

  top.add("shaker", [&cfg](const json& js) {
    auto& sh = cfg.shaker;
    Section s{"shaker", {}};
    s.add("mode", [&sh](const json& v) {
      const std::string m = v.get<std::string>();
      if (m == "ideal") {
        sh.mode = chain::ShakerMode::ideal;
      } else if (m == "filtered") {
        sh.mode = chain::ShakerMode::filtered;
      } else {
        throw ConfigError("shaker.mode must be 'ideal' or 'filtered', got '" + m + "'");
      }
    });
    s.add("cutoff_hz", [&sh](const json& v) { sh.cutoff_hz = v.get<double>(); });
    s.add("highpass_hz",
          [&sh](const json& v) { sh.highpass_hz = v.get<double>(); });
    s.add("travel_limit",
          [&sh](const json& v) { sh.travel_limit = v.get<double>(); });
    s.add("stop_freq_hz",
          [&sh](const json& v) { sh.stop_freq_hz = v.get<double>(); });
    s.apply(js);
  });

  top.add("narma", [&cfg](const json& jn) {
    auto& n = cfg.narma;
    Section s{"narma", {}};
    s.add("n_min", [&n](const json& v) { n.n_min = v.get<int>(); });
    s.add("n_max", [&n](const json& v) { n.n_max = v.get<int>(); });
    s.add("train_length", [&n](const json& v) { n.train_length = v.get<int>(); });
    s.add("test_length", [&n](const json& v) { n.test_length = v.get<int>(); });
    s.add("u_low", [&n](const json& v) { n.u_low = v.get<double>(); });
    s.add("u_high", [&n](const json& v) { n.u_high = v.get<double>(); });
    s.add("seed", [&n](const json& v) { n.seed = v.get<std::uint64_t>(); });
    s.add("divergence_guard",
          [&n](const json& v) { n.divergence_guard = v.get<double>(); });
    s.apply(jn);
  });

  top.add("parity", [&cfg](const json& jp) {
    auto& p = cfg.parity;
    Section s{"parity", {}};
    s.add("n_min", [&p](const json& v) { p.n_min = v.get<int>(); });
    s.add("n_max", [&p](const json& v) { p.n_max = v.get<int>(); });
    s.add("train_length", [&p](const json& v) { p.train_length = v.get<int>(); });
    s.add("test_length", [&p](const json& v) { p.test_length = v.get<int>(); });
    s.add("max_run", [&p](const json& v) { p.max_run = v.get<int>(); });
    s.add("seed", [&p](const json& v) { p.seed = v.get<std::uint64_t>(); });
    s.apply(jp);
  });

  top.add("narma_drive", [&cfg](const json& j) {
    apply_task_drive(cfg.narma_drive, j, "narma_drive");
  });
  top.add("parity_drive", [&cfg](const json& j) {
    apply_task_drive(cfg.parity_drive, j, "parity_drive");
  });

  top.add("learning", [&cfg](const json& jl) {
    auto& l = cfg.learning;
    Section s{"learning", {}};
    s.add("gamma_grid", [&l](const json& v) {
      if (!v.is_array() || v.empty()) {
        throw ConfigError("learning.gamma_grid must be a non-empty array");
      }
      l.gamma_grid.clear();
      for (const auto& g : v) l.gamma_grid.push_back(g.get<double>());
    });
    s.add("gamma_on_test",
          [&l](const json& v) { l.gamma_on_test = v.get<bool>(); });
    s.add("validation_fraction",
          [&l](const json& v) { l.validation_fraction = v.get<double>(); });
    s.apply(jl);
  });

  top.add("sweep", [&cfg](const json& jw) {
    auto& w = cfg.sweep;
    Section s{"sweep", {}};
    s.add("steps_per_period",
          [&w](const json& v) { w.steps_per_period = v.get<int>(); });
    s.add("settle_cycles",
          [&w](const json& v) { w.settle_cycles = v.get<double>(); });
    s.add("measure_cycles",
          [&w](const json& v) { w.measure_cycles = v.get<double>(); });
    s.add("jump_threshold",
          [&w](const json& v) { w.jump_threshold = v.get<double>(); });
    s.apply(jw);
  });

  top.add("washout", [&cfg](const json& v) { cfg.washout = v.get<int>(); });
  top.add("targets_from_setpoint",
          [&cfg](const json& v) { cfg.targets_from_setpoint = v.get<bool>(); });
  top.add("output_dir",
          [&cfg](const json& v) { cfg.output_dir = v.get<std::string>(); });

  top.apply(root);
}

}  // namespace

void LearningConfig::validate() const {
  if (gamma_grid.empty()) {
    throw ConfigError("learning.gamma_grid must not be empty");
  }
  for (double g : gamma_grid) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ConfigError("learning.gamma_grid entries must be finite and >= 0");
    }
  }
  if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
    throw ConfigError("learning.validation_fraction must be in (0, 0.5]");
  }
}

void ExperimentConfig::validate() const {
  physics.validate();
  drive.validate();
  shaker.validate();
  learning.validate();
  if (washout < 0) throw ConfigError("washout must be >= 0");
  if (narma.n_min < 2 || narma.n_max < narma.n_min) {
    throw ConfigError("narma recurrence orders must satisfy 2 <= n_min <= n_max");
  }
  if (narma.train_length <= 0 || narma.test_length <= 0 ||
      parity.train_length <= 0 || parity.test_length <= 0) {
    throw ConfigError("sequence lengths must be positive");
  }
  if (!(narma.u_high > narma.u_low)) {
    throw ConfigError("narma input range must have u_high > u_low");
  }
  if (parity.n_min < 1 || parity.n_max < parity.n_min) {
    throw ConfigError("parity orders must satisfy 1 <= n_min <= n_max");
  }
  if (parity.max_run < 1) throw ConfigError("parity.max_run must be >= 1");
  for (const TaskDrive* td : {&narma_drive, &parity_drive}) {
    if (!(td->alpha >= 0.0)) {
      throw ConfigError("task feedback gain alpha must be >= 0");
    }
    if (!(td->input_gain > 0.0)) {
      throw ConfigError("task input_gain must be > 0");
    }
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

chain::DriveConfig drive_for(const ExperimentConfig& cfg, tasks::TaskKind kind) {
  chain::DriveConfig d = cfg.drive;
  const TaskDrive& td =
      kind == tasks::TaskKind::narma ? cfg.narma_drive : cfg.parity_drive;
  d.alpha = td.alpha;
  d.input_gain = td.input_gain;
  return d;
}

void apply_fast_profile(ExperimentConfig& cfg) {
  cfg.narma.train_length = std::max(1, cfg.narma.train_length / 10);
  cfg.narma.test_length = std::max(1, cfg.narma.test_length / 10);
  cfg.parity.train_length = std::max(1, cfg.parity.train_length / 10);
  cfg.parity.test_length = std::max(1, cfg.parity.test_length / 10);
  cfg.washout = std::max(1, cfg.washout / 10);
  // Carrier resolution already sits at the integrator's accuracy floor, so
  // only the settle/measure windows of the characterization sweeps shrink.
  cfg.sweep.settle_cycles = 300.0;
  cfg.sweep.measure_cycles = 150.0;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    apply_tree(cfg, root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse failed: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_dump(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto put = [&out](const std::string& key, const std::string& value) {
    out << key << "=" << value << "\n";
  };
  const auto putd = [&put](const std::string& key, double v) {
    put(key, io::format_double(v));
  };
  const auto puti = [&put](const std::string& key, long long v) {
    put(key, std::to_string(v));
  };

  putd("physics.beam.frequency_hz", cfg.physics.beam.omega0 / (2.0 * kPi));
  putd("physics.beam.q_factor", cfg.physics.beam.q_factor);
  putd("physics.beam.beta", cfg.physics.beam.beta);
  putd("physics.beam.effective_mass", cfg.physics.beam.effective_mass);
  putd("physics.beam.rest_gap", cfg.physics.beam.rest_gap);
  putd("physics.beam.electrode_area", cfg.physics.beam.electrode_area);
  putd("physics.beam.drive_gain", cfg.physics.beam.drive_gain);
  putd("physics.mass.mass_kg", cfg.physics.mass.mass);
  putd("physics.mass.stiffness", cfg.physics.mass.stiffness);
  putd("physics.mass.q_factor", cfg.physics.mass.q_factor);
  putd("physics.mass.travel_limit", cfg.physics.mass.travel_limit);
  putd("physics.mass.dc_pull_area_fraction",
       cfg.physics.mass.dc_pull_area_fraction);
  putd("drive.v0", cfg.drive.v0);
  putd("drive.fd", cfg.drive.fd);
  putd("drive.mask_low", cfg.drive.mask_low);
  putd("drive.mask_high", cfg.drive.mask_high);
  puti("drive.mask_seed", static_cast<long long>(cfg.drive.mask_seed));
  puti("drive.n_nodes", cfg.drive.n_nodes);
  putd("drive.theta", cfg.drive.theta);
  putd("drive.alpha", cfg.drive.alpha);
  putd("drive.input_gain", cfg.drive.input_gain);
  putd("drive.transduction_gain", cfg.drive.transduction_gain);
  puti("drive.adc_bits", cfg.drive.adc_bits);
  putd("drive.adc_full_scale", cfg.drive.adc_full_scale);
  putd("drive.noise_sigma", cfg.drive.noise_sigma);
  puti("drive.noise_seed", static_cast<long long>(cfg.drive.noise_seed));
  puti("drive.steps_per_period", cfg.drive.steps_per_period);
  put("shaker.mode",
      cfg.shaker.mode == chain::ShakerMode::ideal ? "ideal" : "filtered");
  putd("shaker.cutoff_hz", cfg.shaker.cutoff_hz);
  putd("shaker.highpass_hz", cfg.shaker.highpass_hz);
  putd("shaker.travel_limit", cfg.shaker.travel_limit);
  putd("shaker.stop_freq_hz", cfg.shaker.stop_freq_hz);
  puti("narma.n_min", cfg.narma.n_min);
  puti("narma.n_max", cfg.narma.n_max);
  puti("narma.train_length", cfg.narma.train_length);
  puti("narma.test_length", cfg.narma.test_length);
  putd("narma.u_low", cfg.narma.u_low);
  putd("narma.u_high", cfg.narma.u_high);
  puti("narma.seed", static_cast<long long>(cfg.narma.seed));
  putd("narma.divergence_guard", cfg.narma.divergence_guard);
  puti("parity.n_min", cfg.parity.n_min);
  puti("parity.n_max", cfg.parity.n_max);
  puti("parity.train_length", cfg.parity.train_length);
  puti("parity.test_length", cfg.parity.test_length);
  puti("parity.max_run", cfg.parity.max_run);
  puti("parity.seed", static_cast<long long>(cfg.parity.seed));
  putd("narma_drive.alpha", cfg.narma_drive.alpha);
  putd("narma_drive.input_gain", cfg.narma_drive.input_gain);
  putd("parity_drive.alpha", cfg.parity_drive.alpha);
  putd("parity_drive.input_gain", cfg.parity_drive.input_gain);
  {
    std::string grid;
    for (std::size_t i = 0; i < cfg.learning.gamma_grid.size(); ++i) {
      if (i) grid += ",";
      grid += io::format_double(cfg.learning.gamma_grid[i]);
    }
    put("learning.gamma_grid", grid);
  }
  put("learning.gamma_on_test", cfg.learning.gamma_on_test ? "true" : "false");
  putd("learning.validation_fraction", cfg.learning.validation_fraction);
  puti("sweep.steps_per_period", cfg.sweep.steps_per_period);
  putd("sweep.settle_cycles", cfg.sweep.settle_cycles);
  putd("sweep.measure_cycles", cfg.sweep.measure_cycles);
  putd("sweep.jump_threshold", cfg.sweep.jump_threshold);
  puti("washout", cfg.washout);
  put("targets_from_setpoint", cfg.targets_from_setpoint ? "true" : "false");
  put("output_dir", cfg.output_dir);
  return out.str();
}

std::string dump_json(const ExperimentConfig& cfg) {
  json j;
  j["physics"]["beam"] = {
      {"frequency_hz", cfg.physics.beam.omega0 / (2.0 * kPi)},
      {"q_factor", cfg.physics.beam.q_factor},
      {"beta", cfg.physics.beam.beta},
      {"effective_mass", cfg.physics.beam.effective_mass},
      {"rest_gap", cfg.physics.beam.rest_gap},
      {"electrode_area", cfg.physics.beam.electrode_area},
      {"drive_gain", cfg.physics.beam.drive_gain}};
  j["physics"]["mass"] = {
      {"mass_kg", cfg.physics.mass.mass},
      {"stiffness", cfg.physics.mass.stiffness},
      {"q_factor", cfg.physics.mass.q_factor},
      {"travel_limit", cfg.physics.mass.travel_limit},
      {"dc_pull_area_fraction", cfg.physics.mass.dc_pull_area_fraction}};
  j["drive"] = {{"v0", cfg.drive.v0},
                {"fd", cfg.drive.fd},
                {"mask_low", cfg.drive.mask_low},
                {"mask_high", cfg.drive.mask_high},
                {"mask_seed", cfg.drive.mask_seed},
                {"n_nodes", cfg.drive.n_nodes},
                {"theta", cfg.drive.theta},
                {"alpha", cfg.drive.alpha},
                {"input_gain", cfg.drive.input_gain},
                {"transduction_gain", cfg.drive.transduction_gain},
                {"adc_bits", cfg.drive.adc_bits},
                {"adc_full_scale", cfg.drive.adc_full_scale},
                {"noise_sigma", cfg.drive.noise_sigma},
                {"noise_seed", cfg.drive.noise_seed},
                {"steps_per_period", cfg.drive.steps_per_period}};
  j["shaker"] = {
      {"mode", cfg.shaker.mode == chain::ShakerMode::ideal ? "ideal" : "filtered"},
      {"cutoff_hz", cfg.shaker.cutoff_hz},
      {"highpass_hz", cfg.shaker.highpass_hz},
      {"travel_limit", cfg.shaker.travel_limit},
      {"stop_freq_hz", cfg.shaker.stop_freq_hz}};
  j["narma"] = {{"n_min", cfg.narma.n_min},
                {"n_max", cfg.narma.n_max},
                {"train_length", cfg.narma.train_length},
                {"test_length", cfg.narma.test_length},
                {"u_low", cfg.narma.u_low},
                {"u_high", cfg.narma.u_high},
                {"seed", cfg.narma.seed},
                {"divergence_guard", cfg.narma.divergence_guard}};
  j["parity"] = {{"n_min", cfg.parity.n_min},
                 {"n_max", cfg.parity.n_max},
                 {"train_length", cfg.parity.train_length},
                 {"test_length", cfg.parity.test_length},
                 {"max_run", cfg.parity.max_run},
                 {"seed", cfg.parity.seed}};
  j["narma_drive"] = {{"alpha", cfg.narma_drive.alpha},
                      {"input_gain", cfg.narma_drive.input_gain}};
  j["parity_drive"] = {{"alpha", cfg.parity_drive.alpha},
                       {"input_gain", cfg.parity_drive.input_gain}};
  j["learning"] = {{"gamma_grid", cfg.learning.gamma_grid},
                   {"gamma_on_test", cfg.learning.gamma_on_test},
                   {"validation_fraction", cfg.learning.validation_fraction}};
  j["sweep"] = {{"steps_per_period", cfg.sweep.steps_per_period},
                {"settle_cycles", cfg.sweep.settle_cycles},
                {"measure_cycles", cfg.sweep.measure_cycles},
                {"jump_threshold", cfg.sweep.jump_threshold}};
  j["washout"] = cfg.washout;
  j["targets_from_setpoint"] = cfg.targets_from_setpoint;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  return io::hash_hex(io::fnv1a64(canonical_dump(cfg)));
}

void RunManifest::write(const std::string& path) const {
  json j;
  j["command"] = command;
  j["config_hash"] = config_digest;
  j["tool_version"] = tool_version.empty() ? std::string(kVersion) : tool_version;
  j["wall_seconds"] = wall_seconds;
  j["fast_profile"] = fast_profile;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  j["summary"] = summary;
  io::atomic_write(std::filesystem::path(path), j.dump(2) + "\n");
}

}  // namespace neuroacc::config
