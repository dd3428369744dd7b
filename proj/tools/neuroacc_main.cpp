#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "neuroacc/config.hpp"
#include "neuroacc/errors.hpp"
#include "neuroacc/pipeline.hpp"
#include "neuroacc/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  bool fast = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path,
                  "JSON config file (defaults used when omitted)");
  cmd->add_option("-o,--output-dir", opts.output_dir,
                  "override the config's output directory");
  cmd->add_flag("--fast", opts.fast,
                "~10x shorter smoke profile; results not comparable with full runs");
}

neuroacc::config::ExperimentConfig resolve(const CommonOpts& opts) {
  neuroacc::config::ExperimentConfig cfg =
      opts.config_path.empty()
          ? neuroacc::config::ExperimentConfig{}
          : neuroacc::config::load_config(opts.config_path);
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  if (opts.fast) neuroacc::config::apply_fast_profile(cfg);
  cfg.validate();
  return cfg;
}

void print_stage(const neuroacc::pipeline::StageResult& stage) {
  if (!stage.summary.empty()) std::printf("%s\n", stage.summary.c_str());
  for (const std::string& w : stage.warnings) {
    std::printf("warning: %s\n", w.c_str());
  }
  for (const std::string& f : stage.outputs) {
    std::printf("wrote %s\n", f.c_str());
  }
}

neuroacc::tasks::TaskKind parse_task(const std::string& name) {
  if (name == "narma") return neuroacc::tasks::TaskKind::narma;
  if (name == "parity") return neuroacc::tasks::TaskKind::parity;
  throw neuroacc::ConfigError("task must be 'narma' or 'parity', got '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator of a nonlinear-beam accelerometer operated as a "
               "time-multiplexed reservoir computer"};
  app.set_version_flag("--version", std::string(neuroacc::kVersion));
  app.require_subcommand(1);

  CommonOpts char_opts;
  CLI::App* characterize =
      app.add_subcommand("characterize",
                         "frequency/amplitude sweeps and the sensor response");
  add_common(characterize, char_opts);

  CommonOpts bench_opts;
  std::string bench_task = "narma";
  bool gamma_on_test = false;
  bool targets_from_setpoint = false;
  bool dump_waveform = false;
  CLI::App* benchmark =
      app.add_subcommand("benchmark", "full task pipeline with a trained readout");
  add_common(benchmark, bench_opts);
  benchmark->add_option("-t,--task", bench_task, "narma | parity")->required();
  benchmark->add_flag("--gamma-on-test", gamma_on_test,
                      "select the regularization on the test rows (published "
                      "protocol; leaks the test set)");
  benchmark->add_flag("--targets-from-setpoint", targets_from_setpoint,
                      "build recurrence targets from the commanded input "
                      "instead of the measured one");
  benchmark->add_flag("--dump-waveform", dump_waveform,
                      "also write a carrier-rate trace of the first slots (large)");

  CommonOpts sweep_opts;
  std::string sweep_task = "narma";
  neuroacc::pipeline::HyperGrid grid;
  int rank_order = 10;
  CLI::App* sweep =
      app.add_subcommand("sweep", "grid search over drive hyperparameters");
  add_common(sweep, sweep_opts);
  sweep->add_option("-t,--task", sweep_task, "narma | parity")->required();
  sweep->add_option("--v0", grid.v0, "carrier amplitudes [V]")->delimiter(',');
  sweep->add_option("--fd", grid.fd, "carrier frequencies [Hz]")->delimiter(',');
  sweep->add_option("--alpha", grid.alpha, "feedback gains")->delimiter(',');
  sweep->add_option("--theta", grid.theta, "slot durations [s]")->delimiter(',');
  sweep->add_option("--rank-order", rank_order,
                    "readout order used for ranking (recurrence task)");

  CLI::App* design =
      app.add_subcommand("design-report", "closed-form device numbers");

  CommonOpts validate_opts;
  CLI::App* validate =
      app.add_subcommand("validate-config", "parse a config and print its hash");
  add_common(validate, validate_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (characterize->parsed()) {
      print_stage(neuroacc::pipeline::run_characterization(resolve(char_opts),
                                                           char_opts.fast));
    } else if (benchmark->parsed()) {
      neuroacc::config::ExperimentConfig cfg = resolve(bench_opts);
      if (gamma_on_test) cfg.learning.gamma_on_test = true;
      if (targets_from_setpoint) cfg.targets_from_setpoint = true;
      const neuroacc::tasks::TaskKind kind = parse_task(bench_task);
      neuroacc::pipeline::BenchmarkOutcome outcome =
          neuroacc::pipeline::run_benchmark(cfg, kind, bench_opts.fast,
                                            /*write_outputs=*/true);
      if (dump_waveform) {
        outcome.stage.outputs.push_back(
            neuroacc::pipeline::dump_drive_waveform(cfg, kind, 200, 4));
      }
      print_stage(outcome.stage);
    } else if (sweep->parsed()) {
      print_stage(neuroacc::pipeline::sweep_hyperparameters(
          resolve(sweep_opts), parse_task(sweep_task), grid, sweep_opts.fast,
          rank_order));
    } else if (design->parsed()) {
      std::printf("%s", neuroacc::pipeline::design_report_text().c_str());
    } else if (validate->parsed()) {
      const neuroacc::config::ExperimentConfig cfg = resolve(validate_opts);
      std::printf("config ok\nhash %s\n%s",
                  neuroacc::config::config_hash(cfg).c_str(),
                  neuroacc::config::canonical_dump(cfg).c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
