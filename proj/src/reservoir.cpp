#include "neuroacc/reservoir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "neuroacc/errors.hpp"

namespace neuroacc::reservoir {

namespace {

struct PassResult {
  Eigen::MatrixXd states;        // rows = task steps simulated
  std::vector<double> measured;  // mean produced acceleration per step [m/s^2]
  double max_envelope = 0.0;
  long long clip_count = 0;
  long long sample_count = 0;
};

// Carrier steps per slot; the slot boundary must land exactly on a step so
// that the sample instants and the phase tables stay commensurate.
long long slot_steps(const chain::DriveConfig& cfg) {
  const double exact = cfg.theta * 2.0 * cfg.fd * cfg.steps_per_period;
  const long long n = std::llround(exact);
  if (n < 1 || std::fabs(exact - static_cast<double>(n)) > 1e-6 * exact) {
    throw InvalidGeometryError(
        "theta must span a whole number of carrier integration steps");
  }
  return n;
}

// One full pass over `n_steps` task samples. full_scale <= 0 selects
// calibration mode: envelopes are fed back unquantized and only tracked for
// their maximum.
PassResult run_pass(const std::vector<double>& task_input,
                    const dynamics::SystemParams& physics,
                    const chain::DriveConfig& cfg,
                    const chain::ShakerConfig& shaker_cfg,
                    const std::vector<double>& mask, double full_scale,
                    const dynamics::SystemState* initial,
                    std::size_t n_steps) {
  const int n_nodes = cfg.n_nodes;
  const dynamics::CarrierTable table(cfg.fd, cfg.steps_per_period);
  const long long steps_per_slot = slot_steps(cfg);

  chain::ShakerConfig shk = shaker_cfg;
  shk.sample_rate = 1.0 / cfg.theta;  // one shaker sample per slot
  shk.validate();
  chain::Shaker shaker(shk);

  chain::EnvelopeDemodulator demod(cfg.fd, 1.0 / table.dt(),
                                   cfg.transduction_gain);
  chain::GaussianNoise noise(cfg.noise_seed);
  chain::Adc adc(cfg.adc_bits, full_scale > 0.0 ? full_scale : 1.0);

  dynamics::SystemState st;
  if (initial) st = *initial;
  st.t = 0.0;
  long long step_index = 0;

  std::vector<double> feedback(static_cast<std::size_t>(n_nodes), 0.0);
  std::vector<double> next_feedback(feedback);

  PassResult out;
  out.states.resize(static_cast<Eigen::Index>(n_steps), n_nodes + 1);
  out.measured.resize(n_steps, 0.0);

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double setpoint = cfg.input_gain * task_input[k];
    double accel_sum = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
      const double a_slot = shaker.step(setpoint);
      accel_sum += a_slot;
      const double v_env =
          cfg.v0 * (mask[static_cast<std::size_t>(j)] +
                    cfg.alpha * feedback[static_cast<std::size_t>(j)] + 1.0);
      if (!(v_env >= 0.0)) {
        throw ConfigError("drive envelope went negative; check mask/alpha ranges");
      }
      dynamics::integrate_span(
          st, physics, table, step_index, v_env,
          [a_slot](double) { return a_slot; }, steps_per_slot,
          [&demod, &table](const dynamics::SystemState& s, long long idx) {
            demod.feed(s.beam_disp, table.cos_ref(idx), table.sin_ref(idx));
          });
      double env = demod.envelope();
      if (cfg.noise_sigma > 0.0) env += cfg.noise_sigma * noise.next();
      out.max_envelope = std::max(out.max_envelope, env);
      const double node = full_scale > 0.0 ? adc.sample(env) : std::max(env, 0.0);
      out.states(static_cast<Eigen::Index>(k), j) = node;
      next_feedback[static_cast<std::size_t>(j)] = node;
    }
    out.states(static_cast<Eigen::Index>(k), n_nodes) = 1.0;
    out.measured[k] = accel_sum / n_nodes;
    std::swap(feedback, next_feedback);
  }
  out.clip_count = adc.clip_count();
  out.sample_count = adc.sample_count();
  return out;
}

}  // namespace

std::vector<double> rescale_measured_input(const std::vector<double>& measured,
                                           const std::vector<double>& reference) {
  if (measured.size() != reference.size() || measured.empty()) {
    throw DimensionMismatchError("measured/reference length mismatch");
  }
  const auto stats = [](const std::vector<double>& v) {
    double mean = 0.0, lo = v[0], hi = v[0];
    for (double x : v) {
      mean += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    mean /= static_cast<double>(v.size());
    return std::array<double, 3>{mean, lo, hi};
  };
  const auto [mean_m, lo_m, hi_m] = stats(measured);
  const auto [mean_r, lo_r, hi_r] = stats(reference);
  const double span_m = hi_m - lo_m;
  if (!(span_m > 0.0)) {
    throw ZeroVarianceError("measured trace has zero peak-to-peak amplitude");
  }
  const double scale = (hi_r - lo_r) / span_m;
  std::vector<double> out(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    out[i] = (measured[i] - mean_m) * scale + mean_r;
  }
  return out;
}

ReservoirRun run_reservoir(const std::vector<double>& task_input,
                           const dynamics::SystemParams& physics,
                           const chain::DriveConfig& chain_cfg,
                           const chain::ShakerConfig& shaker_cfg, int washout,
                           const dynamics::SystemState* initial) {
  physics.validate();
  chain_cfg.validate();
  if (washout < 0) {
    throw InvalidGeometryError("washout must be >= 0");
  }
  const std::size_t m_total = task_input.size();
  if (m_total <= static_cast<std::size_t>(washout)) {
    throw DimensionMismatchError("task input must be longer than the washout");
  }
  const std::vector<double> mask = chain::generate_mask(chain_cfg);

  double full_scale = chain_cfg.adc_full_scale;
  if (full_scale <= 0.0) {
    // Short self-calibration pass: run the chain unquantized and size the
    // converter with 50% headroom over the largest envelope seen.
    const std::size_t cal_steps = std::min<std::size_t>(m_total, 250);
    const PassResult cal = run_pass(task_input, physics, chain_cfg, shaker_cfg,
                                    mask, 0.0, initial, cal_steps);
    if (!(cal.max_envelope > 0.0)) {
      throw ZeroVarianceError("calibration saw no envelope; cannot size the ADC");
    }
    full_scale = 1.5 * cal.max_envelope;
  }

  PassResult pass = run_pass(task_input, physics, chain_cfg, shaker_cfg, mask,
                             full_scale, initial, m_total);

  ReservoirRun run;
  run.config = chain_cfg;
  run.washout = washout;
  run.adc_full_scale = full_scale;
  run.adc_clip_fraction =
      pass.sample_count > 0
          ? static_cast<double>(pass.clip_count) / static_cast<double>(pass.sample_count)
          : 0.0;
  if (run.adc_clip_fraction > 0.01) {
    run.warnings.push_back("ADC railed on more than 1% of node samples");
  }
  {
    const double ring = 2.0 * physics.beam.q_factor / physics.beam.omega0;
    for (const std::string& w : chain_cfg.warnings(ring)) run.warnings.push_back(w);
  }

  const std::size_t m = m_total - static_cast<std::size_t>(washout);
  run.states = pass.states.bottomRows(static_cast<Eigen::Index>(m)).eval();
  run.inputs_setpoint.assign(task_input.begin() + washout, task_input.end());
  std::vector<double> measured_tail(pass.measured.begin() + washout,
                                    pass.measured.end());
  const auto [lo, hi] =
      std::minmax_element(measured_tail.begin(), measured_tail.end());
  if (*hi - *lo > 0.0) {
    run.inputs_measured = rescale_measured_input(measured_tail, run.inputs_setpoint);
  } else {
    // Constant drive (e.g. zero input): nothing to rescale against, keep the
    // setpoint trace so downstream target builders still get task units.
    run.inputs_measured = run.inputs_setpoint;
  }
  return run;
}

}  // namespace neuroacc::reservoir
