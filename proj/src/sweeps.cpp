#include "neuroacc/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace neuroacc::dynamics {

namespace {

std::vector<double> grid(double lo, double hi, int n, SweepDirection dir) {
  if (n < 2 || !(hi > lo)) {
    throw InvalidGeometryError("sweep needs n >= 2 points and hi > lo");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  if (dir == SweepDirection::down) {
    std::reverse(g.begin(), g.end());
  }
  return g;
}

struct AmplitudeTracker {
  double lo = 0.0, hi = 0.0;
  bool armed = false;
  void feed(double y) {
    if (!armed) {
      lo = hi = y;
      armed = true;
    } else {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  double amplitude() const { return 0.5 * (hi - lo); }
};

void detect_jump(SweepResult& r, double threshold) {
  double peak = 0.0;
  for (double a : r.amplitude) peak = std::max(peak, a);
  if (peak <= 0.0) return;
  int best = -1;
  double best_step = 0.0;
  for (std::size_t i = 1; i < r.amplitude.size(); ++i) {
    const double step = std::fabs(r.amplitude[i] - r.amplitude[i - 1]) / peak;
    if (step > best_step) {
      best_step = step;
      best = static_cast<int>(i);
    }
  }
  if (best_step > threshold) r.jump_index = best;
}

// Steady-state amplitude at one operating point: settle, then track min/max.
double measure_point(SystemState& st, const SystemParams& p,
                     const CarrierTable& tbl, long long& step_index,
                     double v_env, double settle_cycles, double measure_cycles,
                     bool freeze_mass) {
  const int spp = tbl.steps_per_period();
  const long long settle_steps =
      static_cast<long long>(std::llround(settle_cycles)) * spp;
  const long long measure_steps =
      static_cast<long long>(std::llround(measure_cycles)) * spp;
  const auto no_accel = [](double) { return 0.0; };
  integrate_span(st, p, tbl, step_index, v_env, no_accel, settle_steps,
                 [](const SystemState&, long long) {}, freeze_mass);
  AmplitudeTracker tracker;
  integrate_span(
      st, p, tbl, step_index, v_env, no_accel, measure_steps,
      [&tracker](const SystemState& s, long long) { tracker.feed(s.beam_disp); },
      freeze_mass);
  return tracker.amplitude();
}

void resolve_cycles(const SystemParams& p, SweepSettings& s) {
  if (s.settle_cycles < 0.0) s.settle_cycles = 8.0 * p.beam.q_factor;
  if (s.measure_cycles < 0.0) s.measure_cycles = 2.0 * p.beam.q_factor;
}

}  // namespace

SweepResult frequency_sweep(const SystemParams& params, double v0, double f_lo,
                            double f_hi, int n_points, SweepDirection direction,
                            const SweepSettings& settings) {
  params.validate();
  SweepSettings s = settings;
  resolve_cycles(params, s);
  SweepResult r;
  r.axis_name = "drive_frequency_hz";
  r.direction = direction;
  r.axis = grid(f_lo, f_hi, n_points, direction);
  r.amplitude.reserve(r.axis.size());
  SystemState st;  // mass pinned at rest for characterization
  for (double fd : r.axis) {
    CarrierTable tbl(fd, s.steps_per_period);
    long long step_index = 0;  // phase restarts per point; the beam state carries
    st.t = 0.0;
    r.amplitude.push_back(measure_point(st, params, tbl, step_index, v0,
                                        s.settle_cycles, s.measure_cycles,
                                        /*freeze_mass=*/true));
  }
  detect_jump(r, s.jump_threshold);
  return r;
}

SweepResult amplitude_sweep(const SystemParams& params, double fd, double v_lo,
                            double v_hi, int n_points, SweepDirection direction,
                            const SweepSettings& settings) {
  params.validate();
  SweepSettings s = settings;
  resolve_cycles(params, s);
  SweepResult r;
  r.axis_name = "drive_voltage_v";
  r.direction = direction;
  r.axis = grid(v_lo, v_hi, n_points, direction);
  r.amplitude.reserve(r.axis.size());
  CarrierTable tbl(fd, s.steps_per_period);
  SystemState st;
  long long step_index = 0;
  for (double v0 : r.axis) {
    // Static gap correction: the mass settles under the DC pull before the
    // beam measurement, then holds (its dynamics are far slower than the sweep
    // dwell at one point).
    st.mass_disp = settle_mass_equilibrium(params, v0);
    st.mass_vel = 0.0;
    r.amplitude.push_back(measure_point(st, params, tbl, step_index, v0,
                                        s.settle_cycles, s.measure_cycles,
                                        /*freeze_mass=*/true));
  }
  detect_jump(r, s.jump_threshold);
  return r;
}

SweepResult sensor_frequency_response(const SystemParams& params, double v0,
                                      double fd,
                                      const std::vector<double>& accel_freqs,
                                      double accel_amplitude,
                                      const SweepSettings& settings) {
  params.validate();
  SweepSettings s = settings;
  resolve_cycles(params, s);
  SweepResult r;
  r.axis_name = "acceleration_frequency_hz";
  r.axis = accel_freqs;
  r.amplitude.reserve(accel_freqs.size());
  const double mass_ring = 2.0 * params.mass.q_factor / params.mass.omega();
  for (double fa : accel_freqs) {
    if (!(fa > 0.0)) {
      throw InvalidGeometryError("acceleration frequency must be positive");
    }
    CarrierTable tbl(fd, s.steps_per_period);
    const int spp = tbl.steps_per_period();
    const double t_period = spp * tbl.dt();  // one forcing period
    SystemState st;
    long long step_index = 0;
    const auto accel = [&](double t) {
      return accel_amplitude * std::sin(2.0 * kPi * fa * t);
    };
    // Settle the beam drive and the mass transient, then measure over an
    // integer number of acceleration periods.
    const double settle_time = std::max(5.0 * mass_ring, 2.0 / fa) + 1e-3;
    const long long settle_periods =
        static_cast<long long>(std::ceil(settle_time / t_period));
    const long long measure_periods =
        static_cast<long long>(std::llround(4.0 / fa / t_period));
    const auto idle = [](const SystemState&, long long) {};
    integrate_span(st, params, tbl, step_index, v0, accel,
                   settle_periods * spp, idle);

    // Per-carrier-period amplitude series, projected onto the drive tone.
    AmplitudeTracker tracker;
    std::complex<double> acc(0.0, 0.0);
    long long period_count = 0;
    int step_in_period = 0;
    integrate_span(st, params, tbl, step_index, v0, accel,
                   measure_periods * spp,
                   [&](const SystemState& state, long long) {
                     tracker.feed(state.beam_disp);
                     if (++step_in_period == spp) {
                       const double t_mid = state.t - 0.5 * t_period;
                       const double ph = 2.0 * kPi * fa * t_mid;
                       acc += tracker.amplitude() *
                              std::complex<double>(std::cos(ph), -std::sin(ph));
                       tracker = AmplitudeTracker{};
                       step_in_period = 0;
                       ++period_count;
                     }
                   });
    const double modulation =
        2.0 * std::abs(acc) / static_cast<double>(period_count);
    r.amplitude.push_back(modulation / accel_amplitude);
  }
  return r;
}

double sweep_hysteresis(const SweepResult& up, const SweepResult& down) {
  if (up.axis.size() != down.axis.size()) {
    throw DimensionMismatchError("hysteresis needs equally sized sweeps");
  }
  const std::size_t n = up.axis.size();
  double peak = 0.0;
  for (double a : up.amplitude) peak = std::max(peak, a);
  for (double a : down.amplitude) peak = std::max(peak, a);
  if (peak <= 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (std::fabs(up.axis[i] - down.axis[j]) >
        1e-9 * std::max(std::fabs(up.axis[i]), 1.0)) {
      throw DimensionMismatchError("up/down sweep axes do not line up");
    }
    worst = std::max(worst,
                     std::fabs(up.amplitude[i] - down.amplitude[j]) / peak);
  }
  return worst;
}

}  // namespace neuroacc::dynamics
