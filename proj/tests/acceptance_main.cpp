// Acceptance harness: evaluates the nine numbered criteria that gate this
// simulator — design formulas, linear and nonlinear beam response, the
// inertial-sensor model, readout training, both benchmark pipelines,
// cross-cutting property suites, and the feedback ablation.
//
// Prints one [PASS]/[FAIL] line per criterion with the measured numbers
// indented underneath, and exits with the number of failed criteria. Where a
// written check is out of reach for structural reasons (documented inline and
// in the README), the nearest check that does hold is asserted alongside so
// regressions still turn the line louder, but the verdict stays honest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "neuroacc/config.hpp"
#include "neuroacc/constants.hpp"
#include "neuroacc/design.hpp"
#include "neuroacc/dynamics.hpp"
#include "neuroacc/learning.hpp"
#include "neuroacc/pipeline.hpp"
#include "neuroacc/reservoir.hpp"
#include "neuroacc/signal_chain.hpp"
#include "neuroacc/sweeps.hpp"
#include "neuroacc/tasks.hpp"

namespace {

using namespace neuroacc;
using dynamics::CarrierTable;
using dynamics::SweepDirection;
using dynamics::SweepResult;
using dynamics::SystemParams;
using dynamics::SystemState;

std::string num(double v, int precision = 4) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

std::string fixed4(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << v;
  return out.str();
}

bool within_rel(double value, double target, double rel) {
  return std::fabs(value - target) <= rel * std::fabs(target);
}

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { lines.push_back("note " + what); }
};

// --- shared sweep helpers -------------------------------------------------

// Peak refined by a quadratic fit through the three samples around the
// maximum; returns {axis value, amplitude}.
std::pair<double, double> refined_peak(const SweepResult& r) {
  std::size_t im = 0;
  for (std::size_t i = 1; i < r.amplitude.size(); ++i) {
    if (r.amplitude[i] > r.amplitude[im]) im = i;
  }
  if (im == 0 || im + 1 == r.amplitude.size()) {
    return {r.axis[im], r.amplitude[im]};
  }
  const double ym = r.amplitude[im - 1], y0 = r.amplitude[im],
               yp = r.amplitude[im + 1];
  const double denom = ym - 2.0 * y0 + yp;
  const double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  const double df = r.axis[1] - r.axis[0];
  return {r.axis[im] + shift * df, y0 - 0.25 * (ym - yp) * shift};
}

// Quality factor from linearly interpolated half-power crossings, reported on
// the response-tone axis (twice the drive-frequency axis). Returns -1 when a
// crossing is missing.
double half_power_q(const SweepResult& r) {
  const auto [f_pk, a_pk] = refined_peak(r);
  const double target = a_pk / std::sqrt(2.0);
  double f_lo = 0.0, f_hi = 0.0;
  for (std::size_t i = 1; i < r.amplitude.size(); ++i) {
    const bool rising = r.amplitude[i - 1] < target && r.amplitude[i] >= target;
    const bool falling = r.amplitude[i - 1] >= target && r.amplitude[i] < target;
    if (!rising && !falling) continue;
    const double t =
        (target - r.amplitude[i - 1]) / (r.amplitude[i] - r.amplitude[i - 1]);
    const double f = r.axis[i - 1] + t * (r.axis[i] - r.axis[i - 1]);
    if (f < f_pk) {
      f_lo = f;
    } else if (f_hi == 0.0) {
      f_hi = f;
    }
  }
  if (f_lo <= 0.0 || f_hi <= 0.0) return -1.0;
  return 2.0 * f_pk / (2.0 * f_hi - 2.0 * f_lo);
}

// --- 1. design formulas ---------------------------------------------------

Report design_constants() {
  Report r;
  const design::SpringGeometry spring{};
  const design::BeamGeometry beam{};
  const double k_one = design::accordion_spring_constant(spring);
  const double k_total =
      design::suspension_stiffness(spring, device::kSpringsPerMass);
  const double omega0 = 2.0 * kPi * device::kBeamMeasuredFrequency;
  const double q_film = design::squeeze_film_q(beam, omega0);
  const double t_ring = design::ring_down_time(device::kBeamMeasuredQ, omega0);
  const double omega_m = 2.0 * kPi * device::kMassMeasuredFrequency;
  const double mass = device::kSuspensionStiffness / (omega_m * omega_m);
  const design::SensorBudget budget = design::sensor_budget(
      device::kSuspensionStiffness, device::kMassTravelLimit, mass);

  r.check(within_rel(k_one, 1.70, 0.01),
          "single accordion spring k = " + num(k_one) +
              " N/m (target 1.70, within 1%)");
  r.check(within_rel(k_total, 3.4, 0.01),
          "two-spring suspension stiffness = " + num(k_total) +
              " N/m (target 3.4, within 1%)");
  r.check(within_rel(budget.max_force, 17e-6, 0.01),
          "full-travel force budget = " + num(budget.max_force * 1e6) +
              " uN (target 17, within 1%)");
  r.check(within_rel(q_film, 241.0, 0.01),
          "squeeze-film quality factor = " + num(q_film) +
              " (target 241, within 1%)");
  r.check(std::fabs(t_ring - 96e-6) <= 2e-6,
          "amplitude ring-down time = " + num(t_ring * 1e6) +
              " us (target 96 +/- 2)");
  return r;
}

// --- 2. linear beam resonance ---------------------------------------------

Report linear_resonance() {
  constexpr double kResonance = 482.2e3;  // response-tone frequency [Hz]
  constexpr double kFreqTol = 1e-3;
  constexpr double kQTarget = 145.0;
  constexpr double kQTol = 0.03;
  Report r;
  SystemParams p;
  p.beam.beta = 0.0;  // cubic term off: pure linear resonator
  const SweepResult up = dynamics::frequency_sweep(p, 5.0, 239.5e3, 242.7e3,
                                                   65, SweepDirection::up);
  const auto [f_pk, a_pk] = refined_peak(up);
  const double f_resp = 2.0 * f_pk;  // the beam responds at twice the drive
  r.check(within_rel(f_resp, kResonance, kFreqTol),
          "response peak at " + num(f_resp / 1e3, 6) +
              " kHz (target 482.2, within 0.1%)");
  const double q = half_power_q(up);
  r.check(q > 0.0 && within_rel(q, kQTarget, kQTol),
          "half-power quality factor = " + num(q) + " (target 145, within 3%)");
  (void)a_pk;
  return r;
}

// --- 3. nonlinear (hardening) phenomenology -------------------------------

Report duffing_phenomenology() {
  constexpr double kCoincide = 0.005;  // up/down agreement bound, fractional
  constexpr double kCritLo = 53.0, kCritHi = 212.0;
  Report r;
  SystemParams p;  // defaults: hardening beam + characterized quality factor

  // The bistable loop migrates upward with drive amplitude (the backbone
  // shift grows like the squared response), so the sweep window's top edge
  // scales with drive; point count scales with span to hold ~100 Hz spacing.
  const auto hysteresis_at = [&p](double v0) {
    const double f_lo = 239.5e3;
    const double stretch = std::max(1.0, (v0 / 135.0) * (v0 / 135.0));
    const double f_hi = 241.1e3 + stretch * 5.4e3;
    const int points =
        1 + static_cast<int>(std::lround((f_hi - f_lo) / 100.0));
    const SweepResult u = dynamics::frequency_sweep(p, v0, f_lo, f_hi, points,
                                                    SweepDirection::up);
    const SweepResult d = dynamics::frequency_sweep(p, v0, f_lo, f_hi, points,
                                                    SweepDirection::down);
    return dynamics::sweep_hysteresis(u, d);
  };

  double lo = 40.0, hi = 250.0;
  const double h_lo = hysteresis_at(lo);
  const double h_hi = hysteresis_at(hi);
  r.check(h_lo <= kCoincide,
          "below critical drive the up/down sweeps coincide: mismatch at 40 V = " +
              num(h_lo, 3) + " (bound " + num(kCoincide, 3) + ")");
  r.check(h_hi > kCoincide,
          "above critical drive they split: mismatch at 250 V = " + num(h_hi, 3));
  if (h_lo <= kCoincide && h_hi > kCoincide) {
    for (int i = 0; i < 9; ++i) {
      const double mid = 0.5 * (lo + hi);
      (hysteresis_at(mid) > kCoincide ? hi : lo) = mid;
    }
    const double v_crit = 0.5 * (lo + hi);
    r.check(v_crit >= kCritLo && v_crit <= kCritHi,
            "critical drive amplitude = " + num(v_crit) +
                " V (accepted range 53..212 V, i.e. within 2x of 106 V)");
  } else {
    r.check(false, "critical drive amplitude not bracketed inside 40..250 V");
  }

  std::string peaks;
  bool monotone = true;
  double prev = 0.0;
  for (double v0 : {75.0, 106.0, 135.0}) {
    const SweepResult u = dynamics::frequency_sweep(p, v0, 239.5e3, 246.5e3,
                                                    71, SweepDirection::up);
    const double f_pk = refined_peak(u).first;
    monotone = monotone && f_pk > prev;
    prev = f_pk;
    if (!peaks.empty()) peaks += ", ";
    peaks += num(f_pk / 1e3, 6);
  }
  r.check(monotone, "peak frequency rises with drive amplitude (75/106/135 V): " +
                        peaks + " kHz");

  const SweepResult au = dynamics::amplitude_sweep(p, 245e3, 20.0, 200.0, 91,
                                                   SweepDirection::up);
  const SweepResult ad = dynamics::amplitude_sweep(p, 245e3, 20.0, 200.0, 91,
                                                   SweepDirection::down);
  r.check(au.jump_index >= 0 && ad.jump_index >= 0,
          "drive-amplitude ramp at 245 kHz jumps between branches both ways "
          "(up jump at " +
              (au.jump_index >= 0
                   ? num(au.axis[static_cast<std::size_t>(au.jump_index)])
                   : std::string("none")) +
              " V, down at " +
              (ad.jump_index >= 0
                   ? num(ad.axis[static_cast<std::size_t>(ad.jump_index)])
                   : std::string("none")) +
              " V)");
  return r;
}

// --- 4. inertial-sensor response ------------------------------------------

Report sensor_response() {
  constexpr double kPeakTol = 0.10;
  constexpr double kFlatTol = 0.05;
  Report r;
  SystemParams p;
  const double fm = p.mass.omega() / (2.0 * kPi);
  const double qm = p.mass.q_factor;
  const double a0 = 0.1 * kGravity;

  // Direct probe of the suspension oscillator: drive envelope held at zero so
  // the beam stays exactly at rest and the carrier table only supplies the
  // step size (1/200 of the sensor period).
  const double dt_target = 1.0 / (200.0 * fm);
  const CarrierTable tbl(1.0 / (2.0 * 48.0 * dt_target), 48);
  const double ring = 2.0 * qm / p.mass.omega();

  const auto amplitude_at = [&](double fa) {
    SystemState st;
    long long idx = 0;
    const auto accel = [&](double t) {
      return a0 * std::sin(2.0 * kPi * fa * t);
    };
    const double settle_t = std::max(6.0 * ring, 2.0 / fa);
    const long long n_settle =
        static_cast<long long>(std::ceil(settle_t / tbl.dt()));
    dynamics::integrate_span(st, p, tbl, idx, 0.0, accel, n_settle,
                             [](const SystemState&, long long) {});
    const int periods = std::max(2, static_cast<int>(std::ceil(0.01 * fa)));
    const long long n_meas =
        static_cast<long long>(std::llround(periods / fa / tbl.dt()));
    double si = 0.0, co = 0.0;
    dynamics::integrate_span(st, p, tbl, idx, 0.0, accel, n_meas,
                             [&](const SystemState& s, long long) {
                               const double ph = 2.0 * kPi * fa * s.t;
                               si += s.mass_disp * std::sin(ph);
                               co += s.mass_disp * std::cos(ph);
                             });
    return 2.0 * std::sqrt(si * si + co * co) / static_cast<double>(n_meas);
  };

  const double x_static = a0 * p.mass.mass / p.mass.stiffness;

  // Peak: scan around the configured sensor frequency, then refine.
  std::vector<double> scan;
  for (double s : {0.94, 0.96, 0.98, 0.99, 1.0, 1.01, 1.02, 1.04, 1.06}) {
    scan.push_back(s * fm);
  }
  SweepResult peak_curve;
  peak_curve.axis = scan;
  for (double f : scan) peak_curve.amplitude.push_back(amplitude_at(f));
  const auto [f_peak, a_peak] = refined_peak(peak_curve);
  const double gain_peak = a_peak / x_static;

  r.check(within_rel(f_peak, fm, 0.01),
          "resonance at the configured sensor frequency: peak at " +
              num(f_peak, 6) + " Hz (configured " + num(fm, 6) + ", within 1%)");
  r.check(within_rel(gain_peak, qm, kPeakTol),
          "dynamic amplification at the peak = " + num(gain_peak) +
              " (configured quality factor " + num(qm) + ", within 10%)");

  // Flatness: probe a log-spaced band; the written band reaches one third of
  // the sensor frequency, the asserted fallback one fifth.
  const std::vector<double> dividers = {50.0, 30.0, 20.0, 12.0, 8.0,
                                        6.0,  5.0,  4.0,  3.5,  3.0};
  double worst_third = 0.0, worst_third_f = 0.0;
  double worst_fifth = 0.0, worst_fifth_f = 0.0;
  for (double d : dividers) {
    const double f = fm / d;
    const double dev = std::fabs(amplitude_at(f) / x_static - 1.0);
    if (dev > worst_third) {
      worst_third = dev;
      worst_third_f = f;
    }
    if (d >= 5.0 && dev > worst_fifth) {
      worst_fifth = dev;
      worst_fifth_f = f;
    }
  }
  r.check(worst_third <= kFlatTol,
          "written flat band (every probe below fm/3 within 5% of static): "
          "worst deviation " +
              num(worst_third * 100.0, 3) + "% at " + num(worst_third_f, 5) +
              " Hz");
  r.check(worst_fifth <= kFlatTol,
          "flat band holding up to fm/5: worst deviation " +
              num(worst_fifth * 100.0, 3) + "% at " + num(worst_fifth_f, 5) +
              " Hz");
  r.note(
      "a second-order resonator rises to 1/(1-(f/fm)^2) = 1.125 at f = fm/3, "
      "so a 5% flatness band can only extend to about fm/4.6; the written "
      "fm/3 bound is unreachable for any faithful model of this sensor");
  return r;
}

// --- 5. readout training vs an independent solver -------------------------

Report ridge_oracle() {
  constexpr double kRelTol = 1e-8;
  constexpr int kInstances = 100;
  Report r;
  std::mt19937_64 rng(0x5EEDBA5EULL);
  const auto uni = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  double worst = 0.0;
  for (int inst = 0; inst < kInstances; ++inst) {
    const int rows = 2 + static_cast<int>(rng() % 49);  // 2..50
    const int cols = 1 + static_cast<int>(rng() % 50);  // 1..50
    const int dims = 1 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd x(rows, cols), y(rows, dims);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) x(i, j) = 2.0 * uni() - 1.0;
      for (int d = 0; d < dims; ++d) y(i, d) = 2.0 * uni() - 1.0;
    }
    // Log-uniform regularization over [1e-4, 1]: strong enough that the
    // comparison is numerically meaningful for rank-deficient draws.
    const double gamma = std::pow(10.0, -4.0 + 4.0 * uni());
    const learning::RidgeModel model = learning::train_ridge(x, y, gamma);

    // Independent route: dense Gaussian elimination with partial pivoting on
    // the regularized normal equations (X^T X + gamma I) W^T = X^T Y.
    const Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::MatrixXd rhs = x.transpose() * y;
    const int n = cols;
    std::vector<std::vector<double>> m(
        static_cast<std::size_t>(n),
        std::vector<double>(static_cast<std::size_t>(n + dims), 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m[i][j] = gram(i, j);
      m[i][i] += gamma;
      for (int d = 0; d < dims; ++d) m[i][n + d] = rhs(i, d);
    }
    for (int c = 0; c < n; ++c) {
      int pivot = c;
      for (int i = c + 1; i < n; ++i) {
        if (std::fabs(m[i][c]) > std::fabs(m[pivot][c])) pivot = i;
      }
      std::swap(m[c], m[pivot]);
      for (int i = c + 1; i < n; ++i) {
        const double f = m[i][c] / m[c][c];
        for (int j = c; j < n + dims; ++j) m[i][j] -= f * m[c][j];
      }
    }
    Eigen::MatrixXd w_oracle(dims, n);
    for (int d = 0; d < dims; ++d) {
      for (int i = n - 1; i >= 0; --i) {
        double acc = m[i][n + d];
        for (int j = i + 1; j < n; ++j) acc -= m[i][j] * w_oracle(d, j);
        w_oracle(d, i) = acc / m[i][i];
      }
    }
    const double scale = std::max(w_oracle.cwiseAbs().maxCoeff(), 1e-30);
    const double rel =
        (model.weights - w_oracle).cwiseAbs().maxCoeff() / scale;
    worst = std::max(worst, rel);
  }
  r.check(worst <= kRelTol,
          std::string("100 random systems (rows, features <= 50), ") +
              "regularization log-uniform in [1e-4, 1]: worst relative weight "
              "deviation = " +
              num(worst, 3) + " (bound 1e-8)");
  return r;
}

// --- 6/7/9 helpers ---------------------------------------------------------

std::map<int, double> test_nrmse_by_order(const pipeline::BenchmarkOutcome& o) {
  std::map<int, double> out;
  for (const pipeline::ScoreRow& s : o.scores) {
    if (s.split == "test") out[s.order] = s.nrmse;
  }
  return out;
}

std::map<int, double> test_success_by_order(
    const pipeline::BenchmarkOutcome& o) {
  std::map<int, double> out;
  for (const pipeline::ScoreRow& s : o.scores) {
    if (s.split == "test") out[s.order] = s.success_rate;
  }
  return out;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (int x : xs) {
    if (!out.empty()) out += ", ";
    out += std::to_string(x);
  }
  return out;
}

// Rank correlation of nrmse against order over the scored orders that fall in
// [lo, hi]; also reports which of those orders are present.
std::pair<double, std::vector<int>> ordering_rho(
    const std::map<int, double>& by_order, int lo, int hi) {
  std::vector<double> xs, ys;
  std::vector<int> present;
  for (const auto& [n, v] : by_order) {
    if (n < lo || n > hi) continue;
    present.push_back(n);
    xs.push_back(static_cast<double>(n));
    ys.push_back(v);
  }
  if (xs.size() < 2) return {0.0, present};
  return {learning::spearman_rho(xs, ys), present};
}

// --- 6. recurrence benchmark ----------------------------------------------

Report narma_benchmark(std::unique_ptr<pipeline::BenchmarkOutcome>& keep) {
  constexpr double kNrmseTarget = 0.6;
  constexpr double kRhoMin = 0.8;
  Report r;
  config::ExperimentConfig cfg;
  keep = std::make_unique<pipeline::BenchmarkOutcome>(
      pipeline::run_benchmark(cfg, tasks::TaskKind::narma, false, false));
  const pipeline::BenchmarkOutcome& out = *keep;

  const double nrmse10 = out.test_score(10).nrmse;
  r.check(nrmse10 <= kNrmseTarget,
          "test error at order 10: nrmse = " + fixed4(nrmse10) +
              " (written target <= 0.6)");

  const auto by_order = test_nrmse_by_order(out);
  const auto [rho, present] = ordering_rho(by_order, 3, 20);
  const bool full_span = present.size() == 18;  // all of 3..20 scored
  r.check(full_span && rho > kRhoMin,
          "written ordering span 3..20: " +
              (full_span
                   ? "rank correlation = " + fixed4(rho)
                   : "orders " + join_ints(out.excluded_orders) +
                         " admit no bounded target for any candidate input "
                         "draw, so no score exists there"));
  r.check(rho > kRhoMin,
          "error rises with order over the orders that admit targets (" +
              std::to_string(present.front()) + ".." +
              std::to_string(present.back()) + "): rank correlation = " +
              fixed4(rho) + " (> 0.8)");

  config::ExperimentConfig fast_cfg;
  config::apply_fast_profile(fast_cfg);
  const pipeline::BenchmarkOutcome fast =
      pipeline::run_benchmark(fast_cfg, tasks::TaskKind::narma, true, false);
  const auto [rho_fast, present_fast] =
      ordering_rho(test_nrmse_by_order(fast), 3, 20);
  r.check(rho_fast > kRhoMin,
          "fast profile shows the same ordering over its scored orders (" +
              std::to_string(present_fast.front()) + ".." +
              std::to_string(present_fast.back()) + "): rank correlation = " +
              fixed4(rho_fast));

  r.note("input redraws used: " + std::to_string(out.input_redraws) +
         "; the recurrence itself diverges at orders " +
         join_ints(out.excluded_orders) +
         " for step-independent inputs on [0, 0.5] (41 draws tried per "
         "order), so the 3..20 span is unreachable in this input model");
  r.note(
      "the order-10 miss tracks the drive chain: the delivered excitation "
      "decorrelates between adjacent task steps here, and the recurrence "
      "target built from that excitation is strictly harder to predict than "
      "one built from an excitation that stays correlated over tens of steps "
      "(see README)");
  return r;
}

// --- 7. bit-stream benchmark ----------------------------------------------

Report parity_benchmark(std::unique_ptr<pipeline::BenchmarkOutcome>& keep) {
  constexpr double kOrder1Min = 0.99;
  constexpr double kRhoMax = -0.8;
  Report r;
  config::ExperimentConfig cfg;
  keep = std::make_unique<pipeline::BenchmarkOutcome>(
      pipeline::run_benchmark(cfg, tasks::TaskKind::parity, false, false));
  const pipeline::BenchmarkOutcome& out = *keep;

  const double s1 = out.test_score(1).success_rate;
  r.check(s1 >= kOrder1Min,
          "order-1 reproduction: success = " + fixed4(s1) + " (>= 0.99)");

  const auto by_order = test_success_by_order(out);
  std::vector<double> xs, ys;
  std::string listed;
  for (const auto& [n, s] : by_order) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(s);
    if (!listed.empty()) listed += " ";
    listed += fixed4(s);
  }
  const double rho = learning::spearman_rho(xs, ys);
  r.check(rho <= kRhoMax, "success falls with order (1..6): " + listed +
                              "; rank correlation = " + fixed4(rho) +
                              " (<= -0.8)");

  const pipeline::ScoreRow& s2 = out.test_score(2);
  const double chance_bar = 0.5 + 5.0 * s2.ci_halfwidth;
  r.check(s2.success_rate > chance_bar,
          "order 2 beats chance decisively: " + fixed4(s2.success_rate) +
              " > 0.5 + 5 * " + num(s2.ci_halfwidth, 3) + " = " +
              fixed4(chance_bar) + " (2000 test samples)");
  return r;
}

// --- 8. property suites ----------------------------------------------------

double energy_drift(int steps_per_period, double cycles) {
  SystemParams p;
  p.beam.q_factor = 1e12;  // damping numerically off
  const CarrierTable tbl(245e3, steps_per_period);
  SystemState st;
  st.beam_disp = 500e-9;
  long long idx = 0;
  const double f0 = p.beam.omega0 / (2.0 * kPi);
  const long long n_steps =
      static_cast<long long>(std::llround(cycles / f0 / tbl.dt()));
  const double e0 = dynamics::beam_energy(st, p);
  dynamics::integrate_span(st, p, tbl, idx, 0.0, [](double) { return 0.0; },
                           n_steps, [](const SystemState&, long long) {},
                           /*freeze_mass=*/true);
  return std::fabs(dynamics::beam_energy(st, p) - e0) / e0;
}

double steady_amplitude(const SystemParams& p, double v0, double fd,
                        int steps_per_period) {
  const CarrierTable tbl(fd, steps_per_period);
  SystemState st;
  long long idx = 0;
  const long long settle =
      static_cast<long long>(8.0 * p.beam.q_factor) * steps_per_period;
  dynamics::integrate_span(st, p, tbl, idx, v0, [](double) { return 0.0; },
                           settle, [](const SystemState&, long long) {}, true);
  double lo = st.beam_disp, hi = st.beam_disp;
  const long long measure =
      static_cast<long long>(2.0 * p.beam.q_factor) * steps_per_period;
  dynamics::integrate_span(st, p, tbl, idx, v0, [](double) { return 0.0; },
                           measure,
                           [&](const SystemState& s, long long) {
                             lo = std::min(lo, s.beam_disp);
                             hi = std::max(hi, s.beam_disp);
                           },
                           true);
  return 0.5 * (hi - lo);
}

Report property_suites() {
  Report r;

  // Energy conservation with drive and damping off.
  const double drift_default = energy_drift(48, 1000.0);
  const double drift_fine = energy_drift(288, 1000.0);
  r.check(drift_default <= 1e-6,
          "energy conservation at the default carrier step (48/period): "
          "relative drift over 1000 cycles = " +
              num(drift_default, 3) + " (written bound 1e-6)");
  r.check(drift_fine <= 1e-6,
          "energy conservation at 288 steps/period: drift = " +
              num(drift_fine, 3) + " (<= 1e-6)");
  r.note(
      "fixed-step 4th-order integration drifts as the 5th power of the step; "
      "the default step resolves the drive and keeps benchmark runs "
      "affordable but cannot hold a 1e-6 energy bound, which is met at 6x "
      "refinement");

  // Step halving on a steady-state amplitude.
  {
    SystemParams p;
    const double a48 = steady_amplitude(p, 75.0, 241.1e3, 48);
    const double a96 = steady_amplitude(p, 75.0, 241.1e3, 96);
    const double rel = std::fabs(a96 - a48) / a96;
    r.check(rel < 1e-3, "step halving moves the steady response by " +
                            num(rel * 100.0, 3) + "% (< 0.1%)");
  }

  // Fading memory at the benchmark operating point.
  {
    const tasks::NarmaSpec nspec;
    const std::vector<double> u = tasks::narma_input(nspec, 110, 404);
    const SystemParams phys;
    const chain::DriveConfig cfg;  // full 100-node operating point
    const chain::ShakerConfig shaker;
    const reservoir::ReservoirRun a =
        reservoir::run_reservoir(u, phys, cfg, shaker, 50);
    SystemState bumped;
    bumped.beam_disp = 5e-8;
    const reservoir::ReservoirRun b =
        reservoir::run_reservoir(u, phys, cfg, shaker, 50, &bumped);
    const double scale = a.states.cwiseAbs().maxCoeff();
    const double worst = (a.states - b.states).cwiseAbs().maxCoeff();
    r.check(scale > 0.0 && worst < 0.01 * scale,
            "different initial beam states agree within 1% of full scale "
            "after a 50-step washout (residual " +
                num(scale > 0.0 ? worst / scale * 100.0 : 100.0, 3) + "%)");
  }

  // Determinism: identical configuration and seeds, bit-identical states.
  {
    const tasks::NarmaSpec nspec;
    const std::vector<double> u = tasks::narma_input(nspec, 60, 7);
    const SystemParams phys;
    chain::DriveConfig cfg;
    cfg.n_nodes = 10;
    const chain::ShakerConfig shaker;
    const reservoir::ReservoirRun a =
        reservoir::run_reservoir(u, phys, cfg, shaker, 10);
    const reservoir::ReservoirRun b =
        reservoir::run_reservoir(u, phys, cfg, shaker, 10);
    const bool states_equal = (a.states.array() == b.states.array()).all();
    const bool measured_equal = a.inputs_measured == b.inputs_measured;
    r.check(states_equal && measured_equal,
            "identical reruns are bit-identical (states and measured inputs)");
  }

  // Predicting the target mean scores nrmse exactly 1.
  {
    std::mt19937_64 rng(11);
    Eigen::VectorXd target(500);
    for (int i = 0; i < target.size(); ++i) {
      target(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    const Eigen::VectorXd constant =
        Eigen::VectorXd::Constant(target.size(), target.mean());
    const double v = learning::nrmse(constant, target);
    r.check(std::fabs(v - 1.0) < 1e-12,
            "predicting the target mean scores nrmse exactly 1 (|nrmse - 1| = " +
                num(std::fabs(v - 1.0), 3) + ")");
  }

  // Parity product identity on random capped streams.
  {
    const std::vector<double> u = tasks::parity_stream(400, 123, 3);
    bool ok = true;
    for (int n = 1; n <= 6 && ok; ++n) {
      const tasks::ParityTarget p = tasks::parity_target(u, n);
      for (std::size_t k = static_cast<std::size_t>(n); k < u.size(); ++k) {
        if (p.values[k] * p.values[k - 1] != u[k] * u[k - n]) {
          ok = false;
          break;
        }
      }
    }
    r.check(ok,
            "product identity P_n(k) * P_n(k-1) = u(k) * u(k-n) holds on a "
            "400-step random stream, orders 1..6");
  }

  // Binomial interval halfwidths against the closed form.
  {
    const double z = 1.959964;
    double worst = 0.0;
    for (const auto& [s, t] : std::vector<std::pair<long long, long long>>{
             {0, 50}, {1, 3}, {50, 50}, {1000, 2000}, {1990, 2000}, {1, 2000}}) {
      const double lib = learning::agresti_coull_halfwidth(s, t);
      const double nt = static_cast<double>(t) + z * z;
      const double pt = (static_cast<double>(s) + 0.5 * z * z) / nt;
      const double direct = z * std::sqrt(pt * (1.0 - pt) / nt);
      worst = std::max(worst,
                       std::fabs(lib - direct) / std::max(direct, 1e-300));
    }
    r.check(worst < 1e-12,
            "binomial interval halfwidths match the closed form on six cases "
            "(worst relative difference " +
                num(worst, 3) + ")");
  }
  return r;
}

// --- 9. feedback ablation ---------------------------------------------------

Report feedback_ablation(const pipeline::BenchmarkOutcome* narma_base,
                         const pipeline::BenchmarkOutcome* parity_base) {
  Report r;
  if (narma_base == nullptr || parity_base == nullptr) {
    r.check(false, "baseline benchmark outcomes unavailable (earlier criterion "
                   "aborted), ablation not comparable");
    return r;
  }

  config::ExperimentConfig cn;
  cn.narma_drive.alpha = 0.0;
  const pipeline::BenchmarkOutcome abl_n =
      pipeline::run_benchmark(cn, tasks::TaskKind::narma, false, false);
  const double base10 = narma_base->test_score(10).nrmse;
  const double abl10 = abl_n.test_score(10).nrmse;
  r.check(abl10 > base10,
          "recurrence order 10 degrades strictly with feedback off: nrmse " +
              fixed4(base10) + " -> " + fixed4(abl10) +
              " (same seeds, same input sequence)");

  config::ExperimentConfig cp;
  cp.parity_drive.alpha = 0.0;
  const pipeline::BenchmarkOutcome abl_p =
      pipeline::run_benchmark(cp, tasks::TaskKind::parity, false, false);
  const auto base_by = test_success_by_order(*parity_base);
  const auto abl_by = test_success_by_order(abl_p);
  double base_mean = 0.0, abl_mean = 0.0;
  bool per_order = true;
  std::string deltas;
  int count = 0;
  for (int n = 2; n <= 6; ++n) {
    const double sb = base_by.at(n);
    const double sa = abl_by.at(n);
    base_mean += sb;
    abl_mean += sa;
    ++count;
    if (n >= 3) per_order = per_order && sa < sb;
    if (!deltas.empty()) deltas += ", ";
    deltas += "n=" + std::to_string(n) + ": " + fixed4(sb) + "->" + fixed4(sa);
  }
  base_mean /= count;
  abl_mean /= count;
  r.check(abl_mean < base_mean,
          "bit-stream success over orders 2..6 degrades strictly: mean " +
              fixed4(base_mean) + " -> " + fixed4(abl_mean));
  r.check(per_order, "every order 3..6 degrades individually (" + deltas + ")");
  r.note(
      "order 2 sits at the 1.0000 ceiling in both runs (2000 trials), so a "
      "strict per-order drop is not observable there; the aggregate carries "
      "the comparison");
  return r;
}

}  // namespace

int main() {
  std::cout << "acceptance: nine criteria, full-resolution benchmark runs "
               "included (several minutes on one core)\n"
            << std::flush;

  std::unique_ptr<pipeline::BenchmarkOutcome> narma_full, parity_full;

  const std::vector<std::pair<std::string, std::function<Report()>>> criteria =
      {
          {"design formulas reproduce the characterized device",
           design_constants},
          {"linear beam resonance and quality factor", linear_resonance},
          {"hardening-regime sweeps: critical drive, peak shift, branch jumps",
           duffing_phenomenology},
          {"inertial-sensor dynamic amplification and flat band",
           sensor_response},
          {"readout training matches an independent elimination solver",
           ridge_oracle},
          {"recurrence benchmark at full resolution",
           [&] { return narma_benchmark(narma_full); }},
          {"bit-stream benchmark at full resolution",
           [&] { return parity_benchmark(parity_full); }},
          {"property suites: conservation, convergence, fading memory, "
           "determinism, metric identities",
           property_suites},
          {"feedback ablation degrades both benchmarks",
           [&] { return feedback_ablation(narma_full.get(),
                                          parity_full.get()); }},
      };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Report rep;
    try {
      rep = criteria[i].second();
    } catch (const std::exception& e) {
      rep.pass = false;
      rep.lines.push_back(std::string("MISS aborted: ") + e.what());
    }
    if (!rep.pass) ++failures;
    std::cout << (rep.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
              << criteria[i].first << "\n";
    for (const std::string& line : rep.lines) {
      std::cout << "         " << line << "\n";
    }
    std::cout << std::flush;
  }

  std::cout << "acceptance: " << (criteria.size() - failures) << "/"
            << criteria.size() << " criteria pass, " << failures
            << " fail\n";
  return failures;
}
