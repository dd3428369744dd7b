#pragma once

#include <cmath>
#include <vector>

#include "neuroacc/constants.hpp"
#include "neuroacc/errors.hpp"

namespace neuroacc::dynamics {

/// Clamped-clamped beam resonator reduced to its fundamental mode.
/// The equation of motion is per unit modal mass:
///   y'' = -(omega0/Q) y' - omega0^2 y - beta y^3 + drive_gain * F_e / m_eff
/// with F_e the parallel-plate electrostatic force at the instantaneous gap.
/// `drive_gain` folds the unmodeled transduction-chain scale between the
/// plate-capacitor estimate and the forcing that reproduces the characterized
/// response; it multiplies the beam forcing only.
struct BeamParams {
  double omega0 = 2.0 * kPi * device::kBeamMeasuredFrequency;  // [rad/s]
  double q_factor = device::kBeamMeasuredQ;
  double beta = device::kBeamFittedBeta;  // [1/(m^2 s^2)], >= 0
  double effective_mass = device::kModalMassFactor * device::kSiliconDensity *
                          device::kBeamLength * device::kBeamWidth *
                          device::kBeamThickness;            // [kg]
  double rest_gap = device::kElectrodeGap;                   // [m]
  double electrode_area = device::kElectrodeLength * device::kBeamWidth;  // [m^2]
  // 0.375 calibrates the plate-capacitor forcing estimate so the hysteresis
  // onset lands at the characterized 106 V drive amplitude.
  double drive_gain = 0.375;

  void validate() const;
};

/// Suspended proof mass (one degree of freedom along the gap direction).
/// It responds to external acceleration and to the envelope-averaged (DC)
/// component of the electrostatic force only: the 2*omega_d component lies
/// two decades above its resonance. `dc_pull_area_fraction` is the effective
/// fraction of the electrode area contributing to that slow pull; the default
/// keeps the mass clear of electrostatic pull-in at the largest closed-loop
/// drive envelopes (~470 V with full-scale feedback).
struct MassParams {
  double mass = device::kSuspensionStiffness /
                ((2.0 * kPi * device::kMassMeasuredFrequency) *
                 (2.0 * kPi * device::kMassMeasuredFrequency));  // [kg]
  double stiffness = device::kSuspensionStiffness;               // [N/m]
  double q_factor = device::kMassMeasuredQ;
  double travel_limit = device::kMassTravelLimit;  // [m] bumper gap
  double dc_pull_area_fraction = 0.05;

  double omega() const { return std::sqrt(stiffness / mass); }
  void validate() const;
};

struct SystemParams {
  BeamParams beam;
  MassParams mass;

  void validate() const;  // also checks travel_limit < rest_gap
};

/// Positive displacement closes the beam<->mass gap for both bodies.
struct SystemState {
  double beam_disp = 0.0;  // [m]
  double beam_vel = 0.0;   // [m/s]
  double mass_disp = 0.0;  // [m]
  double mass_vel = 0.0;   // [m/s]
  double t = 0.0;          // [s]
};

/// Drive voltage at one instant: the oscillating value and its slowly
/// varying amplitude. The beam feels v_inst^2; the mass feels the DC term
/// of v_env^2 * cos^2, i.e. v_env^2 / 2.
struct DriveSample {
  double v_inst = 0.0;  // [V]
  double v_env = 0.0;   // [V]
};

/// Parallel-plate electrostatic force at one instant [N]:
/// F = eps0 A V^2 / (2 d^2), attractive (gap-closing). Throws on d <= 0.
double electrostatic_force(double voltage, double gap, double area);

/// Time average of electrostatic_force over one carrier period for a drive
/// v0 cos(omega_d t) at fixed gap [N]: eps0 A v0^2 / (4 d^2).
double mean_electrostatic_force(double v0, double gap, double area);

/// Mechanical energy of the beam mode alone [J] (kinetic + linear + cubic
/// stiffness potential); used by conservation checks with damping off.
double beam_energy(const SystemState& st, const SystemParams& p);

/// Timestep for a carrier at drive frequency fd [Hz] resolved with
/// `steps_per_period` RK4 steps per forcing period (the period of 2*omega_d).
/// Enforces the accuracy floor of 40 steps per forcing period.
double carrier_timestep(double fd, int steps_per_period);

namespace detail {

struct Derivs {
  double dy, dv, dx, dw;
};

// Right-hand side of the coupled system. `accel` is the external frame
// acceleration, `freeze_mass` pins the proof mass (characterization mode).
inline Derivs rhs(const SystemParams& p, double y, double v, double x, double w,
                  double v_inst, double v_env, double accel, bool freeze_mass) {
  const BeamParams& b = p.beam;
  const double gap_b = b.rest_gap - x - y;
  if (!(gap_b > 0.01 * b.rest_gap)) {
    throw PullInError("electrode gap collapsed during integration");
  }
  const double f_beam = b.drive_gain * kEpsilon0 * b.electrode_area * v_inst *
                        v_inst / (2.0 * gap_b * gap_b * b.effective_mass);
  Derivs d;
  d.dy = v;
  d.dv = -(b.omega0 / b.q_factor) * v - b.omega0 * b.omega0 * y -
         b.beta * y * y * y + f_beam;
  if (freeze_mass) {
    d.dx = 0.0;
    d.dw = 0.0;
  } else {
    const MassParams& m = p.mass;
    const double gap_m = b.rest_gap - x;
    const double f_mass = m.dc_pull_area_fraction * kEpsilon0 *
                          b.electrode_area * v_env * v_env /
                          (4.0 * gap_m * gap_m * m.mass);
    const double om = m.omega();
    d.dx = w;
    d.dw = -(om / m.q_factor) * w - om * om * x + accel + f_mass;
  }
  return d;
}

inline void enforce_limits(SystemState& st, const SystemParams& p) {
  const double lim = p.mass.travel_limit;
  if (st.mass_disp > lim) {
    st.mass_disp = lim;
    if (st.mass_vel > 0.0) st.mass_vel = 0.0;
  } else if (st.mass_disp < -lim) {
    st.mass_disp = -lim;
    if (st.mass_vel < 0.0) st.mass_vel = 0.0;
  }
  if (!(std::fabs(st.beam_disp) < 1.0 && std::fabs(st.mass_disp) < 1.0 &&
        std::isfinite(st.beam_vel) && std::isfinite(st.mass_vel))) {
    throw NumericOverflowError("state left the sane range (|disp| >= 1 m or non-finite)");
  }
}

}  // namespace detail

/// One classic RK4 step of the coupled system. `drive(t)` returns the
/// instantaneous and envelope voltage, `accel(t)` the frame acceleration
/// [m/s^2]. The bumper clamp and overflow guard run after the step.
template <class DriveFn, class AccelFn>
void step_system(SystemState& st, const SystemParams& p, DriveFn&& drive,
                 AccelFn&& accel, double dt, bool freeze_mass = false) {
  using detail::rhs;
  const double t0 = st.t;
  const double th = t0 + 0.5 * dt;
  const double t1 = t0 + dt;
  const DriveSample d0 = drive(t0);
  const DriveSample dh = drive(th);
  const DriveSample d1 = drive(t1);
  const double a0 = accel(t0);
  const double ah = accel(th);
  const double a1 = accel(t1);

  const double y = st.beam_disp, v = st.beam_vel;
  const double x = st.mass_disp, w = st.mass_vel;

  const auto k1 = rhs(p, y, v, x, w, d0.v_inst, d0.v_env, a0, freeze_mass);
  const auto k2 = rhs(p, y + 0.5 * dt * k1.dy, v + 0.5 * dt * k1.dv,
                      x + 0.5 * dt * k1.dx, w + 0.5 * dt * k1.dw, dh.v_inst,
                      dh.v_env, ah, freeze_mass);
  const auto k3 = rhs(p, y + 0.5 * dt * k2.dy, v + 0.5 * dt * k2.dv,
                      x + 0.5 * dt * k2.dx, w + 0.5 * dt * k2.dw, dh.v_inst,
                      dh.v_env, ah, freeze_mass);
  const auto k4 = rhs(p, y + dt * k3.dy, v + dt * k3.dv, x + dt * k3.dx,
                      w + dt * k3.dw, d1.v_inst, d1.v_env, a1, freeze_mass);

  const double s = dt / 6.0;
  st.beam_disp = y + s * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  st.beam_vel = v + s * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  st.mass_disp = x + s * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  st.mass_vel = w + s * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  st.t = t1;
  detail::enforce_limits(st, p);
}

/// Precomputed carrier phase tables. With dt = 1/(2 fd steps_per_period) the
/// carrier phase advances exactly pi/steps_per_period per step, so cos(omega_d t)
/// and the 2*omega_d demodulation references repeat with short integer periods
/// and the hot loop needs no trigonometry.
class CarrierTable {
 public:
  CarrierTable(double fd, int steps_per_period);

  double fd() const { return fd_; }
  double dt() const { return dt_; }
  int steps_per_period() const { return steps_per_period_; }

  /// cos(omega_d t) at half-step resolution; index = half-step count.
  double cos_drive_half(long long half_index) const {
    return cos_half_[static_cast<std::size_t>(half_index % (4 * steps_per_period_))];
  }
  /// cos/sin(2 omega_d t) at full-step resolution; index = step count.
  double cos_ref(long long step_index) const {
    return cos2_[static_cast<std::size_t>(step_index % steps_per_period_)];
  }
  double sin_ref(long long step_index) const {
    return sin2_[static_cast<std::size_t>(step_index % steps_per_period_)];
  }

 private:
  double fd_;
  double dt_;
  int steps_per_period_;
  std::vector<double> cos_half_;  // size 4 * steps_per_period
  std::vector<double> cos2_, sin2_;  // size steps_per_period
};

/// Integrate `n_steps` carrier-resolution steps with a constant drive
/// envelope and per-step external acceleration. `accel(t)` is evaluated at
/// RK4 substep times; `sink(state, step_end_index)` runs after every step
/// (demodulator feed, amplitude tracking, ...). `step_index` is the global
/// carrier step counter keyed to the phase tables and is advanced in place.
template <class AccelFn, class Sink>
void integrate_span(SystemState& st, const SystemParams& p,
                    const CarrierTable& tbl, long long& step_index,
                    double v_envelope, AccelFn&& accel, long long n_steps,
                    Sink&& sink, bool freeze_mass = false) {
  using detail::rhs;
  const double dt = tbl.dt();
  const double s6 = dt / 6.0;
  for (long long n = 0; n < n_steps; ++n) {
    const long long half = 2 * step_index;
    const double c0 = tbl.cos_drive_half(half);
    const double ch = tbl.cos_drive_half(half + 1);
    const double c1 = tbl.cos_drive_half(half + 2);
    const double t0 = st.t;
    const double a0 = accel(t0);
    const double ah = accel(t0 + 0.5 * dt);
    const double a1 = accel(t0 + dt);

    const double y = st.beam_disp, v = st.beam_vel;
    const double x = st.mass_disp, w = st.mass_vel;
    const auto k1 =
        rhs(p, y, v, x, w, v_envelope * c0, v_envelope, a0, freeze_mass);
    const auto k2 = rhs(p, y + 0.5 * dt * k1.dy, v + 0.5 * dt * k1.dv,
                        x + 0.5 * dt * k1.dx, w + 0.5 * dt * k1.dw,
                        v_envelope * ch, v_envelope, ah, freeze_mass);
    const auto k3 = rhs(p, y + 0.5 * dt * k2.dy, v + 0.5 * dt * k2.dv,
                        x + 0.5 * dt * k2.dx, w + 0.5 * dt * k2.dw,
                        v_envelope * ch, v_envelope, ah, freeze_mass);
    const auto k4 = rhs(p, y + dt * k3.dy, v + dt * k3.dv, x + dt * k3.dx,
                        w + dt * k3.dw, v_envelope * c1, v_envelope, a1,
                        freeze_mass);
    st.beam_disp = y + s6 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    st.beam_vel = v + s6 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    st.mass_disp = x + s6 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    st.mass_vel = w + s6 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    st.t = t0 + dt;
    detail::enforce_limits(st, p);
    ++step_index;
    sink(st, step_index);
  }
}

/// Static equilibrium displacement of the proof mass under the DC
/// electrostatic pull of a carrier with envelope `v_env` [m]. Solved by
/// fixed-point iteration on the gap; throws PullInError if no stable
/// equilibrium exists (electrostatic gradient exceeds the suspension).
double settle_mass_equilibrium(const SystemParams& p, double v_env);

}  // namespace neuroacc::dynamics
