#include "neuroacc/dynamics.hpp"

#include <cmath>

namespace neuroacc::dynamics {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw InvalidGeometryError(std::string(name) + " must be positive");
  }
}

}  // namespace

void BeamParams::validate() const {
  require_positive(omega0, "beam omega0");
  require_positive(effective_mass, "beam effective_mass");
  require_positive(rest_gap, "beam rest_gap");
  require_positive(electrode_area, "beam electrode_area");
  require_positive(drive_gain, "beam drive_gain");
  if (!(beta >= 0.0)) {
    throw InvalidGeometryError("beam beta must be >= 0");
  }
  // Underdamped resonator: the damping rate omega0/Q must stay below omega0.
  if (!(q_factor > 1.0)) {
    throw InvalidGeometryError("beam q_factor must exceed 1");
  }
}

void MassParams::validate() const {
  require_positive(mass, "mass");
  require_positive(stiffness, "mass stiffness");
  require_positive(travel_limit, "mass travel_limit");
  if (!(q_factor > 1.0)) {
    throw InvalidGeometryError("mass q_factor must exceed 1");
  }
  if (!(dc_pull_area_fraction >= 0.0 && dc_pull_area_fraction <= 1.0)) {
    throw InvalidGeometryError("dc_pull_area_fraction must lie in [0, 1]");
  }
}

void SystemParams::validate() const {
  beam.validate();
  mass.validate();
  if (!(mass.travel_limit < beam.rest_gap)) {
    throw InvalidGeometryError("travel_limit must stay below the electrode gap");
  }
}

double electrostatic_force(double voltage, double gap, double area) {
  require_positive(area, "electrode area");
  if (!(gap > 0.0)) {
    throw PullInError("electrostatic force requested at non-positive gap");
  }
  return kEpsilon0 * area * voltage * voltage / (2.0 * gap * gap);
}

double mean_electrostatic_force(double v0, double gap, double area) {
  // <cos^2> = 1/2 over a carrier period.
  return 0.5 * electrostatic_force(v0, gap, area);
}

double beam_energy(const SystemState& st, const SystemParams& p) {
  const BeamParams& b = p.beam;
  const double y = st.beam_disp;
  const double v = st.beam_vel;
  return b.effective_mass * (0.5 * (v * v + b.omega0 * b.omega0 * y * y) +
                             0.25 * b.beta * y * y * y * y);
}

double carrier_timestep(double fd, int steps_per_period) {
  if (!(fd > 0.0)) {
    throw InvalidGeometryError("drive frequency must be positive");
  }
  if (steps_per_period < 40) {
    throw InvalidGeometryError(
        "carrier resolution below 40 steps per forcing period");
  }
  // Forcing period is that of 2*omega_d: the beam is driven by V^2.
  return 1.0 / (2.0 * fd * steps_per_period);
}

CarrierTable::CarrierTable(double fd, int steps_per_period)
    : fd_(fd),
      dt_(carrier_timestep(fd, steps_per_period)),
      steps_per_period_(steps_per_period) {
  // One step advances the carrier phase omega_d*dt = pi/steps_per_period.
  const int s = steps_per_period_;
  cos_half_.resize(static_cast<std::size_t>(4 * s));
  for (int k = 0; k < 4 * s; ++k) {
    cos_half_[static_cast<std::size_t>(k)] = std::cos(kPi * k / (2.0 * s));
  }
  cos2_.resize(static_cast<std::size_t>(s));
  sin2_.resize(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) {
    cos2_[static_cast<std::size_t>(k)] = std::cos(2.0 * kPi * k / s);
    sin2_[static_cast<std::size_t>(k)] = std::sin(2.0 * kPi * k / s);
  }
}

double settle_mass_equilibrium(const SystemParams& p, double v_env) {
  p.validate();
  const MassParams& m = p.mass;
  const BeamParams& b = p.beam;
  const double coeff = m.dc_pull_area_fraction * kEpsilon0 * b.electrode_area *
                       v_env * v_env / 4.0;
  double x = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double gap = b.rest_gap - x;
    if (!(gap > 0.0)) {
      throw PullInError("mass equilibrium collapsed the gap");
    }
    const double x_next = coeff / (gap * gap) / m.stiffness;
    if (x_next > m.travel_limit) {
      // The bumper catches the mass before the gap closes.
      return m.travel_limit;
    }
    if (std::fabs(x_next - x) < 1e-15) {
      return x_next;
    }
    x = x_next;
  }
  throw PullInError("mass equilibrium iteration did not converge (near pull-in)");
}

}  // namespace neuroacc::dynamics
