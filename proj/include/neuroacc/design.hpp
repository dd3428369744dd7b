#pragma once

#include "neuroacc/constants.hpp"

namespace neuroacc::design {

/// Folded "accordion" flexure: n_turns of thin beams of in-plane width
/// `thickness`, out-of-plane depth `width`, with alternating long/short arms.
struct SpringGeometry {
  double youngs_modulus = device::kYoungsModulus;  // [Pa]
  double thickness = device::kSpringThickness;     // [m] bending direction
  double width = device::kSpringWidth;             // [m] device-layer depth
  double long_arm = device::kSpringLongArm;        // [m]
  double short_arm = device::kSpringShortArm;      // [m]

  void validate() const;  // throws InvalidGeometryError on non-positive entries
};

/// Clamped-clamped beam resonator geometry and material.
struct BeamGeometry {
  double youngs_modulus = device::kYoungsModulus;          // [Pa]
  double density = device::kSiliconDensity;                // [kg/m^3]
  double length = device::kBeamLength;                     // [m]
  double effective_length = device::kBeamEffectiveLength;  // [m] mode fit
  double width = device::kBeamWidth;                       // [m]
  double thickness = device::kBeamThickness;               // [m]
  double gap = device::kElectrodeGap;                      // [m]

  void validate() const;
};

/// Static force/acceleration budget of the suspended proof mass.
struct SensorBudget {
  double max_force = 0.0;           // [N] spring force at full travel
  double max_acceleration = 0.0;    // [m/s^2]
  double max_acceleration_g = 0.0;  // [g]
  double natural_frequency = 0.0;   // [Hz]
  double sensitivity = 0.0;         // [m per m/s^2] static displacement slope
};

/// Stiffness of one accordion spring along the accordion axis [N/m]:
/// k = 4 E w t^3 / (L_long^3 + L_short^3).
double accordion_spring_constant(const SpringGeometry& g);

/// Total suspension stiffness for `count` identical springs in parallel [N/m].
double suspension_stiffness(const SpringGeometry& g, int count);

/// Geometric estimate of the beam's cubic (hardening) coefficient
/// [1/(m^2 s^2)]: beta = (E / 18 rho) * (2 pi / l_eff)^4.
double duffing_beta(const BeamGeometry& g);

/// Squeeze-film damping estimate for the beam oscillating against the gap:
/// Q = rho t d^3 omega0 / (mu w^2). `omega0` in rad/s.
double squeeze_film_q(const BeamGeometry& g, double omega0,
                      double air_viscosity = device::kAirViscosity);

/// Effective modal mass of the fundamental clamped-clamped mode [kg].
double beam_modal_mass(const BeamGeometry& g);

/// Amplitude ring-down time constant T = 2 Q / omega0 [s].
double ring_down_time(double q_factor, double omega0);

/// Full-travel force/acceleration budget for a mass on a suspension of
/// stiffness `k` with bumpers at `travel_limit`.
SensorBudget sensor_budget(double stiffness, double travel_limit, double mass);

}  // namespace neuroacc::design
