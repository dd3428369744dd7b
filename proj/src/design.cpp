#include "neuroacc/design.hpp"

#include <cmath>

#include "neuroacc/errors.hpp"

namespace neuroacc::design {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidGeometryError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void SpringGeometry::validate() const {
  require_positive(youngs_modulus, "youngs_modulus");
  require_positive(thickness, "thickness");
  require_positive(width, "width");
  require_positive(long_arm, "long_arm");
  require_positive(short_arm, "short_arm");
}

void BeamGeometry::validate() const {
  require_positive(youngs_modulus, "youngs_modulus");
  require_positive(density, "density");
  require_positive(length, "length");
  require_positive(effective_length, "effective_length");
  require_positive(width, "width");
  require_positive(thickness, "thickness");
  require_positive(gap, "gap");
}

double accordion_spring_constant(const SpringGeometry& g) {
  g.validate();
  const double t3 = g.thickness * g.thickness * g.thickness;
  const double ll3 = g.long_arm * g.long_arm * g.long_arm;
  const double ls3 = g.short_arm * g.short_arm * g.short_arm;
  return 4.0 * g.youngs_modulus * g.width * t3 / (ll3 + ls3);
}

double suspension_stiffness(const SpringGeometry& g, int count) {
  if (count < 1) {
    throw InvalidGeometryError("spring count must be >= 1");
  }
  return static_cast<double>(count) * accordion_spring_constant(g);
}

double duffing_beta(const BeamGeometry& g) {
  g.validate();
  const double wave = 2.0 * kPi / g.effective_length;
  const double wave2 = wave * wave;
  return g.youngs_modulus / (18.0 * g.density) * wave2 * wave2;
}

double squeeze_film_q(const BeamGeometry& g, double omega0, double air_viscosity) {
  g.validate();
  require_positive(omega0, "omega0");
  require_positive(air_viscosity, "air_viscosity");
  const double d3 = g.gap * g.gap * g.gap;
  return g.density * g.thickness * d3 * omega0 / (air_viscosity * g.width * g.width);
}

double beam_modal_mass(const BeamGeometry& g) {
  g.validate();
  return device::kModalMassFactor * g.density * g.length * g.width * g.thickness;
}

double ring_down_time(double q_factor, double omega0) {
  require_positive(q_factor, "q_factor");
  require_positive(omega0, "omega0");
  return 2.0 * q_factor / omega0;
}

SensorBudget sensor_budget(double stiffness, double travel_limit, double mass) {
  require_positive(stiffness, "stiffness");
  require_positive(travel_limit, "travel_limit");
  require_positive(mass, "mass");
  SensorBudget b;
  b.max_force = stiffness * travel_limit;
  b.max_acceleration = b.max_force / mass;
  b.max_acceleration_g = b.max_acceleration / kGravity;
  b.natural_frequency = std::sqrt(stiffness / mass) / (2.0 * kPi);
  b.sensitivity = mass / stiffness;
  return b;
}

}  // namespace neuroacc::design
