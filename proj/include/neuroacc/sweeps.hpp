#pragma once

#include <string>
#include <vector>

#include "neuroacc/dynamics.hpp"

namespace neuroacc::dynamics {

enum class SweepDirection { up, down };

/// Shared knobs for the steady-state sweep protocols. Negative cycle counts
/// select the defaults: settle 8*Q forcing cycles, measure over 2*Q.
struct SweepSettings {
  int steps_per_period = 48;
  double settle_cycles = -1.0;
  double measure_cycles = -1.0;
  // A point-to-point amplitude step larger than this fraction of the curve
  // maximum is reported as a jump (branch switch).
  double jump_threshold = 0.1;
};

struct SweepResult {
  std::string axis_name;            // "drive_frequency_hz" | "drive_voltage_v" | ...
  SweepDirection direction = SweepDirection::up;
  std::vector<double> axis;         // in sweep order
  std::vector<double> amplitude;    // steady-state beam amplitude [m]
  int jump_index = -1;              // first point after the largest detected jump
};

/// Steady-state beam amplitude vs drive frequency at fixed drive voltage.
/// The proof mass is held fixed (characterization rig). Beam state carries
/// over between points, so branch memory (hysteresis) is captured.
SweepResult frequency_sweep(const SystemParams& params, double v0, double f_lo,
                            double f_hi, int n_points, SweepDirection direction,
                            const SweepSettings& settings = {});

/// Steady-state beam amplitude vs drive voltage at fixed drive frequency.
/// Before each point the proof mass is settled to its static equilibrium
/// under the DC force term (the gap narrows as the voltage grows) and then
/// held there while the beam reaches steady state.
SweepResult amplitude_sweep(const SystemParams& params, double fd, double v_lo,
                            double v_hi, int n_points, SweepDirection direction,
                            const SweepSettings& settings = {});

/// Envelope-modulation sensitivity vs external-acceleration frequency with
/// the beam driven in its linear regime. For each frequency, a sinusoidal
/// frame acceleration of amplitude `accel_amplitude` [m/s^2] is applied, the
/// per-carrier-period beam amplitude is tracked, and its modulation at the
/// acceleration frequency is extracted coherently. Result amplitude is the
/// sensitivity [m of envelope per m/s^2].
SweepResult sensor_frequency_response(const SystemParams& params, double v0,
                                      double fd,
                                      const std::vector<double>& accel_freqs,
                                      double accel_amplitude,
                                      const SweepSettings& settings = {});

/// Largest pointwise mismatch between an up and a down sweep of the same
/// axis, as a fraction of the larger curve maximum. Axes must match after
/// reversing the down sweep.
double sweep_hysteresis(const SweepResult& up, const SweepResult& down);

}  // namespace neuroacc::dynamics
