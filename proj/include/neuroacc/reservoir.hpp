#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "neuroacc/dynamics.hpp"
#include "neuroacc/signal_chain.hpp"

namespace neuroacc::reservoir {

/// One complete time-multiplexed run. Row k of `states` holds the N node
/// samples collected during task step k's delay period plus a trailing
/// constant bias entry of 1; the first `washout` task steps are already
/// discarded, so rows align index-for-index with the retained inputs.
struct ReservoirRun {
  Eigen::MatrixXd states;               // M x (n_nodes + 1)
  std::vector<double> inputs_setpoint;  // length M, task units
  std::vector<double> inputs_measured;  // length M, task units (rescaled)
  chain::DriveConfig config;
  int washout = 0;

  double adc_full_scale = 0.0;   // resolved full scale actually applied [V]
  double adc_clip_fraction = 0.0;
  std::vector<std::string> warnings;
};

/// Affine map of the produced-acceleration trace back into task units:
/// output mean and peak-to-peak amplitude match `reference`. Throws
/// ZeroVarianceError when `measured` is constant (no scale recoverable).
std::vector<double> rescale_measured_input(const std::vector<double>& measured,
                                           const std::vector<double>& reference);

/// Drive the full chain for every task sample: each sample (times input_gain)
/// is held as the vibration setpoint for one delay period tau, the emulated
/// shaker turns it into the frame acceleration, the beam+mass system is
/// integrated contiguously under the slot-multiplexed drive, and the
/// demodulated envelope is ADC-sampled at each slot end. Slot samples feed
/// back into the matching slot's drive envelope one period later (zeros on
/// the first period). `initial` overrides the zero start state when given.
ReservoirRun run_reservoir(const std::vector<double>& task_input,
                           const dynamics::SystemParams& physics,
                           const chain::DriveConfig& chain_cfg,
                           const chain::ShakerConfig& shaker_cfg, int washout,
                           const dynamics::SystemState* initial = nullptr);

}  // namespace neuroacc::reservoir
