#pragma once

#include <string>
#include <vector>

#include "neuroacc/constants.hpp"
#include "neuroacc/dynamics.hpp"
#include "neuroacc/signal_chain.hpp"
#include "neuroacc/sweeps.hpp"
#include "neuroacc/tasks.hpp"

namespace neuroacc::config {

/// Regularization search and evaluation protocol for the readout.
struct LearningConfig {
  std::vector<double> gamma_grid = {1e-6, 1e-5, 1e-4, 1e-3,
                                    5e-3, 1e-2, 1e-1, 1.0};
  // false: pick gamma on a held-out tail of the training rows (honest).
  // true: pick gamma directly on the test rows (reproduces the published
  // protocol, which leaks the test set into model selection).
  bool gamma_on_test = false;
  double validation_fraction = 0.1;

  void validate() const;
};

/// Benchmark-specific drive operating point: the two tasks run the same
/// device at different feedback gains and input scalings.
struct TaskDrive {
  double alpha = 0.0;
  double input_gain = 0.0;  // [m/s^2 per unit task input]
};

/// Everything a run needs, with defaults matching the characterized device
/// and the published operating points.
struct ExperimentConfig {
  dynamics::SystemParams physics;
  chain::DriveConfig drive;
  chain::ShakerConfig shaker;
  tasks::NarmaSpec narma;
  tasks::ParitySpec parity;
  TaskDrive narma_drive{1.2, 4.0 * kGravity};
  TaskDrive parity_drive{0.7, 2.0 * kGravity};
  LearningConfig learning;
  dynamics::SweepSettings sweep;
  int washout = 200;
  bool targets_from_setpoint = false;  // narma targets from setpoint, not measured
  std::string output_dir = "out";

  void validate() const;
};

/// Drive configuration actually used for a benchmark task: the shared drive
/// block with the task's feedback gain and input scaling substituted in.
chain::DriveConfig drive_for(const ExperimentConfig& cfg, tasks::TaskKind kind);

/// ~10x-shorter profile for smoke runs: sequence lengths and washout shrink
/// tenfold; carrier resolution is already at its accuracy floor and stays.
/// Results are not comparable with full-profile numbers.
void apply_fast_profile(ExperimentConfig& cfg);

/// Load overrides from a JSON file (// and /* */ comments allowed) on top of
/// the defaults. Unknown keys are rejected with ConfigError naming the key.
ExperimentConfig load_config(const std::string& path);

/// Parse overrides from a JSON string (used by load_config and tests).
ExperimentConfig parse_config(const std::string& text);

/// Canonical flat key=value listing of every field; stable field order.
std::string canonical_dump(const ExperimentConfig& cfg);

/// Fully-resolved configuration as a JSON document in the same schema that
/// load_config accepts, so a run's exact inputs can be replayed.
std::string dump_json(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical dump, as 16 hex digits. Embedded in every
/// output file so results can be traced to their exact configuration.
std::string config_hash(const ExperimentConfig& cfg);

/// End-of-run record: what ran, from which config, producing which files.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string tool_version;
  double wall_seconds = 0.0;
  bool fast_profile = false;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::string summary;

  /// Serialize as JSON and write atomically (temp file + rename).
  void write(const std::string& path) const;
};

}  // namespace neuroacc::config
