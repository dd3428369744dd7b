#pragma once

#include <string>
#include <vector>

#include "neuroacc/config.hpp"
#include "neuroacc/learning.hpp"
#include "neuroacc/reservoir.hpp"
#include "neuroacc/tasks.hpp"

namespace neuroacc::pipeline {

/// What a CLI stage produced: files on disk plus a one-line summary.
struct StageResult {
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::string summary;
};

/// Device characterization artifacts: up/down frequency sweeps at several
/// drive amplitudes, up/down amplitude sweeps at several carrier frequencies,
/// and the acceleration-frequency response, all as CSV under
/// `<output_dir>/characterization/`.
StageResult run_characterization(const config::ExperimentConfig& cfg, bool fast);

/// One scored readout dimension on one data split.
struct ScoreRow {
  int order = 0;
  std::string split;  // "train" | "test"
  double nrmse = 0.0;
  double rmse = 0.0;
  double success_rate = 0.0;
  double ci_halfwidth = 0.0;
};

/// Full benchmark outcome, kept in memory so callers can assert on it without
/// re-parsing the CSV artifacts.
struct BenchmarkOutcome {
  StageResult stage;
  reservoir::ReservoirRun run;
  learning::RidgeModel model;
  std::vector<int> orders;
  std::vector<ScoreRow> scores;
  double gamma = 0.0;
  int input_redraws = 0;  // divergent target sequences discarded

  /// For the recurrence task: seed offset (redraw count) each scored order
  /// ended up using, aligned with `orders`. High orders whose target blew up
  /// for every tried input are listed in `excluded_orders` and carry no
  /// scores. All zeros / empty for parity.
  std::vector<int> order_seed_offsets;
  std::vector<int> excluded_orders;

  /// Test-split metric for one order; throws if absent.
  const ScoreRow& test_score(int order) const;
};

/// End-to-end benchmark: generate the task sequence, run the physical
/// reservoir, build aligned targets, select the regularization, train the
/// readout, and score train/test splits. With `write_outputs` the artifacts
/// land under `<output_dir>/<task>/`.
BenchmarkOutcome run_benchmark(const config::ExperimentConfig& cfg,
                               tasks::TaskKind kind, bool fast,
                               bool write_outputs);

/// Axes of the hyperparameter grid; an empty axis keeps the base value.
struct HyperGrid {
  std::vector<double> v0;
  std::vector<double> fd;
  std::vector<double> alpha;
  std::vector<double> theta;
};

/// Cartesian grid of benchmark runs, executed on a worker pool (point count
/// permitting; NEUROACC_WORKERS overrides the pool size). Points are ranked
/// by the task metric at `rank_order` (error ascending for the recurrence
/// task, success descending for parity). Completed points are flushed to a
/// progress CSV as they finish; failures are recorded per point.
StageResult sweep_hyperparameters(const config::ExperimentConfig& cfg,
                                  tasks::TaskKind kind, const HyperGrid& grid,
                                  bool fast, int rank_order);

/// Debug artifact: carrier-rate trace of the first slots of a benchmark run
/// (drive voltage, beam and mass displacement, tracked envelope), decimated
/// by `stride`.
std::string dump_drive_waveform(const config::ExperimentConfig& cfg,
                                tasks::TaskKind kind, int n_slots, int stride);

/// Design-sheet text: every closed-form device number derived from the
/// geometry, for the design-report subcommand.
std::string design_report_text();

}  // namespace neuroacc::pipeline
