#pragma once

#include <cstdint>
#include <vector>

namespace neuroacc::tasks {

enum class TaskKind { narma, parity };

struct NarmaSpec {
  int n_min = 2;
  int n_max = 20;
  int train_length = 4000;
  int test_length = 400;
  double u_low = 0.0;
  double u_high = 0.5;
  std::uint64_t seed = 2025;
  double divergence_guard = 10.0;
};

struct ParitySpec {
  int n_min = 1;
  int n_max = 6;
  int train_length = 4000;
  int test_length = 2000;
  int max_run = 3;  // flip a bit that would extend a run past this length
  std::uint64_t seed = 777;
};

/// i.i.d. uniform drive samples in [u_low, u_high], portable across standard
/// libraries (raw 53-bit mantissa draws, not std distributions).
std::vector<double> narma_input(const NarmaSpec& spec, std::size_t length,
                                std::uint64_t seed);

/// Order-n nonlinear auto-regressive target. Entry k is the recurrence output
/// that consumed input u(k):
///   T[k] = 0.3 T[k-1] + 0.05 T[k-1] * sum_{i=1..n} T[k-i]
///          + 1.5 u(k) u(k-n+1) + 0.1
/// with zero history for negative indices. Throws DivergenceError when |T|
/// exceeds `guard`.
std::vector<double> narma_target(const std::vector<double>& u, int n,
                                 double guard = 10.0);

/// True when every sample lies inside the configured input range (the
/// recurrence is only well-behaved on its nominal range; callers warn
/// otherwise).
bool narma_input_in_range(const std::vector<double>& u, const NarmaSpec& spec);

/// Random bipolar bit stream (+1/-1) whose runs of identical bits are capped
/// at `max_run`: a bit that would extend a run past the cap is flipped.
/// max_run <= 0 disables the cap.
std::vector<double> parity_stream(std::size_t length, std::uint64_t seed,
                                  int max_run);

struct ParityTarget {
  std::vector<double> values;  // product of the last n bits, +1/-1
  std::size_t valid_from = 0;  // entries before this lack full history
};

/// P_n(k) = prod_{i=0..n-1} u(k-i) for a bipolar stream.
ParityTarget parity_target(const std::vector<double>& bits, int n);

/// Target columns for every order in [n_min, n_max], aligned to reservoir
/// rows: row k of a column is the value the readout should produce from the
/// state collected during input k's slot window. Parity targets align
/// directly; the narma recurrence output that consumed input k-1 is due at
/// row k (the update lags the state by one input).
struct TargetMatrix {
  std::vector<int> orders;
  std::vector<std::vector<double>> columns;  // columns[i][k], same length as inputs
  std::size_t valid_from = 0;                // rows before this are not scorable
};

TargetMatrix build_target_matrix(TaskKind kind, const std::vector<double>& inputs,
                                 int n_min, int n_max, double guard = 10.0);

}  // namespace neuroacc::tasks
