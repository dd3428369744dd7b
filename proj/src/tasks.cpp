#include "neuroacc/tasks.hpp"

#include <cmath>
#include <random>

#include "neuroacc/errors.hpp"

namespace neuroacc::tasks {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> narma_input(const NarmaSpec& spec, std::size_t length,
                                std::uint64_t seed) {
  if (!(spec.u_high > spec.u_low)) {
    throw InvalidGeometryError("narma input range must have u_high > u_low");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> u(length);
  for (double& v : u) {
    v = spec.u_low + (spec.u_high - spec.u_low) * uniform01(rng);
  }
  return u;
}

std::vector<double> narma_target(const std::vector<double>& u, int n,
                                 double guard) {
  if (n < 1) {
    throw InvalidGeometryError("narma order must be >= 1");
  }
  const std::size_t len = u.size();
  std::vector<double> t(len, 0.0);
  // Ring buffer of the last n outputs plus their running sum; zero history.
  std::vector<double> hist(static_cast<std::size_t>(n), 0.0);
  double hist_sum = 0.0;
  std::size_t head = 0;
  double prev = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double u_old =
        (k + 1 >= static_cast<std::size_t>(n)) ? u[k + 1 - static_cast<std::size_t>(n)] : 0.0;
    const double y = 0.3 * prev + 0.05 * prev * hist_sum + 1.5 * u[k] * u_old + 0.1;
    if (!(std::fabs(y) <= guard)) {
      throw DivergenceError("narma target diverged (|y| > guard)");
    }
    t[k] = y;
    hist_sum += y - hist[head];
    hist[head] = y;
    head = (head + 1) % static_cast<std::size_t>(n);
    prev = y;
  }
  return t;
}

bool narma_input_in_range(const std::vector<double>& u, const NarmaSpec& spec) {
  for (double v : u) {
    if (v < spec.u_low || v > spec.u_high) return false;
  }
  return true;
}

std::vector<double> parity_stream(std::size_t length, std::uint64_t seed,
                                  int max_run) {
  std::mt19937_64 rng(seed);
  std::vector<double> bits(length);
  double last = 0.0;
  int run = 0;
  for (std::size_t k = 0; k < length; ++k) {
    double b = (rng() & 1ULL) ? 1.0 : -1.0;
    if (max_run > 0 && b == last && run >= max_run) {
      b = -b;
    }
    run = (b == last) ? run + 1 : 1;
    last = b;
    bits[k] = b;
  }
  return bits;
}

ParityTarget parity_target(const std::vector<double>& bits, int n) {
  if (n < 1) {
    throw InvalidGeometryError("parity order must be >= 1");
  }
  ParityTarget out;
  out.valid_from = static_cast<std::size_t>(n - 1);
  out.values.resize(bits.size(), 0.0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    double p = 1.0;
    for (int i = 0; i < n && static_cast<std::size_t>(i) <= k; ++i) {
      p *= bits[k - static_cast<std::size_t>(i)];
    }
    out.values[k] = p;
  }
  return out;
}

TargetMatrix build_target_matrix(TaskKind kind, const std::vector<double>& inputs,
                                 int n_min, int n_max, double guard) {
  if (n_min < 1 || n_max < n_min) {
    throw InvalidGeometryError("order range must satisfy 1 <= n_min <= n_max");
  }
  TargetMatrix m;
  for (int n = n_min; n <= n_max; ++n) {
    m.orders.push_back(n);
    if (kind == TaskKind::narma) {
      const std::vector<double> t = narma_target(inputs, n, guard);
      std::vector<double> col(inputs.size(), 0.0);
      for (std::size_t k = 1; k < inputs.size(); ++k) {
        col[k] = t[k - 1];
      }
      m.columns.push_back(std::move(col));
      m.valid_from = std::max<std::size_t>(m.valid_from, 1);
    } else {
      ParityTarget t = parity_target(inputs, n);
      m.valid_from = std::max(m.valid_from, t.valid_from);
      m.columns.push_back(std::move(t.values));
    }
  }
  return m;
}

}  // namespace neuroacc::tasks
