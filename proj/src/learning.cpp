#include "neuroacc/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "neuroacc/errors.hpp"

namespace neuroacc::learning {

RidgeModel train_ridge(const Eigen::MatrixXd& states,
                       const Eigen::MatrixXd& targets, double gamma) {
  if (states.rows() != targets.rows() || states.rows() < 1) {
    throw DimensionMismatchError("states and targets row counts differ");
  }
  if (gamma < 0.0) {
    throw InvalidGeometryError("gamma must be >= 0");
  }
  RidgeModel model;
  model.gamma = gamma;
  if (gamma == 0.0) {
    // Unregularized: exact least squares, which also interpolates consistent
    // wide systems. Rank-deficient states have no unique solution.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(states);
    if (qr.rank() < std::min(states.rows(), states.cols())) {
      throw SingularMatrixError(
          "states are rank-deficient and gamma = 0: ridge system is singular");
    }
    model.weights = qr.solve(targets).transpose();
    return model;
  }
  Eigen::MatrixXd gram = states.transpose() * states;
  gram.diagonal().array() += gamma;
  const Eigen::MatrixXd rhs = states.transpose() * targets;
  model.weights = gram.ldlt().solve(rhs).transpose();
  return model;
}

Eigen::MatrixXd predict(const RidgeModel& model, const Eigen::MatrixXd& states) {
  if (states.cols() != model.weights.cols()) {
    throw DimensionMismatchError("state width does not match trained weights");
  }
  return states * model.weights.transpose();
}

double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
  if (prediction.size() != target.size() || target.size() == 0) {
    throw DimensionMismatchError("prediction/target length mismatch");
  }
  return std::sqrt((prediction - target).squaredNorm() /
                   static_cast<double>(target.size()));
}

double nrmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
  if (prediction.size() != target.size() || target.size() == 0) {
    throw DimensionMismatchError("prediction/target length mismatch");
  }
  const double n = static_cast<double>(target.size());
  const double mean = target.mean();
  const double var = (target.array() - mean).square().sum() / n;
  if (!(var > 0.0)) {
    throw ZeroVarianceError("target series is constant; nrmse undefined");
  }
  const double e = rmse(prediction, target);
  return e / std::sqrt(var);
}

double agresti_coull_halfwidth(long long successes, long long trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw InvalidGeometryError("binomial score needs 0 <= successes <= trials");
  }
  const double z = 1.959964;
  const double nt = static_cast<double>(trials) + z * z;
  const double pt = (static_cast<double>(successes) + z * z / 2.0) / nt;
  return z * std::sqrt(pt * (1.0 - pt) / nt);
}

BinomialScore threshold_score(const Eigen::VectorXd& prediction,
                              const Eigen::VectorXd& target) {
  if (prediction.size() != target.size() || target.size() == 0) {
    throw DimensionMismatchError("prediction/target length mismatch");
  }
  BinomialScore s;
  s.trials = target.size();
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double p = prediction[i] >= 0.0 ? 1.0 : -1.0;
    if (p == target[i]) ++s.successes;
  }
  s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
  s.ci_halfwidth = agresti_coull_halfwidth(s.successes, s.trials);
  return s;
}

double evaluate_model(const RidgeModel& model, const Eigen::MatrixXd& states,
                      const Eigen::MatrixXd& targets, tasks::TaskKind kind) {
  const Eigen::MatrixXd pred = predict(model, states);
  double acc = 0.0;
  for (Eigen::Index c = 0; c < targets.cols(); ++c) {
    if (kind == tasks::TaskKind::narma) {
      acc -= nrmse(pred.col(c), targets.col(c));
    } else {
      acc += threshold_score(pred.col(c), targets.col(c)).success_rate;
    }
  }
  return acc / static_cast<double>(targets.cols());
}

double select_gamma(const Eigen::MatrixXd& fit_states,
                    const Eigen::MatrixXd& fit_targets,
                    const Eigen::MatrixXd& eval_states,
                    const Eigen::MatrixXd& eval_targets, tasks::TaskKind kind,
                    const std::vector<double>& grid) {
  if (grid.empty()) {
    throw InvalidGeometryError("gamma grid is empty");
  }
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_gamma = sorted.front();
  double best_metric = -std::numeric_limits<double>::infinity();
  for (double g : sorted) {
    const RidgeModel m = train_ridge(fit_states, fit_targets, g);
    const double metric = evaluate_model(m, eval_states, eval_targets, kind);
    // >= : exact ties resolve toward the larger (ascending) gamma.
    if (metric >= best_metric) {
      best_metric = metric;
      best_gamma = g;
    }
  }
  return best_gamma;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DimensionMismatchError("spearman needs two equally sized series");
  }
  const std::vector<double> rx = ranks(xs);
  const std::vector<double> ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0 && syy > 0.0)) {
    throw ZeroVarianceError("spearman undefined for constant ranks");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace neuroacc::learning
