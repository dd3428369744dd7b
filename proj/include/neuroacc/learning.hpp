#pragma once

#include <Eigen/Dense>
#include <vector>

#include "neuroacc/tasks.hpp"

namespace neuroacc::learning {

/// Linear readout trained by ridge regression: minimizes
/// ||X W^T - Y||^2 + gamma ||W||^2 over weights W (targets x features).
/// X rows are reservoir states (bias column included), Y rows are targets.
struct RidgeModel {
  Eigen::MatrixXd weights;  // D x F
  double gamma = 0.0;
};

/// Solve the regularized normal equations (X^T X + gamma I) W^T = X^T Y via
/// a Cholesky-type factorization. gamma = 0 falls back to a rank-revealing
/// solve and throws SingularMatrixError on rank-deficient states.
RidgeModel train_ridge(const Eigen::MatrixXd& states,
                       const Eigen::MatrixXd& targets, double gamma);

Eigen::MatrixXd predict(const RidgeModel& model, const Eigen::MatrixXd& states);

/// Root mean square error in target units.
double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

/// Root mean square error normalized by the target standard deviation.
/// Throws ZeroVarianceError when the target series is constant.
double nrmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

struct BinomialScore {
  double success_rate = 0.0;
  double ci_halfwidth = 0.0;  // Agresti-Coull 95%
  long long successes = 0;
  long long trials = 0;
};

/// Agresti-Coull 95% interval half-width for `successes` out of `trials`.
double agresti_coull_halfwidth(long long successes, long long trials);

/// Threshold a bipolar prediction at zero (>= 0 counts as +1) against
/// +1/-1 targets.
BinomialScore threshold_score(const Eigen::VectorXd& prediction,
                              const Eigen::VectorXd& target);

/// Aggregate quality of a model on an evaluation set: mean NRMSE over columns
/// for narma (lower is better, returned negated so that larger is better),
/// mean thresholded success rate for parity.
double evaluate_model(const RidgeModel& model, const Eigen::MatrixXd& states,
                      const Eigen::MatrixXd& targets, tasks::TaskKind kind);

/// Pick the regularization from `grid` that maximizes evaluate_model on the
/// evaluation set; exact ties go to the larger gamma.
double select_gamma(const Eigen::MatrixXd& fit_states,
                    const Eigen::MatrixXd& fit_targets,
                    const Eigen::MatrixXd& eval_states,
                    const Eigen::MatrixXd& eval_targets, tasks::TaskKind kind,
                    const std::vector<double>& grid);

/// Spearman rank correlation (average ranks on ties).
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace neuroacc::learning
