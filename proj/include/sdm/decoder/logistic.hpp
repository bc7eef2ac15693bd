#pragma once

#include "sdm/decoder/models.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sdm {

/// L1-regularized logistic regression,
///
///   min_{w,b} |w|_1 + C sum_i log(1 + exp(-y_i (w^T x_i + b))),
///
/// with an unpenalized intercept. Each Newton iteration minimizes the
/// quadratic model plus the L1 term by coordinate descent and backtracks along
/// the result (Armijo). Exact zeros in w come from the soft-threshold step.
/// Stops when the largest KKT violation falls to `tolerance` times the first
/// one, or when an iteration lowers the objective by less than `tolerance`
/// relative to its value. Two classes train one
/// model; more classes train one-vs-rest and predict by the largest decision.
LinearModel train_l1_classifier(const Eigen::MatrixXd& x, const std::vector<int>& labels, double cost,
                                const SolverOptions& options = {});

/// Count of exactly-zero weights.
Eigen::Index zero_weight_count(const LinearModel& model);

}  // namespace sdm
