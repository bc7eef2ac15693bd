#pragma once

#include "sdm/decoder/models.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sdm {

/// Soft-margin hinge-loss SVM with an L2 penalty, solved in the dual by
/// coordinate descent:
///
///   min_w 1/2 |w|^2 + C sum_i max(0, 1 - y_i w^T [x_i; 1])
///
/// The bias is the weight of an appended constant feature and is therefore
/// penalized. Multiclass problems are split one-vs-one.
///
/// The kernel variant solves the identical dual with Q_ij = y_i y_j (K_ij + 1),
/// so when K = X X^T both return the same decision function up to rounding.
/// Throws std::invalid_argument for fewer than two classes or C <= 0.
LinearModel train_linear_l2svm(const Eigen::MatrixXd& x, const std::vector<int>& labels, double cost,
                               const SolverOptions& options = {});

/// K must be symmetric (relative tolerance 1e-10) and N x N.
KernelModel train_kernel_l2svm(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double cost,
                               const SolverOptions& options = {});

int predict_label(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
std::vector<int> predict_labels(const LinearModel& model, const Eigen::MatrixXd& x);

/// `rows` is test x training kernel values (columns in training order).
std::vector<int> predict_labels(const KernelModel& model, const Eigen::MatrixXd& rows);
int predict_label(const KernelModel& model, const Eigen::Ref<const Eigen::VectorXd>& retained_row);

}  // namespace sdm
