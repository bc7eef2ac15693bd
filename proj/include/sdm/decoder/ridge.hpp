#pragma once

#include "sdm/decoder/models.hpp"

#include <Eigen/Dense>

#include <span>

namespace sdm {

/// Ridge regression through one thin SVD of the (centred) design matrix, so a
/// whole lambda grid costs one factorization.
///
/// With an intercept, X and Y are centred and the bias is left unpenalized;
/// per target column m the weights minimize |X_c w - Y_c,m|^2 + lambda |w|^2.
/// lambda = 0 on rank-deficient data gives the minimum-norm solution.
class RidgePath {
 public:
  RidgePath(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool fit_intercept = true);

  /// D x M weights for a single lambda applied to all targets.
  Eigen::MatrixXd weights(double lambda) const;
  /// Weights for target column m only.
  Eigen::VectorXd weights(double lambda, Eigen::Index m) const;
  Eigen::VectorXd bias(const Eigen::MatrixXd& weights) const;

  /// True when some singular value is numerically zero.
  bool rank_deficient() const { return rank_deficient_; }

  /// Fitted model with one lambda per target column.
  LinearModel model(std::span<const double> lambdas) const;

 private:
  Eigen::MatrixXd v_;
  Eigen::VectorXd s_;
  Eigen::MatrixXd uty_;  // U^T Y_c
  Eigen::RowVectorXd x_mean_;
  Eigen::RowVectorXd y_mean_;
  double cutoff_ = 0.0;
  bool rank_deficient_ = false;
};

/// Throws std::invalid_argument for lambda < 0, N < 1 or mismatched rows.
LinearModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                      bool fit_intercept = true);
LinearModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::span<const double> lambdas,
                      bool fit_intercept = true);

}  // namespace sdm
