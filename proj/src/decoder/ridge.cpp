#include "sdm/decoder/ridge.hpp"

#include <cmath>
#include <stdexcept>

namespace sdm {

RidgePath::RidgePath(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool fit_intercept) {
  if (x.rows() < 1) throw std::invalid_argument("ridge needs at least one sample");
  if (x.rows() != y.rows()) throw std::invalid_argument("design and target rows differ");
  if (fit_intercept) {
    x_mean_ = x.colwise().mean();
    y_mean_ = y.colwise().mean();
  } else {
    x_mean_ = Eigen::RowVectorXd::Zero(x.cols());
    y_mean_ = Eigen::RowVectorXd::Zero(y.cols());
  }
  const Eigen::MatrixXd xc = x.rowwise() - x_mean_;
  const Eigen::MatrixXd yc = y.rowwise() - y_mean_;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  v_ = svd.matrixV();
  s_ = svd.singularValues();
  uty_ = svd.matrixU().transpose() * yc;
  const double top = s_.size() > 0 ? s_(0) : 0.0;
  cutoff_ = 1e-10 * top;
  for (Eigen::Index i = 0; i < s_.size(); ++i)
    if (s_(i) <= cutoff_) rank_deficient_ = true;
  if (s_.size() < x.cols()) rank_deficient_ = true;
}

Eigen::MatrixXd RidgePath::weights(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  Eigen::VectorXd f(s_.size());
  for (Eigen::Index i = 0; i < s_.size(); ++i)
    f(i) = s_(i) > cutoff_ ? s_(i) / (s_(i) * s_(i) + lambda) : 0.0;
  return v_ * (f.asDiagonal() * uty_);
}

Eigen::VectorXd RidgePath::weights(double lambda, Eigen::Index m) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  Eigen::VectorXd f(s_.size());
  for (Eigen::Index i = 0; i < s_.size(); ++i)
    f(i) = s_(i) > cutoff_ ? s_(i) / (s_(i) * s_(i) + lambda) : 0.0;
  return v_ * f.cwiseProduct(uty_.col(m));
}

Eigen::VectorXd RidgePath::bias(const Eigen::MatrixXd& weights) const {
  return (y_mean_ - x_mean_ * weights).transpose();
}

LinearModel RidgePath::model(std::span<const double> lambdas) const {
  if (static_cast<Eigen::Index>(lambdas.size()) != uty_.cols())
    throw std::invalid_argument("need one lambda per target dimension");
  LinearModel out;
  out.regularization = Regularization::L2Ridge;
  out.scheme = MulticlassScheme::Regression;
  out.hyperparameters.assign(lambdas.begin(), lambdas.end());
  out.weights.resize(v_.rows(), uty_.cols());
  for (Eigen::Index m = 0; m < uty_.cols(); ++m) out.weights.col(m) = weights(lambdas[static_cast<std::size_t>(m)], m);
  out.bias = bias(out.weights);
  if (rank_deficient_) out.notes.push_back("rank-deficient design; minimum-norm solution where lambda = 0");
  return out;
}

LinearModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda, bool fit_intercept) {
  const std::vector<double> lambdas(static_cast<std::size_t>(y.cols()), lambda);
  return ridge_fit(x, y, lambdas, fit_intercept);
}

LinearModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::span<const double> lambdas,
                      bool fit_intercept) {
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda must be >= 0");
  return RidgePath(x, y, fit_intercept).model(lambdas);
}

}  // namespace sdm
