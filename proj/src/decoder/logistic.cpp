#include "sdm/decoder/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sdm {
namespace {

constexpr double kArmijoSigma = 0.01;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 40;
constexpr int kMaxInnerPasses = 50;

double log1pexp(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

struct BinaryFit {
  Eigen::VectorXd w;
  double b = 0.0;
  SolverStats stats;
};

// Minimum-norm subgradient violation of coordinate value v with gradient g;
// `penalized` adds the |v| term.
double violation_of(double v, double g, bool penalized) {
  if (!penalized) return std::abs(g);
  if (v > 0.0) return std::abs(g + 1.0);
  if (v < 0.0) return std::abs(g - 1.0);
  return std::max(0.0, std::abs(g) - 1.0);
}

// Minimizer offset of g d + h d^2 / 2 + |v + d| (or without the |.| term).
double newton_step(double v, double g, double h, bool penalized) {
  if (!penalized) return -g / h;
  if (g + 1.0 <= h * v) return -(g + 1.0) / h;
  if (g - 1.0 >= h * v) return -(g - 1.0) / h;
  return -v;
}

// y in {-1, +1}; coordinate d (== x.cols()) is the intercept. Each outer
// iteration builds the second-order model of the logistic loss at (w, b),
// minimizes model + L1 term by coordinate descent, then backtracks along the
// resulting direction.
BinaryFit solve_centred(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double cost, const SolverOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  BinaryFit fit;
  fit.w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd margin = Eigen::VectorXd::Zero(n);  // y_i (w^T x_i + b)
  Eigen::VectorXd weight(n), residual(n), xd(n), trial(n);
  Eigen::VectorXd grad(d + 1), delta(d + 1);

  auto column = [&](Eigen::Index j, Eigen::Index i) { return j == d ? 1.0 : x(i, j); };
  auto loss = [&](const Eigen::VectorXd& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += log1pexp(-m(i));
    return cost * s;
  };

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d + 1));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(options.seed);
  double initial = -1.0;
  double current = loss(margin);
  double previous = current;

  for (fit.stats.epochs = 1; fit.stats.epochs <= options.max_epochs; ++fit.stats.epochs) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double tau = 1.0 / (1.0 + std::exp(margin(i)));  // sigma(-margin)
      residual(i) = -cost * y(i) * tau;
      weight(i) = cost * tau * (1.0 - tau);
    }
    double violation = 0.0;
    for (Eigen::Index j = 0; j <= d; ++j) {
      double g = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) g += residual(i) * column(j, i);
      grad(j) = g;
      violation = std::max(violation, violation_of(j == d ? fit.b : fit.w(j), g, j != d));
    }
    if (initial < 0.0) initial = violation;
    fit.stats.final_violation = violation;
    if (violation <= options.tolerance * initial || violation == 0.0) {
      fit.stats.converged = true;
      break;
    }

    delta.setZero();
    xd.setZero();
    for (int pass = 0; pass < kMaxInnerPasses; ++pass) {
      std::shuffle(order.begin(), order.end(), rng);
      double inner = 0.0;
      for (const Eigen::Index j : order) {
        const bool penalized = j != d;
        double g = grad(j), h = 1e-12;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double xij = column(j, i);
          g += weight(i) * xij * xd(i);
          h += weight(i) * xij * xij;
        }
        const double v = (penalized ? fit.w(j) : fit.b) + delta(j);
        inner = std::max(inner, violation_of(v, g, penalized));
        const double step = newton_step(v, g, h, penalized);
        if (step == 0.0) continue;
        delta(j) += step;
        for (Eigen::Index i = 0; i < n; ++i) xd(i) += step * column(j, i);
      }
      if (inner <= 0.1 * violation) break;
    }

    double predicted = grad.dot(delta);
    predicted += (fit.w + delta.head(d)).lpNorm<1>() - fit.w.lpNorm<1>();
    const double l1 = fit.w.lpNorm<1>();
    double lambda = 1.0;
    bool moved = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) trial(i) = margin(i) + lambda * y(i) * xd(i);
      const double next = loss(trial);
      const double change = next - current + (fit.w + lambda * delta.head(d)).lpNorm<1>() - l1;
      if (change <= kArmijoSigma * lambda * predicted) {
        fit.w += lambda * delta.head(d);
        fit.b += lambda * delta(d);
        margin.swap(trial);
        current = next;
        moved = true;
        break;
      }
      lambda *= kBacktrack;
    }
    if (!moved) break;
    const double objective = current + fit.w.lpNorm<1>();
    if (previous - objective <= options.tolerance * std::abs(objective)) {
      fit.stats.converged = true;
      break;
    }
    previous = objective;
  }
  fit.stats.epochs = std::min(fit.stats.epochs, options.max_epochs);
  return fit;
}

// Centring the columns only reparametrizes the unpenalized intercept, and
// decouples it from features whose rows sum to a constant (as snDM rows do).
BinaryFit solve_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double cost, const SolverOptions& options) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  BinaryFit fit = solve_centred(x.rowwise() - mean, y, cost, options);
  fit.b -= mean.dot(fit.w);
  return fit;
}

}  // namespace

LinearModel train_l1_classifier(const Eigen::MatrixXd& x, const std::vector<int>& labels, double cost,
                                const SolverOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw std::invalid_argument("training rows do not match labels");
  if (!(cost > 0.0) || !std::isfinite(cost)) throw std::invalid_argument("logistic cost must be positive");
  LinearModel model;
  model.regularization = Regularization::L1Logistic;
  model.classes = distinct_classes(labels);
  if (model.classes.size() < 2) throw std::invalid_argument("classifier needs at least two classes");

  std::vector<std::pair<int, int>> outputs;
  if (model.classes.size() == 2) {
    model.scheme = MulticlassScheme::Binary;
    outputs.emplace_back(model.classes[0], model.classes[1]);
  } else {
    model.scheme = MulticlassScheme::OneVsRest;
    for (int c : model.classes) outputs.emplace_back(c, c);
  }
  model.weights.resize(x.cols(), static_cast<Eigen::Index>(outputs.size()));
  model.bias.resize(static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      y(i) = labels[static_cast<std::size_t>(i)] == outputs[k].first ? 1.0 : -1.0;
    const BinaryFit fit = solve_binary(x, y, cost, options);
    model.weights.col(static_cast<Eigen::Index>(k)) = fit.w;
    model.bias(static_cast<Eigen::Index>(k)) = fit.b;
    model.stats.push_back(fit.stats);
    model.hyperparameters.push_back(cost);
  }
  model.outputs_classes = std::move(outputs);
  return model;
}

Eigen::Index zero_weight_count(const LinearModel& model) {
  return (model.weights.array() == 0.0).count();
}

}  // namespace sdm
