#include "sdm/decoder/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sdm {
namespace {

struct PairProblem {
  int positive;
  int negative;
  std::vector<Eigen::Index> rows;
  Eigen::VectorXd y;
};

std::vector<PairProblem> one_vs_one(const std::vector<int>& labels, const std::vector<int>& classes) {
  std::vector<PairProblem> out;
  for (std::size_t a = 0; a < classes.size(); ++a)
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      PairProblem p{classes[a], classes[b], {}, {}};
      std::vector<double> y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == p.positive || labels[i] == p.negative) {
          p.rows.push_back(static_cast<Eigen::Index>(i));
          y.push_back(labels[i] == p.positive ? 1.0 : -1.0);
        }
      }
      p.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
      out.push_back(std::move(p));
    }
  return out;
}

void check_inputs(Eigen::Index rows, const std::vector<int>& labels, double cost) {
  if (static_cast<std::size_t>(rows) != labels.size())
    throw std::invalid_argument("training rows do not match labels");
  if (!(cost > 0.0) || !std::isfinite(cost)) throw std::invalid_argument("SVM cost must be positive");
  if (distinct_classes(labels).size() < 2) throw std::invalid_argument("SVM needs at least two classes");
}

// Dual coordinate descent on 1/2 a^T Q a - 1^T a, 0 <= a <= C. `gradient(i)`
// returns (Q a)_i - 1, `apply(i, delta)` moves a_i by delta and `objective()`
// evaluates the dual. Both SVM paths drive this loop so they visit
// coordinates in the same order.
template <typename Gradient, typename Apply, typename Objective>
SolverStats dual_coordinate_descent(const Eigen::VectorXd& qdiag, double cost, const SolverOptions& options,
                                    Eigen::VectorXd& alpha, Gradient gradient, Apply apply, Objective objective) {
  const Eigen::Index n = qdiag.size();
  alpha = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(options.seed);

  SolverStats stats;
  double previous = 0.0;
  for (stats.epochs = 1; stats.epochs <= options.max_epochs; ++stats.epochs) {
    std::shuffle(order.begin(), order.end(), rng);
    double violation = 0.0;
    for (const Eigen::Index i : order) {
      const double g = gradient(i);
      double pg = g;
      if (alpha(i) <= 0.0) pg = std::min(g, 0.0);
      else if (alpha(i) >= cost) pg = std::max(g, 0.0);
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0 || qdiag(i) <= 0.0) continue;
      const double next = std::clamp(alpha(i) - g / qdiag(i), 0.0, cost);
      const double delta = next - alpha(i);
      if (delta != 0.0) {
        alpha(i) = next;
        apply(i, delta);
      }
    }
    stats.final_violation = violation;
    const double current = objective();
    if (violation <= options.tolerance || previous - current <= options.tolerance * std::abs(current)) {
      stats.converged = true;
      break;
    }
    previous = current;
  }
  stats.epochs = std::min(stats.epochs, options.max_epochs);
  return stats;
}

}  // namespace

LinearModel train_linear_l2svm(const Eigen::MatrixXd& x, const std::vector<int>& labels, double cost,
                               const SolverOptions& options) {
  check_inputs(x.rows(), labels, cost);
  LinearModel model;
  model.regularization = Regularization::L2Hinge;
  model.classes = distinct_classes(labels);
  model.scheme = model.classes.size() == 2 ? MulticlassScheme::Binary : MulticlassScheme::OneVsOne;
  const auto problems = one_vs_one(labels, model.classes);
  model.weights.resize(x.cols(), static_cast<Eigen::Index>(problems.size()));
  model.bias.resize(static_cast<Eigen::Index>(problems.size()));

  for (std::size_t p = 0; p < problems.size(); ++p) {
    const auto& prob = problems[p];
    const Eigen::Index n = static_cast<Eigen::Index>(prob.rows.size());
    Eigen::MatrixXd xt(x.cols(), n);  // samples as contiguous columns
    for (Eigen::Index i = 0; i < n; ++i) xt.col(i) = x.row(prob.rows[static_cast<std::size_t>(i)]).transpose();
    Eigen::VectorXd qdiag = xt.colwise().squaredNorm().transpose().array() + 1.0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double wb = 0.0;
    Eigen::VectorXd alpha;
    auto gradient = [&](Eigen::Index i) { return prob.y(i) * (w.dot(xt.col(i)) + wb) - 1.0; };
    auto apply = [&](Eigen::Index i, double delta) {
      w.noalias() += (delta * prob.y(i)) * xt.col(i);
      wb += delta * prob.y(i);
    };
    auto objective = [&] { return 0.5 * (w.squaredNorm() + wb * wb) - alpha.sum(); };
    model.stats.push_back(dual_coordinate_descent(qdiag, cost, options, alpha, gradient, apply, objective));
    model.weights.col(static_cast<Eigen::Index>(p)) = w;
    model.bias(static_cast<Eigen::Index>(p)) = wb;
    model.outputs_classes.emplace_back(prob.positive, prob.negative);
    model.hyperparameters.push_back(cost);
  }
  return model;
}

KernelModel train_kernel_l2svm(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double cost,
                               const SolverOptions& options) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument("kernel matrix must be square");
  check_inputs(gram.rows(), labels, cost);
  const double scale = std::max(gram.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("kernel matrix is not symmetric");

  KernelModel model;
  model.cost = cost;
  model.classes = distinct_classes(labels);
  const auto problems = one_vs_one(labels, model.classes);

  std::vector<Eigen::VectorXd> coefs;  // over problem rows
  for (const auto& prob : problems) {
    const Eigen::Index n = static_cast<Eigen::Index>(prob.rows.size());
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        q(i, j) = prob.y(i) * prob.y(j) *
                  (gram(prob.rows[static_cast<std::size_t>(i)], prob.rows[static_cast<std::size_t>(j)]) + 1.0);
    Eigen::VectorXd g = Eigen::VectorXd::Constant(n, -1.0);
    Eigen::VectorXd alpha;
    auto gradient = [&](Eigen::Index i) { return g(i); };
    auto apply = [&](Eigen::Index i, double delta) { g.noalias() += delta * q.col(i); };
    auto objective = [&] { return 0.5 * alpha.dot(g - Eigen::VectorXd::Ones(n)); };
    model.stats.push_back(dual_coordinate_descent(q.diagonal(), cost, options, alpha, gradient, apply, objective));
    coefs.push_back(alpha.cwiseProduct(prob.y));
  }

  std::vector<bool> used(labels.size(), false);
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t i = 0; i < problems[p].rows.size(); ++i)
      if (coefs[p](static_cast<Eigen::Index>(i)) != 0.0) used[static_cast<std::size_t>(problems[p].rows[i])] = true;
  std::vector<Eigen::Index> slot(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (used[i]) {
      slot[i] = static_cast<Eigen::Index>(model.retained.size());
      model.retained.push_back(static_cast<Eigen::Index>(i));
    }

  for (std::size_t p = 0; p < problems.size(); ++p) {
    BinaryKernelMachine m;
    m.positive = problems[p].positive;
    m.negative = problems[p].negative;
    m.coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.retained.size()));
    for (std::size_t i = 0; i < problems[p].rows.size(); ++i) {
      const double c = coefs[p](static_cast<Eigen::Index>(i));
      if (c != 0.0) m.coef(slot[static_cast<std::size_t>(problems[p].rows[i])]) = c;
    }
    m.bias = m.coef.sum();
    model.machines.push_back(std::move(m));
  }
  return model;
}

int predict_label(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd d = model.decision(x);
  switch (model.scheme) {
    case MulticlassScheme::Binary:
    case MulticlassScheme::OneVsOne:
      return vote(model.classes, model.outputs_classes, d);
    case MulticlassScheme::OneVsRest: {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < d.size(); ++k)
        if (d(k) > d(best)) best = k;
      return model.outputs_classes[static_cast<std::size_t>(best)].first;
    }
    case MulticlassScheme::Regression:
      break;
  }
  throw std::invalid_argument("regression models do not predict labels");
}

std::vector<int> predict_labels(const LinearModel& model, const Eigen::MatrixXd& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict_label(model, x.row(i).transpose());
  return out;
}

int predict_label(const KernelModel& model, const Eigen::Ref<const Eigen::VectorXd>& retained_row) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& m : model.machines) pairs.emplace_back(m.positive, m.negative);
  return vote(model.classes, pairs, model.decision(retained_row));
}

std::vector<int> predict_labels(const KernelModel& model, const Eigen::MatrixXd& rows) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& m : model.machines) pairs.emplace_back(m.positive, m.negative);
  std::vector<int> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out[static_cast<std::size_t>(i)] =
        vote(model.classes, pairs, model.decision_from_training_row(rows.row(i).transpose()));
  return out;
}

}  // namespace sdm
