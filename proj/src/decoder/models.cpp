#include "sdm/decoder/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdm {

std::string to_string(Regularization r) {
  switch (r) {
    case Regularization::L2Hinge: return "l2-hinge";
    case Regularization::L1Logistic: return "l1-logistic";
    case Regularization::L2Ridge: return "l2-ridge";
  }
  return "unknown";
}

std::string to_string(MulticlassScheme s) {
  switch (s) {
    case MulticlassScheme::Binary: return "binary";
    case MulticlassScheme::OneVsOne: return "one-vs-one";
    case MulticlassScheme::OneVsRest: return "one-vs-rest";
    case MulticlassScheme::Regression: return "regression";
  }
  return "unknown";
}

Regularization parse_regularization(const std::string& text) {
  for (auto r : {Regularization::L2Hinge, Regularization::L1Logistic, Regularization::L2Ridge})
    if (to_string(r) == text) return r;
  throw std::invalid_argument("unknown regularization: " + text);
}

MulticlassScheme parse_multiclass_scheme(const std::string& text) {
  for (auto s : {MulticlassScheme::Binary, MulticlassScheme::OneVsOne, MulticlassScheme::OneVsRest,
                 MulticlassScheme::Regression})
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown multiclass scheme: " + text);
}

Eigen::VectorXd LinearModel::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != weights.rows()) throw std::invalid_argument("feature length does not match model");
  return weights.transpose() * x + bias;
}

Eigen::MatrixXd LinearModel::decisions(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.rows()) throw std::invalid_argument("feature length does not match model");
  return (x * weights).rowwise() + bias.transpose();
}

Eigen::VectorXd KernelModel::decision(const Eigen::Ref<const Eigen::VectorXd>& retained_row) const {
  if (retained_row.size() != static_cast<Eigen::Index>(retained.size()))
    throw std::invalid_argument("kernel row does not match retained samples");
  Eigen::VectorXd out(static_cast<Eigen::Index>(machines.size()));
  for (std::size_t m = 0; m < machines.size(); ++m)
    out(static_cast<Eigen::Index>(m)) = machines[m].coef.dot(retained_row) + machines[m].bias;
  return out;
}

Eigen::VectorXd KernelModel::decision_from_training_row(const Eigen::Ref<const Eigen::VectorXd>& row) const {
  Eigen::VectorXd sub(static_cast<Eigen::Index>(retained.size()));
  for (std::size_t i = 0; i < retained.size(); ++i) {
    if (retained[i] >= row.size()) throw std::invalid_argument("kernel row shorter than training set");
    sub(static_cast<Eigen::Index>(i)) = row(retained[i]);
  }
  return decision(sub);
}

Eigen::MatrixXd stack_features(const std::vector<FeatureVector>& features) {
  if (features.empty()) return {};
  const Eigen::Index d = features.front().values.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), d);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != d) throw std::invalid_argument("feature vectors differ in length");
    x.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return x;
}

std::vector<int> distinct_classes(const std::vector<int>& labels) {
  std::vector<int> c(labels);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

int vote(const std::vector<int>& classes, const std::vector<std::pair<int, int>>& pairs,
         const Eigen::Ref<const Eigen::VectorXd>& decisions) {
  std::vector<int> votes(classes.size(), 0);
  auto slot = [&](int c) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), c) - classes.begin());
  };
  for (std::size_t p = 0; p < pairs.size(); ++p)
    ++votes[slot(decisions(static_cast<Eigen::Index>(p)) > 0.0 ? pairs[p].first : pairs[p].second)];
  const auto best = std::max_element(votes.begin(), votes.end());
  return classes[static_cast<std::size_t>(best - votes.begin())];
}

}  // namespace sdm
