#include "sdm/decoder/metrics.hpp"

#include "sdm/common/stats.hpp"

#include <map>
#include <stdexcept>

namespace sdm {

Metric balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label vectors differ in length");
  if (y_true.empty()) throw std::invalid_argument("balanced accuracy needs at least one sample");
  std::map<int, std::pair<int, int>> per_class;  // class -> (hits, total)
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    auto& [hits, total] = per_class[y_true[i]];
    ++total;
    if (y_pred[i] == y_true[i]) ++hits;
  }
  double sum = 0.0;
  for (const auto& [c, ht] : per_class) sum += static_cast<double>(ht.first) / ht.second;
  return {MetricKind::BalancedAccuracy, sum / static_cast<double>(per_class.size()), {}};
}

Metric mean_correlation(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols())
    throw std::invalid_argument("target matrices differ in shape");
  if (y_true.rows() < 3) throw std::invalid_argument("mean correlation needs at least 3 samples");
  if (y_true.cols() < 1) throw std::invalid_argument("mean correlation needs at least one dimension");
  Metric m{MetricKind::MeanCorrelation, 0.0, {}};
  for (Eigen::Index d = 0; d < y_true.cols(); ++d) {
    bool degenerate = false;
    m.value += pearson(y_true.col(d), y_pred.col(d), &degenerate);
    if (degenerate) m.flags.push_back("zero-variance dimension " + std::to_string(d));
  }
  m.value /= static_cast<double>(y_true.cols());
  return m;
}

}  // namespace sdm
