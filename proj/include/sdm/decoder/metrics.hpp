#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace sdm {

enum class MetricKind { BalancedAccuracy, MeanCorrelation };

struct Metric {
  MetricKind kind = MetricKind::BalancedAccuracy;
  double value = 0.0;
  std::vector<std::string> flags;
};

/// Mean over the classes present in y_true of per-class recall. Predictions
/// outside the label set simply count as wrong.
Metric balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Pearson correlation per column, averaged. Needs at least 3 rows; a
/// zero-variance column contributes 0 and is flagged.
Metric mean_correlation(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred);

}  // namespace sdm
