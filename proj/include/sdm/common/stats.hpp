#pragma once

#include <Eigen/Dense>

namespace sdm {

/// Pearson correlation of two equal-length vectors. When either side has zero
/// variance the result is 0 and `degenerate` (if given) is set.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
               bool* degenerate = nullptr);

}  // namespace sdm
