#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sdm {

/// Row indices after oversampling minority classes up to the majority count.
///
/// All original indices come first, in order. Then, per class in ascending id
/// order, whole extra repetitions of the class (in original order) and finally
/// a seeded draw without replacement for the remainder.
std::vector<std::size_t> oversample_indices(std::span<const int> labels, std::uint64_t seed);

std::pair<Eigen::MatrixXd, std::vector<int>> oversample_balance(const Eigen::MatrixXd& x,
                                                                std::span<const int> labels,
                                                                std::uint64_t seed);

}  // namespace sdm
