#pragma once

#include "sdm/signal/trial.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdm {

enum class SplitRule { ClassBalanced, Grouped, TimeSequence };

std::string to_string(SplitRule rule);
SplitRule parse_split_rule(const std::string& text);

/// Fold id per sample; every fold is nonempty.
struct FoldAssignment {
  int folds = 0;
  std::vector<int> fold_of;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Split a set of `size` samples. Labels are needed for class-balanced splits
/// (without labels the samples are shuffled and dealt round-robin), groups for
/// grouped splits. Sample order is taken as temporal order.
///
/// class-balanced: per class in ascending id, members are shuffled and dealt
///   round-robin, continuing from the fold where the previous class stopped.
/// grouped: groups, largest first (ties by id), each go to the currently
///   smallest fold (ties by fold index). The seed is unused.
/// time-sequence: contiguous blocks, the first size % k blocks one longer.
///
/// Throws std::invalid_argument for k < 2, k > size, missing labels/groups
/// length, or k > number of groups under the grouped rule.
FoldAssignment make_folds(std::size_t size, std::span<const int> labels, std::span<const int> groups, int k,
                          SplitRule rule, std::uint64_t seed);

FoldAssignment make_folds(const Dataset& dataset, int k, SplitRule rule, std::uint64_t seed);

/// Derives independent stream seeds from a base seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

}  // namespace sdm
