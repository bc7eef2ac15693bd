#pragma once

#include "sdm/cv/config.hpp"
#include "sdm/dmd/dmd.hpp"
#include "sdm/signal/trial.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace sdm {

/// Snapshot pair for one trial after the pipeline's preprocessing.
StackedPair prepare_trial(const TrialMatrix& trial, const PipelineSpec& spec);

/// Upper bound on the SVD rank of a stacked trial: min(h P, L - h).
int max_stacked_rank(Eigen::Index channels, Eigen::Index samples, int stack_factor = 0);

/// Grid values above `max_rank` are replaced by it; result sorted and unique.
std::vector<int> clip_rank_grid(std::span<const int> grid, int max_rank);

/// Per-trial features for every rank in a grid, computed once per dataset.
/// Each trial is decomposed by one SVD shared across ranks.
struct FeatureTable {
  std::vector<int> ranks;
  std::vector<Eigen::MatrixXd> design;  // per rank, N x D (linear classifiers and ridge)
  std::vector<Eigen::MatrixXd> gram;    // per rank, N x N projection kernels (kernel SVM)
  std::vector<std::string> notes;

  std::size_t rank_count() const { return ranks.size(); }
};

/// With `kernel`, fills `gram` instead of `design`. The band-power layout has
/// no rank and yields the single rank 0.
FeatureTable build_feature_table(const Dataset& dataset, const PipelineSpec& spec, std::span<const int> rank_grid,
                                 bool kernel, std::size_t workers = 1);

}  // namespace sdm
