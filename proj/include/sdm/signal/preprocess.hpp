#pragma once

#include "sdm/signal/trial.hpp"

namespace sdm {

/// Subtracts the across-channel mean at every sample. Requires P >= 2.
TrialMatrix common_average_reference(const TrialMatrix& trial);

/// Smallest integer h with h >= (L + 1) / (P + 1).
int choose_stack_factor(Eigen::Index channels, Eigen::Index samples);

/// Builds the h-fold delay-embedded snapshot pair, each hP x (L - h).
/// Throws std::invalid_argument when h < 1 or L <= h.
StackedPair hankel_stack(const TrialMatrix& trial, int h);

/// hankel_stack with h from choose_stack_factor.
StackedPair hankel_stack(const TrialMatrix& trial);

}  // namespace sdm
