#pragma once

#include "sdm/features/sdm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sdm {

enum class Regularization { L2Hinge, L1Logistic, L2Ridge };
enum class MulticlassScheme { Binary, OneVsOne, OneVsRest, Regression };

std::string to_string(Regularization r);
std::string to_string(MulticlassScheme s);
Regularization parse_regularization(const std::string& text);
MulticlassScheme parse_multiclass_scheme(const std::string& text);

/// Stopping rule shared by the iterative solvers: stop after an epoch that
/// lowers the objective by at most `tolerance` relative to its value, when the
/// optimality violation becomes negligible, or after `max_epochs`. Coordinates
/// are visited in a seeded random order.
struct SolverOptions {
  double tolerance = 1e-6;
  int max_epochs = 100000;
  std::uint64_t seed = 1;
};

struct SolverStats {
  int epochs = 0;
  bool converged = false;
  double final_violation = 0.0;
};

/// Linear decision functions w^T x + b, one column per output.
///
/// Outputs are class pairs (one-vs-one, positive = first), one class each
/// (one-vs-rest), a single pair (binary) or target dimensions (regression).
struct LinearModel {
  Regularization regularization = Regularization::L2Hinge;
  MulticlassScheme scheme = MulticlassScheme::Binary;
  std::vector<double> hyperparameters;  // C per output, or lambda per target dimension
  std::vector<int> classes;             // sorted class ids; empty for regression
  std::vector<std::pair<int, int>> outputs_classes;  // (positive, negative) per output
  Eigen::MatrixXd weights;              // D x outputs
  Eigen::VectorXd bias;                 // outputs
  FeatureProvenance provenance;
  std::vector<SolverStats> stats;
  std::vector<std::string> notes;

  Eigen::Index features() const { return weights.rows(); }
  Eigen::Index outputs() const { return weights.cols(); }

  /// Decision values (or regression predictions) for one sample.
  Eigen::VectorXd decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Row-wise decisions, N x outputs.
  Eigen::MatrixXd decisions(const Eigen::MatrixXd& x) const;
};

/// Binary kernel machine: decision = sum_n coef_n (k(x_n, x) + 1).
/// The constant 1 is the kernel of the augmented bias feature.
struct BinaryKernelMachine {
  int positive = 0;
  int negative = 0;
  Eigen::VectorXd coef;  // a_n = alpha_n y_n over KernelModel::retained
  double bias = 0.0;     // sum of coef
};

/// One-vs-one ensemble over a precomputed kernel.
struct KernelModel {
  double cost = 1.0;
  std::vector<int> classes;
  std::vector<Eigen::Index> retained;  // training positions with any nonzero coefficient
  std::vector<BinaryKernelMachine> machines;
  std::vector<SolverStats> stats;

  /// Decisions from kernel values against the retained training samples.
  Eigen::VectorXd decision(const Eigen::Ref<const Eigen::VectorXd>& retained_row) const;
  /// Decisions from a full kernel row against all training positions.
  Eigen::VectorXd decision_from_training_row(const Eigen::Ref<const Eigen::VectorXd>& training_row) const;
};

/// Stacks feature vectors as rows. Throws on length mismatch.
Eigen::MatrixXd stack_features(const std::vector<FeatureVector>& features);

/// Sorted distinct labels.
std::vector<int> distinct_classes(const std::vector<int>& labels);

/// One-vs-one vote over pair decisions (positive when > 0); ties go to the
/// smallest class id.
int vote(const std::vector<int>& classes, const std::vector<std::pair<int, int>>& pairs,
         const Eigen::Ref<const Eigen::VectorXd>& decisions);

}  // namespace sdm
