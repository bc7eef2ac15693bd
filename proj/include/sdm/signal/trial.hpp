#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sdm {

/// One trial: P channels by L samples, sampled every dt seconds.
///
/// Construction validates the invariants (P >= 1, L >= 2, dt > 0, all entries
/// finite) and throws std::invalid_argument otherwise, so every TrialMatrix in
/// circulation is well formed. Instances are immutable.
class TrialMatrix {
 public:
  TrialMatrix(Eigen::MatrixXd data, double dt, std::vector<std::string> channel_ids = {});

  const Eigen::MatrixXd& data() const { return data_; }
  double dt() const { return dt_; }
  Eigen::Index channels() const { return data_.rows(); }
  Eigen::Index samples() const { return data_.cols(); }
  const std::vector<std::string>& channel_ids() const { return channel_ids_; }

 private:
  Eigen::MatrixXd data_;
  double dt_;
  std::vector<std::string> channel_ids_;
};

/// Delay-embedded snapshot pair. Block row i of `x` holds samples
/// i .. i+L-h-1 of the trial; `xp` is the same window advanced by one sample.
struct StackedPair {
  Eigen::MatrixXd x;
  Eigen::MatrixXd xp;
  int h = 1;
  Eigen::Index channels = 0;  // P, so x.rows() == h * channels
};

/// Ordered trial collection plus decoding metadata.
///
/// `targets` is N x M (one row per trial). `groups` carries either source
/// groups (grouped splits) or a temporal block id.
struct Dataset {
  std::vector<TrialMatrix> trials;
  std::optional<std::vector<int>> labels;
  std::optional<Eigen::MatrixXd> targets;
  std::optional<std::vector<int>> groups;

  std::size_t size() const { return trials.size(); }
  Eigen::Index channels() const;
  double dt() const;

  /// Throws std::invalid_argument unless all trials share P and dt and every
  /// metadata column has one entry per trial.
  void validate() const;
};

/// Channel labels "ch0", "ch1", ...
std::vector<std::string> default_channel_ids(Eigen::Index count);

}  // namespace sdm
