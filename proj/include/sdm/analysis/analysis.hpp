#pragma once

#include "sdm/features/sdm.hpp"
#include "sdm/features/spectral.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sdm {

/// One-way ANOVA per column of an N x D sample matrix.
///
/// F = (SSB / (G - 1)) / (SSW / (N - G)). A column with no within-group
/// spread but some between-group spread gets +infinity and is listed in
/// `infinite`; a column with no spread at all gets 0.
struct AnovaResult {
  Eigen::VectorXd f;
  int dof_between = 0;
  int dof_within = 0;
  std::vector<Eigen::Index> infinite;
};

/// Throws std::invalid_argument unless there are >= 2 groups with >= 2
/// samples each.
AnovaResult one_way_anova(const Eigen::MatrixXd& samples, std::span<const int> labels);

/// F statistic for every entry of the P x P sDM matrix (symmetric).
struct FMap {
  Eigen::MatrixXd values;
  int dof_between = 0;
  int dof_within = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> infinite;  // (row, col), row <= col
};

FMap anova_f_map(std::span<const SdmFeatures> features, std::span<const int> labels);

/// Mean pairwise Pearson correlation among same-class trials.
///
/// With z_transform each r is clipped to |r| <= 1 - 1e-12 and mapped through
/// atanh before averaging; `class_means` then lives in z space and
/// `class_back_transformed` holds tanh of it. Without it both are the raw means.
/// Pairs involving a constant vector are skipped and counted.
struct ReproducibilityReport {
  bool z_transformed = false;
  std::vector<int> classes;
  std::vector<double> class_means;
  std::vector<double> class_back_transformed;
  std::vector<std::size_t> pairs;
  std::vector<std::size_t> skipped;
  double overall = 0.0;  // mean of the class means over classes with pairs
  double overall_back_transformed = 0.0;
};

/// Rows of `features` are trials. Throws std::invalid_argument when no class
/// has two trials or the row count does not match the labels.
ReproducibilityReport reproducibility(const Eigen::MatrixXd& features, std::span<const int> labels,
                                      bool z_transform = false);
ReproducibilityReport reproducibility(std::span<const FeatureVector> features, std::span<const int> labels,
                                      bool z_transform = false);

/// Correlation between snDM and PSD values per frequency bin, computed over
/// all (channel, trial) entries. A bin where either side is constant gets 0
/// and is flagged.
struct PsdCorrelation {
  Eigen::VectorXd freqs;
  Eigen::VectorXd r;
  std::vector<bool> degenerate;

  /// Index of the largest r (first on ties).
  Eigen::Index peak() const;
};

/// sndm[t] has P entries; psd[t] is P x bins with shared frequencies.
PsdCorrelation sndm_psd_spectrum(std::span<const Eigen::VectorXd> sndm, std::span<const PsdMatrix> psd);

/// CSV with a header row of channel ids and one row per channel.
void write_f_map_csv(const FMap& map, const std::vector<std::string>& channel_ids,
                     const std::filesystem::path& file);
void write_psd_correlation_csv(const PsdCorrelation& spectrum, const std::filesystem::path& file);
void write_reproducibility_csv(const ReproducibilityReport& report, const std::filesystem::path& file);

}  // namespace sdm
