#pragma once

#include "sdm/dmd/dmd.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sdm {

/// Half-open frequency interval [low, high) in Hz. A band whose upper edge
/// reaches the Nyquist frequency also includes it.
struct Band {
  double low = 0.0;
  double high = 0.0;

  friend bool operator==(const Band&, const Band&) = default;
};

/// The eight conventional bands: 0-1, 1-4, 4-8, 8-13, 13-30, 30-80, 80-150
/// and 150-500 Hz.
std::vector<Band> canonical_bands();

enum class FeatureLayout {
  SnDm,              // diagonal, length P
  SeDm,              // strict upper triangle, row-major, length P(P-1)/2
  SnSeDm,            // diagonal then strict upper triangle, length P(P+1)/2
  FullVec,           // row-major P x P, length P^2
  BandConcatenated,  // base layout repeated per band
  BandPower,         // per-channel mean PSD per band, length P * bands
};

std::string to_string(FeatureLayout layout);
FeatureLayout parse_feature_layout(const std::string& text);

/// Length of a feature vector for P channels; `bands` multiplies it.
Eigen::Index feature_length(FeatureLayout base, Eigen::Index channels, std::size_t bands = 1);

struct FeatureProvenance {
  int trial = -1;
  int rank = 0;
  FeatureLayout base = FeatureLayout::FullVec;
  std::vector<Band> bands;
};

struct FeatureVector {
  Eigen::VectorXd values;
  FeatureLayout layout = FeatureLayout::FullVec;
  FeatureProvenance provenance;
};

/// Real symmetric P x P matrix Phi Phi^dagger.
struct SdmFeatures {
  Eigen::MatrixXd matrix;
  int source_rank = 0;
  std::optional<Band> band;
  double imaginary_residual = 0.0;  // max |Im| / max |Re| before it was discarded
};

/// ||Phi_i^dagger Phi_j||_F^2. Throws std::invalid_argument when the row
/// counts differ.
double projection_kernel(const Eigen::MatrixXcd& phi_i, const Eigen::MatrixXcd& phi_j);

/// Pairwise projection kernels, each unordered pair evaluated once.
Eigen::MatrixXd gram_matrix(std::span<const Eigen::MatrixXcd> mode_sets, std::size_t workers = 1);

/// Kernel values of `probe` against every mode set (one Gram row).
Eigen::VectorXd kernel_row(const Eigen::MatrixXcd& probe, std::span<const Eigen::MatrixXcd> mode_sets);

/// Re(Phi Phi^dagger), symmetrized as (M + M^T) / 2.
SdmFeatures sdm_features(const Eigen::MatrixXcd& modes);

/// Diagonal (snDM) and strict upper triangle in row-major order (seDM).
std::pair<FeatureVector, FeatureVector> split_sn_se(const SdmFeatures& features);

/// One sDM matrix per band, built from the modes with |f_k| in the band;
/// a band without modes yields a zero matrix. Throws std::invalid_argument
/// for empty, negative or overlapping bands.
std::vector<SdmFeatures> frequency_filtered_sdm(const DmdResult& result, std::span<const Band> bands);

/// Flattens an sDM matrix into `layout` (SnDm, SeDm, SnSeDm or FullVec).
/// With scale_edges, off-diagonal entries in SeDm/SnSeDm are multiplied by
/// sqrt(2) so that dot products equal those of the full vectorization.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& sdm, FeatureLayout layout, bool scale_edges = false);

/// What to extract from one trial's DMD result.
struct FeatureSpec {
  FeatureLayout base = FeatureLayout::SnDm;
  std::vector<Band> bands;  // empty: unfiltered
  bool scale_edges = false;
};

/// Builds the feature vector for one DMD result. With bands, the per-band
/// vectors are concatenated in band order (layout BandConcatenated).
FeatureVector featurize(const DmdResult& result, const FeatureSpec& spec, int trial = -1);

}  // namespace sdm
