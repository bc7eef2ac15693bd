#pragma once

#include "sdm/signal/trial.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace sdm {

/// Singular values above this fraction of the largest are treated as nonzero.
inline constexpr double kSvdRelativeTolerance = 1e-10;

/// Thin SVD of the (stacked) snapshot matrix X. Computing it once lets a rank
/// sweep reuse it: the truncation happens in exact_dmd.
struct SnapshotSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;  // descending, nonnegative
  Eigen::MatrixXd v;

  /// Number of singular values above kSvdRelativeTolerance * s(0).
  int numerical_rank() const;
};

SnapshotSvd snapshot_svd(const StackedPair& pair);

struct SvdTruncation {
  int requested_rank = 0;
  Eigen::VectorXd singular_values;
  int effective_rank = 0;
  bool clamped = false;  // requested rank exceeded min(rows, cols)
};

struct ModeSpectrum {
  double frequency_hz = 0.0;
  double growth_rate = 0.0;  // amplitude factor per second, |lambda|^(1/dt)
  bool degenerate = false;   // lambda == 0
};

/// Continuous-time reading of a discrete eigenvalue:
/// f = arg(lambda) / (2 pi dt) in (-1/(2dt), 1/(2dt)],  r = |lambda|^(1/dt).
ModeSpectrum eig_to_physics(std::complex<double> lambda, double dt);

/// Output of exact DMD on one trial.
///
/// Modes are the first P rows of the stacked exact modes, L2-normalized, in
/// descending |amplitude| order with conjugate partners adjacent (positive
/// frequency first). Amplitudes are rescaled by each mode's pre-normalization
/// norm, so modes.col(k) * amplitudes(k) equals the raw product.
struct DmdResult {
  Eigen::MatrixXcd modes;
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXd frequencies;
  Eigen::VectorXd growth_rates;
  Eigen::VectorXcd amplitudes;
  std::vector<bool> degenerate;
  int rank_used = 0;  // effective SVD rank K'
  double dt = 0.0;
  SvdTruncation truncation;
  std::vector<std::string> warnings;

  Eigen::Index mode_count() const { return modes.cols(); }
  Eigen::Index channels() const { return modes.rows(); }
  bool empty() const { return modes.cols() == 0; }
};

/// Exact DMD of a stacked snapshot pair truncated at `rank`.
///
/// Keeps min(K', P) modes; if that cut would separate a conjugate pair the
/// partner is kept too, so the mode set stays closed under conjugation.
/// Throws std::invalid_argument for rank < 1 or dt <= 0. An all-zero input
/// yields an empty result.
DmdResult exact_dmd(const StackedPair& pair, int rank, double dt);
DmdResult exact_dmd(const StackedPair& pair, const SnapshotSvd& svd, int rank, double dt);

/// Sum over modes of phi_k * lambda_k^(t/dt) * b_k at each time (seconds from
/// the first snapshot). Returns P x times.size().
Eigen::MatrixXcd reconstruct(const DmdResult& result, std::span<const double> times);

/// max |imag| / max |real| of a reconstruction (0 for an all-zero matrix).
double imaginary_residual(const Eigen::MatrixXcd& values);

/// Times k * dt for k = 0 .. samples - 1.
std::vector<double> sample_times(Eigen::Index samples, double dt);

}  // namespace sdm
