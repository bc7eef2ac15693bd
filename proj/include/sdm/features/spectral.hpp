#pragma once

#include "sdm/features/sdm.hpp"
#include "sdm/signal/trial.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>

namespace sdm {

/// One-sided power spectrum per channel.
///
/// Convention: Hamming window over the first min(L, nfft) samples, zero
/// padded to nfft; bin k holds c_k |X_k|^2 / (nfft * sum w^2) with c_k = 2
/// except at DC and Nyquist. The bins then sum to sum (w x)^2 / sum w^2.
struct PsdMatrix {
  Eigen::MatrixXd values;  // P x (nfft/2 + 1)
  Eigen::VectorXd freqs;   // Hz, 0 .. 1/(2 dt)
  int nfft = 512;
  std::string window = "hamming";
};

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
Eigen::VectorXd hamming_window(Eigen::Index length);

/// nfft must be even and >= 2.
PsdMatrix psd(const TrialMatrix& trial, int nfft = 512);

/// Per-channel mean of the bins whose frequency lies in [low, high] (closed).
/// Throws std::invalid_argument when the band leaves [0, Nyquist] or holds no bin.
FeatureVector band_power(const PsdMatrix& spectrum, const Band& band);

/// band_power for each band, concatenated (layout BandPower).
FeatureVector band_power_features(const TrialMatrix& trial, std::span<const Band> bands, int nfft = 512);

}  // namespace sdm
