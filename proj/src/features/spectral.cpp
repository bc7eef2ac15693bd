#include "sdm/features/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sdm {

Eigen::VectorXd hamming_window(Eigen::Index length) {
  Eigen::VectorXd w(length);
  if (length == 1) {
    w(0) = 1.0;
    return w;
  }
  for (Eigen::Index n = 0; n < length; ++n)
    w(n) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length - 1));
  return w;
}

PsdMatrix psd(const TrialMatrix& trial, int nfft) {
  if (nfft < 2 || nfft % 2 != 0) throw std::invalid_argument("nfft must be even and >= 2");
  const Eigen::Index seg = std::min<Eigen::Index>(trial.samples(), nfft);
  const Eigen::VectorXd w = hamming_window(seg);
  const double energy = w.squaredNorm();
  const int bins = nfft / 2 + 1;

  PsdMatrix out;
  out.nfft = nfft;
  out.values.resize(trial.channels(), bins);
  out.freqs.resize(bins);
  for (int k = 0; k < bins; ++k) out.freqs(k) = static_cast<double>(k) / (trial.dt() * nfft);

  Eigen::FFT<double> fft;
  std::vector<double> buffer(static_cast<std::size_t>(nfft));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index ch = 0; ch < trial.channels(); ++ch) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (Eigen::Index n = 0; n < seg; ++n) buffer[static_cast<std::size_t>(n)] = w(n) * trial.data()(ch, n);
    fft.fwd(spectrum, buffer);
    for (int k = 0; k < bins; ++k) {
      const double scale = (k == 0 || k == nfft / 2) ? 1.0 : 2.0;
      out.values(ch, k) = scale * std::norm(spectrum[static_cast<std::size_t>(k)]) / (nfft * energy);
    }
  }
  return out;
}

FeatureVector band_power(const PsdMatrix& spectrum, const Band& band) {
  const double nyquist = spectrum.freqs(spectrum.freqs.size() - 1);
  if (band.low < 0.0 || band.high > nyquist * (1.0 + 1e-12) || band.high < band.low)
    throw std::invalid_argument("band must lie inside [0, Nyquist]");
  std::vector<Eigen::Index> bins;
  for (Eigen::Index k = 0; k < spectrum.freqs.size(); ++k)
    if (spectrum.freqs(k) >= band.low && spectrum.freqs(k) <= band.high) bins.push_back(k);
  if (bins.empty()) throw std::invalid_argument("band contains no frequency bins");

  FeatureVector fv;
  fv.layout = fv.provenance.base = FeatureLayout::BandPower;
  fv.provenance.bands = {band};
  fv.values = Eigen::VectorXd::Zero(spectrum.values.rows());
  for (Eigen::Index k : bins) fv.values += spectrum.values.col(k);
  fv.values /= static_cast<double>(bins.size());
  return fv;
}

FeatureVector band_power_features(const TrialMatrix& trial, std::span<const Band> bands, int nfft) {
  const PsdMatrix spectrum = psd(trial, nfft);
  FeatureVector fv;
  fv.layout = fv.provenance.base = FeatureLayout::BandPower;
  fv.provenance.bands.assign(bands.begin(), bands.end());
  const Eigen::Index p = trial.channels();
  fv.values.resize(p * static_cast<Eigen::Index>(bands.size()));
  for (std::size_t b = 0; b < bands.size(); ++b)
    fv.values.segment(static_cast<Eigen::Index>(b) * p, p) = band_power(spectrum, bands[b]).values;
  return fv;
}

}  // namespace sdm
