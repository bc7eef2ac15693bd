#include "sdm/features/sdm.hpp"

#include "sdm/common/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdm {

std::vector<Band> canonical_bands() {
  return {{0, 1}, {1, 4}, {4, 8}, {8, 13}, {13, 30}, {30, 80}, {80, 150}, {150, 500}};
}

std::string to_string(FeatureLayout layout) {
  switch (layout) {
    case FeatureLayout::SnDm: return "sndm";
    case FeatureLayout::SeDm: return "sedm";
    case FeatureLayout::SnSeDm: return "sndm+sedm";
    case FeatureLayout::FullVec: return "sdm";
    case FeatureLayout::BandConcatenated: return "band-concatenated";
    case FeatureLayout::BandPower: return "band-power";
  }
  return "unknown";
}

FeatureLayout parse_feature_layout(const std::string& text) {
  for (auto l : {FeatureLayout::SnDm, FeatureLayout::SeDm, FeatureLayout::SnSeDm, FeatureLayout::FullVec,
                 FeatureLayout::BandConcatenated, FeatureLayout::BandPower})
    if (to_string(l) == text) return l;
  throw std::invalid_argument("unknown feature layout: " + text);
}

Eigen::Index feature_length(FeatureLayout base, Eigen::Index p, std::size_t bands) {
  const auto b = static_cast<Eigen::Index>(std::max<std::size_t>(bands, 1));
  switch (base) {
    case FeatureLayout::SnDm: return p * b;
    case FeatureLayout::SeDm: return p * (p - 1) / 2 * b;
    case FeatureLayout::SnSeDm: return p * (p + 1) / 2 * b;
    case FeatureLayout::FullVec: return p * p * b;
    case FeatureLayout::BandPower: return p * b;
    case FeatureLayout::BandConcatenated: break;
  }
  throw std::invalid_argument("band-concatenated is not a base layout");
}

double projection_kernel(const Eigen::MatrixXcd& phi_i, const Eigen::MatrixXcd& phi_j) {
  if (phi_i.rows() != phi_j.rows()) throw std::invalid_argument("mode sets differ in channel count");
  return (phi_i.adjoint() * phi_j).squaredNorm();
}

Eigen::MatrixXd gram_matrix(std::span<const Eigen::MatrixXcd> mode_sets, std::size_t workers) {
  const auto n = static_cast<Eigen::Index>(mode_sets.size());
  Eigen::MatrixXd g(n, n);
  if (n == 0) return g;
  for (const auto& m : mode_sets)
    if (m.rows() != mode_sets.front().rows())
      throw std::invalid_argument("mode sets differ in channel count");
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = projection_kernel(mode_sets[row], mode_sets[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  });
  return g;
}

Eigen::VectorXd kernel_row(const Eigen::MatrixXcd& probe, std::span<const Eigen::MatrixXcd> mode_sets) {
  Eigen::VectorXd row(static_cast<Eigen::Index>(mode_sets.size()));
  for (std::size_t j = 0; j < mode_sets.size(); ++j)
    row(static_cast<Eigen::Index>(j)) = projection_kernel(mode_sets[j], probe);
  return row;
}

SdmFeatures sdm_features(const Eigen::MatrixXcd& modes) {
  SdmFeatures out;
  out.source_rank = static_cast<int>(modes.cols());
  const Eigen::MatrixXcd m = modes * modes.adjoint();
  const Eigen::MatrixXd re = m.real();
  const double scale = re.size() ? re.cwiseAbs().maxCoeff() : 0.0;
  const double im = m.size() ? m.imag().cwiseAbs().maxCoeff() : 0.0;
  out.imaginary_residual = scale > 0.0 ? im / scale : im;
  out.matrix = 0.5 * (re + re.transpose());
  return out;
}

std::pair<FeatureVector, FeatureVector> split_sn_se(const SdmFeatures& f) {
  FeatureVector sn, se;
  sn.layout = sn.provenance.base = FeatureLayout::SnDm;
  se.layout = se.provenance.base = FeatureLayout::SeDm;
  sn.provenance.rank = se.provenance.rank = f.source_rank;
  if (f.band) sn.provenance.bands = se.provenance.bands = {*f.band};
  sn.values = vectorize(f.matrix, FeatureLayout::SnDm);
  se.values = vectorize(f.matrix, FeatureLayout::SeDm);
  return {std::move(sn), std::move(se)};
}

namespace {

void check_bands(std::span<const Band> bands) {
  std::vector<Band> sorted(bands.begin(), bands.end());
  for (const auto& b : sorted)
    if (!(b.low >= 0.0) || !(b.high > b.low)) throw std::invalid_argument("band needs 0 <= low < high");
  std::sort(sorted.begin(), sorted.end(), [](const Band& a, const Band& b) { return a.low < b.low; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].low < sorted[i - 1].high) throw std::invalid_argument("bands overlap");
}

bool in_band(double f, const Band& band, double nyquist) {
  const double af = std::abs(f);
  if (af >= band.low && af < band.high) return true;
  return band.high >= nyquist * (1.0 - 1e-12) && af == band.high;
}

}  // namespace

std::vector<SdmFeatures> frequency_filtered_sdm(const DmdResult& result, std::span<const Band> bands) {
  check_bands(bands);
  const double nyquist = result.dt > 0.0 ? 0.5 / result.dt : 0.0;
  std::vector<SdmFeatures> out;
  out.reserve(bands.size());
  for (const auto& band : bands) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < result.mode_count(); ++k)
      if (in_band(result.frequencies(k), band, nyquist)) cols.push_back(k);
    SdmFeatures f;
    if (cols.empty()) {
      f.matrix = Eigen::MatrixXd::Zero(result.channels(), result.channels());
    } else {
      Eigen::MatrixXcd subset(result.channels(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) subset.col(static_cast<Eigen::Index>(c)) = result.modes.col(cols[c]);
      f = sdm_features(subset);
    }
    f.source_rank = result.rank_used;
    f.band = band;
    out.push_back(std::move(f));
  }
  return out;
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& m, FeatureLayout layout, bool scale_edges) {
  const Eigen::Index p = m.rows();
  const double edge = scale_edges ? std::sqrt(2.0) : 1.0;
  Eigen::VectorXd v(feature_length(layout, p));
  Eigen::Index at = 0;
  switch (layout) {
    case FeatureLayout::SnDm:
      v = m.diagonal();
      break;
    case FeatureLayout::SnSeDm:
      v.head(p) = m.diagonal();
      at = p;
      [[fallthrough]];
    case FeatureLayout::SeDm:
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) v(at++) = edge * m(i, j);
      break;
    case FeatureLayout::FullVec:
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) v(at++) = m(i, j);
      break;
    default:
      throw std::invalid_argument("layout " + to_string(layout) + " is not an sDM layout");
  }
  return v;
}

FeatureVector featurize(const DmdResult& result, const FeatureSpec& spec, int trial) {
  FeatureVector fv;
  fv.provenance.trial = trial;
  fv.provenance.rank = result.rank_used;
  fv.provenance.base = spec.base;
  fv.provenance.bands = spec.bands;
  if (spec.bands.empty()) {
    fv.layout = spec.base;
    fv.values = vectorize(sdm_features(result.modes).matrix, spec.base, spec.scale_edges);
    return fv;
  }
  fv.layout = FeatureLayout::BandConcatenated;
  const auto per_band = frequency_filtered_sdm(result, spec.bands);
  const Eigen::Index len = feature_length(spec.base, result.channels());
  fv.values.resize(len * static_cast<Eigen::Index>(per_band.size()));
  for (std::size_t b = 0; b < per_band.size(); ++b)
    fv.values.segment(static_cast<Eigen::Index>(b) * len, len) =
        vectorize(per_band[b].matrix, spec.base, spec.scale_edges);
  return fv;
}

}  // namespace sdm
