#include "sdm/analysis/analysis.hpp"

#include "sdm/common/format.hpp"
#include "sdm/common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace sdm {
namespace {

constexpr double kZClip = 1.0 - 1e-12;

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

}  // namespace

AnovaResult one_way_anova(const Eigen::MatrixXd& samples, std::span<const int> labels) {
  if (static_cast<std::size_t>(samples.rows()) != labels.size())
    throw std::invalid_argument("sample rows do not match labels");
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));
  if (groups.size() < 2) throw std::invalid_argument("ANOVA needs at least two groups");
  for (const auto& [g, idx] : groups)
    if (idx.size() < 2) throw std::invalid_argument("ANOVA needs at least two samples per group");

  const auto n = samples.rows();
  const auto g = static_cast<int>(groups.size());
  AnovaResult out;
  out.dof_between = g - 1;
  out.dof_within = static_cast<int>(n) - g;
  out.f.resize(samples.cols());
  const Eigen::RowVectorXd grand = samples.colwise().mean();
  for (Eigen::Index d = 0; d < samples.cols(); ++d) {
    double ssb = 0.0, ssw = 0.0;
    for (const auto& [label, idx] : groups) {
      double mean = 0.0;
      for (auto i : idx) mean += samples(i, d);
      mean /= static_cast<double>(idx.size());
      ssb += static_cast<double>(idx.size()) * (mean - grand(d)) * (mean - grand(d));
      for (auto i : idx) ssw += (samples(i, d) - mean) * (samples(i, d) - mean);
    }
    const double total = ssb + ssw;
    if (total == 0.0 || ssb <= 1e-14 * total) {
      out.f(d) = 0.0;
    } else if (ssw <= 1e-14 * total) {
      out.f(d) = std::numeric_limits<double>::infinity();
      out.infinite.push_back(d);
    } else {
      out.f(d) = (ssb / out.dof_between) / (ssw / out.dof_within);
    }
  }
  return out;
}

FMap anova_f_map(std::span<const SdmFeatures> features, std::span<const int> labels) {
  if (features.empty()) throw std::invalid_argument("no feature matrices");
  const Eigen::Index p = features.front().matrix.rows();
  const Eigen::Index d = p * (p + 1) / 2;
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(features.size()), d);
  for (std::size_t t = 0; t < features.size(); ++t) {
    const auto& m = features[t].matrix;
    if (m.rows() != p || m.cols() != p) throw std::invalid_argument("feature matrices differ in size");
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = i; j < p; ++j) samples(static_cast<Eigen::Index>(t), k++) = m(i, j);
  }
  const AnovaResult a = one_way_anova(samples, labels);
  FMap map;
  map.dof_between = a.dof_between;
  map.dof_within = a.dof_within;
  map.values.resize(p, p);
  Eigen::Index k = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> position;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i; j < p; ++j) {
      map.values(i, j) = map.values(j, i) = a.f(k++);
      position.emplace_back(i, j);
    }
  for (auto idx : a.infinite) map.infinite.push_back(position[static_cast<std::size_t>(idx)]);
  return map;
}

ReproducibilityReport reproducibility(const Eigen::MatrixXd& features, std::span<const int> labels,
                                      bool z_transform) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw std::invalid_argument("feature rows do not match labels");
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Eigen::Index>(i));

  ReproducibilityReport out;
  out.z_transformed = z_transform;
  double sum = 0.0;
  int counted = 0;
  bool any_pairs = false;
  for (const auto& [c, idx] : members) {
    double s = 0.0;
    std::size_t used = 0, skipped = 0;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        bool degenerate = false;
        double r = pearson(features.row(idx[a]).transpose(), features.row(idx[b]).transpose(), &degenerate);
        if (degenerate) {
          ++skipped;
          continue;
        }
        if (z_transform) r = std::atanh(std::clamp(r, -kZClip, kZClip));
        s += r;
        ++used;
      }
    if (idx.size() >= 2) any_pairs = true;
    const double mean = used ? s / static_cast<double>(used) : 0.0;
    out.classes.push_back(c);
    out.class_means.push_back(mean);
    out.class_back_transformed.push_back(z_transform ? std::tanh(mean) : mean);
    out.pairs.push_back(used);
    out.skipped.push_back(skipped);
    if (used) {
      sum += mean;
      ++counted;
    }
  }
  if (!any_pairs) throw std::invalid_argument("reproducibility needs a class with at least two trials");
  out.overall = counted ? sum / counted : 0.0;
  out.overall_back_transformed = z_transform ? std::tanh(out.overall) : out.overall;
  return out;
}

ReproducibilityReport reproducibility(std::span<const FeatureVector> features, std::span<const int> labels,
                                      bool z_transform) {
  if (features.empty()) throw std::invalid_argument("no feature vectors");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(features.size()), features.front().values.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != rows.cols()) throw std::invalid_argument("feature vectors differ in length");
    rows.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return reproducibility(rows, labels, z_transform);
}

Eigen::Index PsdCorrelation::peak() const {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < r.size(); ++k)
    if (r(k) > r(best)) best = k;
  return best;
}

PsdCorrelation sndm_psd_spectrum(std::span<const Eigen::VectorXd> sndm, std::span<const PsdMatrix> psd) {
  if (sndm.size() != psd.size()) throw std::invalid_argument("snDM and PSD trial counts differ");
  if (sndm.empty()) throw std::invalid_argument("no trials");
  const Eigen::Index p = sndm.front().size();
  const Eigen::Index bins = psd.front().values.cols();
  for (std::size_t t = 0; t < sndm.size(); ++t) {
    if (sndm[t].size() != p || psd[t].values.rows() != p)
      throw std::invalid_argument("channel counts differ between snDM and PSD");
    if (psd[t].values.cols() != bins) throw std::invalid_argument("PSD bin counts differ between trials");
  }
  const Eigen::Index n = p * static_cast<Eigen::Index>(sndm.size());
  Eigen::VectorXd x(n), y(n);
  for (std::size_t t = 0; t < sndm.size(); ++t) x.segment(static_cast<Eigen::Index>(t) * p, p) = sndm[t];

  PsdCorrelation out;
  out.freqs = psd.front().freqs;
  out.r.resize(bins);
  out.degenerate.assign(static_cast<std::size_t>(bins), false);
  for (Eigen::Index k = 0; k < bins; ++k) {
    for (std::size_t t = 0; t < psd.size(); ++t) y.segment(static_cast<Eigen::Index>(t) * p, p) = psd[t].values.col(k);
    bool degenerate = false;
    out.r(k) = pearson(x, y, &degenerate);
    out.degenerate[static_cast<std::size_t>(k)] = degenerate;
  }
  return out;
}

void write_f_map_csv(const FMap& map, const std::vector<std::string>& channel_ids,
                     const std::filesystem::path& file) {
  if (static_cast<Eigen::Index>(channel_ids.size()) != map.values.rows())
    throw std::invalid_argument("channel ids do not match F map");
  auto out = open_output(file);
  out << "channel";
  for (const auto& id : channel_ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < map.values.rows(); ++i) {
    out << channel_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < map.values.cols(); ++j) out << ',' << format_double(map.values(i, j));
    out << '\n';
  }
}

void write_psd_correlation_csv(const PsdCorrelation& spectrum, const std::filesystem::path& file) {
  auto out = open_output(file);
  out << "frequency_hz,r,degenerate\n";
  for (Eigen::Index k = 0; k < spectrum.r.size(); ++k)
    out << format_double(spectrum.freqs(k)) << ',' << format_double(spectrum.r(k)) << ','
        << (spectrum.degenerate[static_cast<std::size_t>(k)] ? 1 : 0) << '\n';
}

void write_reproducibility_csv(const ReproducibilityReport& report, const std::filesystem::path& file) {
  auto out = open_output(file);
  out << "class,mean,back_transformed,pairs,skipped\n";
  for (std::size_t c = 0; c < report.classes.size(); ++c)
    out << report.classes[c] << ',' << format_double(report.class_means[c]) << ','
        << format_double(report.class_back_transformed[c]) << ',' << report.pairs[c] << ',' << report.skipped[c]
        << '\n';
  out << "all," << format_double(report.overall) << ',' << format_double(report.overall_back_transformed) << ",,\n";
}

}  // namespace sdm
