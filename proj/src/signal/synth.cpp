#include "sdm/signal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sdm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sech(double x) { return 1.0 / std::cosh(x); }

void require_positive(int value, const char* what) {
  if (value < 1) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

}  // namespace

TrialMatrix generate_fig1_signal(double dt, double duration, std::span<const double> positions) {
  if (!std::isfinite(dt) || !std::isfinite(duration))
    throw std::invalid_argument("dt and duration must be finite");
  if (dt <= 0.0 || duration <= 0.0) throw std::invalid_argument("dt and duration must be positive");
  if (positions.empty()) throw std::invalid_argument("positions must be nonempty");
  for (double p : positions)
    if (!std::isfinite(p)) throw std::invalid_argument("positions must be finite");

  const auto samples = static_cast<Eigen::Index>(std::llround(duration / dt));
  const auto channels = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd data(channels, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double decaying = std::pow(0.25, t) * std::sin(kTwoPi * 13.0 * t);
    const double growing = std::pow(2.0, t) * std::sin(kTwoPi * 8.0 * t);
    for (Eigen::Index c = 0; c < channels; ++c) {
      const double p = positions[static_cast<std::size_t>(c)];
      data(c, k) = sech(p + 3.0) * decaying + sech(p - 3.0) * growing;
    }
  }
  return TrialMatrix(std::move(data), dt);
}

TrialMatrix fig1_preset() {
  std::vector<double> positions;
  for (int i = 0; i <= 80; ++i) positions.push_back(-10.0 + 0.25 * i);
  return generate_fig1_signal(1e-3, 0.5, positions);
}

std::vector<int> class_centre_channels(const ClassDatasetOptions& o) {
  std::vector<int> centres;
  for (int c = 0; c < o.n_classes; ++c)
    centres.push_back(static_cast<int>(std::lround(static_cast<double>(c + 1) * o.channels /
                                                   (o.n_classes + 1))));
  for (int& c : centres) c = std::clamp(c, 0, o.channels - 1);
  return centres;
}

std::vector<double> class_frequencies(const ClassDatasetOptions& o) {
  std::vector<double> f;
  const double mid = 0.5 * (o.n_classes - 1);
  for (int c = 0; c < o.n_classes; ++c) f.push_back(o.discriminative_hz + (c - mid) * o.class_spacing_hz);
  return f;
}

Dataset generate_class_dataset(const ClassDatasetOptions& o) {
  require_positive(o.n_classes, "n_classes");
  require_positive(o.trials_per_class, "trials_per_class");
  require_positive(o.channels, "channels");
  if (o.samples < 2) throw std::invalid_argument("samples must be >= 2");
  if (!(o.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (o.noise < 0.0) throw std::invalid_argument("noise must be nonnegative");
  const double nyquist = 0.5 / o.dt;
  const auto freqs = class_frequencies(o);
  for (double f : freqs)
    if (f <= 0.0 || f >= nyquist) throw std::invalid_argument("class frequency outside (0, Nyquist)");

  const auto centres = class_centre_channels(o);
  const Eigen::Index p = o.channels;
  const Eigen::Index l = o.samples;

  // Noise-free template per class; trials differ only by additive noise.
  std::vector<Eigen::MatrixXd> templates;
  for (int c = 0; c < o.n_classes; ++c) {
    Eigen::MatrixXd m(p, l);
    for (Eigen::Index k = 0; k < l; ++k) {
      const double t = static_cast<double>(k) * o.dt;
      const double burst = o.signal_amplitude * std::sin(kTwoPi * freqs[c] * t + 0.25 * std::numbers::pi);
      for (Eigen::Index ch = 0; ch < p; ++ch) {
        const double phase = kTwoPi * static_cast<double>(ch) / static_cast<double>(p);
        m(ch, k) = sech((static_cast<double>(ch) - centres[c]) / o.pattern_width) * burst +
                   o.background_amplitude * std::sin(kTwoPi * o.background_hz * t - phase);
      }
    }
    templates.push_back(std::move(m));
  }

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset ds;
  ds.labels.emplace();
  const auto ids = default_channel_ids(p);
  for (int c = 0; c < o.n_classes; ++c) {
    for (int n = 0; n < o.trials_per_class; ++n) {
      Eigen::MatrixXd m = templates[c];
      if (o.noise > 0.0)
        for (Eigen::Index k = 0; k < l; ++k)
          for (Eigen::Index ch = 0; ch < p; ++ch) m(ch, k) += o.noise * gauss(rng);
      ds.trials.emplace_back(std::move(m), o.dt, ids);
      ds.labels->push_back(c);
    }
  }
  return ds;
}

Dataset generate_class_dataset(int n_classes, int trials_per_class, int channels, int samples,
                               double dt, std::uint64_t seed) {
  ClassDatasetOptions o;
  o.n_classes = n_classes;
  o.trials_per_class = trials_per_class;
  o.channels = channels;
  o.samples = samples;
  o.dt = dt;
  o.seed = seed;
  return generate_class_dataset(o);
}

Dataset generate_regression_dataset(const RegressionDatasetOptions& o) {
  require_positive(o.trials, "trials");
  require_positive(o.target_dims, "target_dims");
  require_positive(o.n_groups, "n_groups");
  if (o.channels < 3 * o.target_dims) throw std::invalid_argument("need >= 3 channels per target dim");
  if (o.samples < 2) throw std::invalid_argument("samples must be >= 2");
  const double top_hz = o.discriminative_hz + 20.0 * (o.target_dims - 1);
  if (top_hz >= 0.5 / o.dt) throw std::invalid_argument("source frequency above Nyquist");

  const Eigen::Index p = o.channels;
  const Eigen::Index l = o.samples;
  const int seg = o.channels / o.target_dims;

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Dataset ds;
  ds.targets = Eigen::MatrixXd(o.trials, o.target_dims);
  ds.groups.emplace();
  const auto ids = default_channel_ids(p);
  for (int n = 0; n < o.trials; ++n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, l);
    for (int d = 0; d < o.target_dims; ++d) {
      const double u = unit(rng);
      const double centre = d * seg + 0.5 + u * (seg - 2);
      const double f = o.discriminative_hz + 20.0 * d;
      for (Eigen::Index k = 0; k < l; ++k) {
        const double wave = std::sin(kTwoPi * f * static_cast<double>(k) * o.dt);
        for (Eigen::Index ch = 0; ch < p; ++ch)
          m(ch, k) += sech((static_cast<double>(ch) - centre) / o.pattern_width) * wave;
      }
      (*ds.targets)(n, d) = u + o.target_noise * gauss(rng);
    }
    if (o.noise > 0.0)
      for (Eigen::Index k = 0; k < l; ++k)
        for (Eigen::Index ch = 0; ch < p; ++ch) m(ch, k) += o.noise * gauss(rng);
    ds.trials.emplace_back(std::move(m), o.dt, ids);
    ds.groups->push_back(static_cast<int>(static_cast<long>(n) * o.n_groups / o.trials));
  }
  return ds;
}

Dataset permute_labels(const Dataset& dataset, std::uint64_t seed) {
  Dataset out = dataset;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  if (dataset.labels) {
    for (std::size_t i = 0; i < order.size(); ++i) (*out.labels)[i] = (*dataset.labels)[order[i]];
  } else if (dataset.targets) {
    for (std::size_t i = 0; i < order.size(); ++i)
      out.targets->row(static_cast<Eigen::Index>(i)) =
          dataset.targets->row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

}  // namespace sdm
