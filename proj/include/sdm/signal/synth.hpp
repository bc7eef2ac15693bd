#pragma once

#include "sdm/signal/trial.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sdm {

/// Sum of two standing oscillations on a line of observation points p:
///   sech(p + 3) * 0.25^t * sin(2 pi 13 t)  +  sech(p - 3) * 2^t * sin(2 pi 8 t)
/// sampled at t = k * dt for k = 0 .. round(duration / dt) - 1.
TrialMatrix generate_fig1_signal(double dt, double duration, std::span<const double> positions);

/// The canonical preset: dt = 1 ms, 0.5 s, positions -10 .. 10 in steps of 0.25.
TrialMatrix fig1_preset();

/// Parameters of the class-structured synthetic generator.
///
/// Class c adds a narrow sech-profile pattern centred on its own channel and
/// oscillating at its own frequency (spread `class_spacing_hz` around
/// `discriminative_hz`). A class-independent background wave of uniform
/// amplitude and white noise are shared by all trials.
struct ClassDatasetOptions {
  int n_classes = 3;
  int trials_per_class = 40;
  int channels = 16;
  int samples = 250;
  double dt = 1e-3;
  double noise = 0.9;
  std::uint64_t seed = 0;

  double discriminative_hz = 100.0;
  double class_spacing_hz = 10.0;
  double pattern_width = 0.5;  // in channels
  double signal_amplitude = 1.0;
  double background_hz = 10.0;
  double background_amplitude = 1.0;
};

Dataset generate_class_dataset(const ClassDatasetOptions& options);
Dataset generate_class_dataset(int n_classes, int trials_per_class, int channels, int samples,
                               double dt, std::uint64_t seed);

/// Channel index carrying the class-c pattern, one per class.
std::vector<int> class_centre_channels(const ClassDatasetOptions& options);

/// Per-class oscillation frequency in Hz.
std::vector<double> class_frequencies(const ClassDatasetOptions& options);

/// Regression stand-in. The channel line is split into `target_dims` equal
/// segments; in segment m a sech-profile source oscillating at
/// discriminative_hz + 20 m Hz sits at a random per-trial position, and target
/// m is that position scaled to [0, 1] plus `target_noise` Gaussian noise.
/// Groups are contiguous temporal blocks of trials.
struct RegressionDatasetOptions {
  int trials = 300;
  int target_dims = 2;
  int n_groups = 10;
  int channels = 16;
  int samples = 250;
  double dt = 1e-3;
  double noise = 0.3;
  double target_noise = 0.0;
  double pattern_width = 0.7;
  double discriminative_hz = 100.0;
  std::uint64_t seed = 0;
};

Dataset generate_regression_dataset(const RegressionDatasetOptions& options);

/// Returns a copy of `dataset` whose labels are a seeded permutation of the
/// originals (targets rows are permuted instead when labels are absent).
Dataset permute_labels(const Dataset& dataset, std::uint64_t seed);

}  // namespace sdm
