#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sdm {

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;  // ln t at ln n = 0
  double r_squared = 0.0;
};

/// Least-squares line through (ln n, ln t). Needs >= 2 points with distinct
/// n; throws std::invalid_argument on a nonpositive n or t.
ExponentFit fit_exponent(std::span<const double> n_values, std::span<const double> times);

/// Monotonic seconds; replaceable for testing the harness.
using BenchClock = std::function<double()>;
double monotonic_seconds();

/// A train/predict workload sized by samples per class. prepare() runs
/// outside the timed region.
class BenchPipeline {
 public:
  virtual ~BenchPipeline() = default;
  virtual std::string name() const = 0;
  virtual void prepare(int per_class) = 0;
  virtual void train() = 0;
  /// One single-sample prediction; requires a prior train().
  virtual void predict() = 0;
};

struct BenchOptions {
  std::vector<int> n_values = {50, 100, 200, 400, 800};
  int repetitions = 5;
  double min_interval = 1e-3;  // shorter calls are timed in batches
  BenchClock clock = monotonic_seconds;
};

struct TimingSeries {
  std::string pipeline;
  std::vector<int> n_values;
  std::vector<double> train_seconds;    // median per n
  std::vector<double> predict_seconds;  // median per n
  ExponentFit train_fit;
  ExponentFit predict_fit;
  int repetitions = 0;
  std::vector<std::string> flags;
};

/// Median of `repetitions` timings per phase after one discarded warm-up
/// call. A call shorter than min_interval is repeated in a batch (doubling)
/// until the batch reaches it, and the per-call mean is used; that is flagged.
/// Throws std::invalid_argument for fewer than 2 n values, non-increasing n
/// or fewer than 3 repetitions.
TimingSeries run_scaling_benchmark(BenchPipeline& pipeline, const BenchOptions& options);

/// Synthetic data for the built-in pipelines. Features are extracted once for
/// max(n_values) trials per class, before any timing.
struct BenchDataOptions {
  int classes = 3;
  int max_per_class = 800;
  int channels = 6;
  int samples = 80;
  int rank = 6;
  double noise = 0.9;
  double cost = 1.0;
  std::uint64_t seed = 1;
};

struct BenchFeatures;

std::shared_ptr<const BenchFeatures> prepare_bench_features(const BenchDataOptions& options);

/// "kernel-l2": Gram matrix plus dual solve on projection kernels; prediction
/// evaluates the kernel against retained training trials.
/// "linear-l2": the same SVM on full sDM vectors.
/// "l1-sndm": L1 logistic classifier on snDM vectors.
std::vector<std::string> builtin_pipelines();
std::unique_ptr<BenchPipeline> make_pipeline(const std::string& name, std::shared_ptr<const BenchFeatures> features);

/// timings.csv (pipeline, n, phase, median_seconds) and exponents.csv
/// (pipeline, phase, exponent, intercept, r_squared).
void write_bench_csv(const std::vector<TimingSeries>& series, const std::filesystem::path& directory);

}  // namespace sdm
