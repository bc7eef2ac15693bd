#include "sdm/bench/bench.hpp"

#include "sdm/common/format.hpp"
#include "sdm/decoder/logistic.hpp"
#include "sdm/decoder/svm.hpp"
#include "sdm/dmd/dmd.hpp"
#include "sdm/features/sdm.hpp"
#include "sdm/signal/preprocess.hpp"
#include "sdm/signal/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sdm {

ExponentFit fit_exponent(std::span<const double> n_values, std::span<const double> times) {
  if (n_values.size() != times.size()) throw std::invalid_argument("n and time counts differ");
  if (n_values.size() < 2) throw std::invalid_argument("need at least two points");
  const auto m = static_cast<Eigen::Index>(n_values.size());
  Eigen::VectorXd x(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double n = n_values[static_cast<std::size_t>(i)];
    const double t = times[static_cast<std::size_t>(i)];
    if (!(n > 0.0) || !(t > 0.0)) throw std::invalid_argument("n and times must be positive");
    x(i) = std::log(n);
    y(i) = std::log(t);
  }
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (sxx == 0.0) throw std::invalid_argument("n values must not all be equal");
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  const double syy = (y.array() - my).square().sum();
  const double sse = (y.array() - fit.intercept - fit.exponent * x.array()).square().sum();
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

double monotonic_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Seconds per call, batching calls that finish under the minimum interval.
double time_call(const std::function<void()>& call, const BenchOptions& o, bool& batched) {
  long count = 1;
  while (true) {
    const double start = o.clock();
    for (long k = 0; k < count; ++k) call();
    const double elapsed = o.clock() - start;
    if (elapsed >= o.min_interval || count >= (1L << 24)) {
      if (count > 1) batched = true;
      return elapsed / static_cast<double>(count);
    }
    count *= 2;
  }
}

}  // namespace

TimingSeries run_scaling_benchmark(BenchPipeline& pipeline, const BenchOptions& o) {
  if (o.n_values.size() < 2) throw std::invalid_argument("need at least two n values");
  for (std::size_t i = 0; i < o.n_values.size(); ++i)
    if (o.n_values[i] < 1 || (i > 0 && o.n_values[i] <= o.n_values[i - 1]))
      throw std::invalid_argument("n values must be positive and strictly increasing");
  if (o.repetitions < 3) throw std::invalid_argument("need at least 3 repetitions");
  if (!o.clock) throw std::invalid_argument("benchmark clock is not set");

  TimingSeries s;
  s.pipeline = pipeline.name();
  s.n_values = o.n_values;
  s.repetitions = o.repetitions;
  bool batched = false;
  const std::function<void()> train = [&] { pipeline.train(); };
  const std::function<void()> predict = [&] { pipeline.predict(); };
  for (int n : o.n_values) {
    pipeline.prepare(n);
    std::vector<double> tt, tp;
    pipeline.train();  // warm-up
    for (int r = 0; r < o.repetitions; ++r) tt.push_back(time_call(train, o, batched));
    pipeline.predict();
    for (int r = 0; r < o.repetitions; ++r) tp.push_back(time_call(predict, o, batched));
    s.train_seconds.push_back(median(tt));
    s.predict_seconds.push_back(median(tp));
  }
  if (batched) s.flags.push_back("repetitions auto-increased for calls below the timer interval");
  const std::vector<double> n(o.n_values.begin(), o.n_values.end());
  s.train_fit = fit_exponent(n, s.train_seconds);
  s.predict_fit = fit_exponent(n, s.predict_seconds);
  return s;
}

struct BenchFeatures {
  BenchDataOptions options;
  std::vector<std::vector<std::size_t>> by_class;  // trial indices per class
  std::vector<int> labels;
  std::vector<Eigen::MatrixXcd> modes;
  Eigen::MatrixXd full;   // trials x P^2
  Eigen::MatrixXd sndm;   // trials x P
};

std::shared_ptr<const BenchFeatures> prepare_bench_features(const BenchDataOptions& o) {
  ClassDatasetOptions d;
  d.n_classes = o.classes;
  d.trials_per_class = o.max_per_class;
  d.channels = o.channels;
  d.samples = o.samples;
  d.noise = o.noise;
  d.seed = o.seed;
  const Dataset ds = generate_class_dataset(d);

  auto f = std::make_shared<BenchFeatures>();
  f->options = o;
  f->labels = *ds.labels;
  f->by_class.resize(static_cast<std::size_t>(o.classes));
  const auto n = static_cast<Eigen::Index>(ds.size());
  f->full.resize(n, static_cast<Eigen::Index>(o.channels) * o.channels);
  f->sndm.resize(n, o.channels);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    f->by_class[static_cast<std::size_t>(f->labels[i])].push_back(i);
    const DmdResult r = exact_dmd(hankel_stack(common_average_reference(ds.trials[i])), o.rank, ds.dt());
    f->modes.push_back(r.modes);
    const SdmFeatures s = sdm_features(r.modes);
    f->full.row(static_cast<Eigen::Index>(i)) = vectorize(s.matrix, FeatureLayout::FullVec).transpose();
    f->sndm.row(static_cast<Eigen::Index>(i)) = vectorize(s.matrix, FeatureLayout::SnDm).transpose();
  }
  return f;
}

namespace {

class SubsetPipeline : public BenchPipeline {
 public:
  SubsetPipeline(std::string name, std::shared_ptr<const BenchFeatures> f) : name_(std::move(name)), f_(std::move(f)) {}
  std::string name() const override { return name_; }
  void prepare(int per_class) override {
    if (per_class > f_->options.max_per_class) throw std::invalid_argument("n exceeds prepared trials per class");
    rows_.clear();
    labels_.clear();
    for (const auto& members : f_->by_class)
      for (int k = 0; k < per_class; ++k) {
        rows_.push_back(static_cast<Eigen::Index>(members[static_cast<std::size_t>(k)]));
        labels_.push_back(f_->labels[members[static_cast<std::size_t>(k)]]);
      }
    // The probe is the first trial after the training rows of class 0.
    probe_ = static_cast<Eigen::Index>(f_->by_class.front()[static_cast<std::size_t>(
        std::min(per_class, f_->options.max_per_class - 1))]);
    on_prepare();
  }

 protected:
  virtual void on_prepare() {}

  std::string name_;
  std::shared_ptr<const BenchFeatures> f_;
  std::vector<Eigen::Index> rows_;
  std::vector<int> labels_;
  Eigen::Index probe_ = 0;
};

class LinearPipeline : public SubsetPipeline {
 public:
  LinearPipeline(std::string name, std::shared_ptr<const BenchFeatures> f, bool l1)
      : SubsetPipeline(std::move(name), std::move(f)), l1_(l1) {}
  void train() override {
    model_ = l1_ ? train_l1_classifier(x_, labels_, f_->options.cost) : train_linear_l2svm(x_, labels_, f_->options.cost);
  }
  void predict() override { sink_ += predict_label(model_, probe_x_); }

 private:
  void on_prepare() override {
    const Eigen::MatrixXd& all = l1_ ? f_->sndm : f_->full;
    x_ = all(rows_, Eigen::all);
    probe_x_ = all.row(probe_).transpose();
  }
  bool l1_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd probe_x_;
  LinearModel model_;
  int sink_ = 0;
};

class KernelPipeline : public SubsetPipeline {
 public:
  using SubsetPipeline::SubsetPipeline;
  void train() override {
    const Eigen::MatrixXd gram = gram_matrix(sets_, 1);
    model_ = train_kernel_l2svm(gram, labels_, f_->options.cost);
    retained_.clear();
    for (auto i : model_.retained) retained_.push_back(sets_[static_cast<std::size_t>(i)]);
  }
  void predict() override {
    sink_ += predict_label(model_, kernel_row(f_->modes[static_cast<std::size_t>(probe_)], retained_));
  }

 private:
  void on_prepare() override {
    sets_.clear();
    for (auto r : rows_) sets_.push_back(f_->modes[static_cast<std::size_t>(r)]);
  }
  std::vector<Eigen::MatrixXcd> sets_;
  std::vector<Eigen::MatrixXcd> retained_;
  KernelModel model_;
  int sink_ = 0;
};

}  // namespace

std::vector<std::string> builtin_pipelines() { return {"kernel-l2", "linear-l2", "l1-sndm"}; }

std::unique_ptr<BenchPipeline> make_pipeline(const std::string& name, std::shared_ptr<const BenchFeatures> features) {
  if (name == "kernel-l2") return std::make_unique<KernelPipeline>(name, std::move(features));
  if (name == "linear-l2") return std::make_unique<LinearPipeline>(name, std::move(features), false);
  if (name == "l1-sndm") return std::make_unique<LinearPipeline>(name, std::move(features), true);
  throw std::invalid_argument("unknown pipeline: " + name);
}

void write_bench_csv(const std::vector<TimingSeries>& series, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::ofstream t(directory / "timings.csv");
  std::ofstream e(directory / "exponents.csv");
  if (!t || !e) throw std::runtime_error("cannot write benchmark output in " + directory.string());
  t << "pipeline,n,phase,median_seconds\n";
  e << "pipeline,phase,exponent,intercept,r_squared\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.n_values.size(); ++i) {
      t << s.pipeline << ',' << s.n_values[i] << ",train," << format_double(s.train_seconds[i]) << '\n';
      t << s.pipeline << ',' << s.n_values[i] << ",predict," << format_double(s.predict_seconds[i]) << '\n';
    }
    e << s.pipeline << ",train," << format_double(s.train_fit.exponent) << ',' << format_double(s.train_fit.intercept)
      << ',' << format_double(s.train_fit.r_squared) << '\n';
    e << s.pipeline << ",predict," << format_double(s.predict_fit.exponent) << ','
      << format_double(s.predict_fit.intercept) << ',' << format_double(s.predict_fit.r_squared) << '\n';
  }
}

}  // namespace sdm
