#include "sdm/cv/nested.hpp"

#include "sdm/common/parallel.hpp"
#include "sdm/decoder/balance.hpp"
#include "sdm/decoder/logistic.hpp"
#include "sdm/decoder/ridge.hpp"
#include "sdm/decoder/svm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace sdm {
namespace {

using Clock = std::chrono::steady_clock;
using Index = Eigen::Index;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Index> to_index(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

template <typename T>
std::vector<T> take(std::span<const T> values, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  if (values.empty()) return out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

std::vector<std::size_t> remap(const std::vector<std::size_t>& positions, const std::vector<std::size_t>& base) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(base[p]);
  return out;
}

// Serializes observer calls from concurrent fold tasks.
class Notifier {
 public:
  explicit Notifier(const FitObserver& observer) : observer_(observer) {}
  void operator()(FitEvent event) {
    if (!observer_) return;
    std::lock_guard<std::mutex> lock(mutex_);
    observer_(event);
  }

 private:
  const FitObserver& observer_;
  std::mutex mutex_;
};

struct Prediction {
  std::vector<int> labels;
  std::vector<double> margins;
};

double smallest_magnitude(const Eigen::VectorXd& d) { return d.size() ? d.cwiseAbs().minCoeff() : 0.0; }

Prediction fit_predict(const FeatureTable& table, std::size_t r, const std::vector<std::size_t>& train,
                       std::span<const int> labels, const std::vector<std::size_t>& test, double cost,
                       const ClassifierSpec& spec) {
  const std::vector<int> y = take(labels, train);
  const std::vector<Index> tr = to_index(train);
  const std::vector<Index> te = to_index(test);
  Prediction out;
  if (spec.kind == ClassifierKind::KernelL2) {
    const Eigen::MatrixXd& gram = table.gram[r];
    const KernelModel model = train_kernel_l2svm(gram(tr, tr), y, cost, spec.solver);
    const Eigen::MatrixXd rows = gram(te, tr);
    out.labels = predict_labels(model, rows);
    for (Index i = 0; i < rows.rows(); ++i)
      out.margins.push_back(smallest_magnitude(model.decision_from_training_row(rows.row(i).transpose())));
    return out;
  }
  const Eigen::MatrixXd& design = table.design[r];
  const Eigen::MatrixXd xtrain = design(tr, Eigen::all);
  const LinearModel model = spec.kind == ClassifierKind::L1Logistic ? train_l1_classifier(xtrain, y, cost, spec.solver)
                                                                    : train_linear_l2svm(xtrain, y, cost, spec.solver);
  const Eigen::MatrixXd xtest = design(te, Eigen::all);
  out.labels = predict_labels(model, xtest);
  const Eigen::MatrixXd d = model.decisions(xtest);
  for (Index i = 0; i < d.rows(); ++i) out.margins.push_back(smallest_magnitude(d.row(i).transpose()));
  return out;
}

void finalize(CvReport& report, int repeats) {
  report.repeat_means.assign(static_cast<std::size_t>(repeats), 0.0);
  for (int r = 0; r < repeats; ++r) {
    const auto m = report.fold_metrics(r);
    double s = 0.0;
    for (double v : m) s += v;
    report.repeat_means[static_cast<std::size_t>(r)] = s / static_cast<double>(m.size());
  }
  double s = 0.0;
  for (double v : report.repeat_means) s += v;
  report.mean = s / static_cast<double>(repeats);
  double ss = 0.0;
  double mu = 0.0;
  for (const auto& f : report.folds) mu += f.metric;
  mu /= static_cast<double>(report.folds.size());
  for (const auto& f : report.folds) ss += (f.metric - mu) * (f.metric - mu);
  report.stddev = report.folds.size() > 1 ? std::sqrt(ss / static_cast<double>(report.folds.size() - 1)) : 0.0;
}

std::size_t worker_count(const CvConfig& config) {
  return config.workers > 0 ? config.workers : default_worker_count();
}

void check_table(const FeatureTable& table, std::size_t n, bool kernel) {
  if (table.ranks.empty()) throw std::invalid_argument("feature table has no ranks");
  if (kernel) {
    if (table.gram.size() != table.ranks.size()) throw std::invalid_argument("kernel classifier needs Gram matrices");
    for (const auto& g : table.gram)
      if (static_cast<std::size_t>(g.rows()) != n || g.rows() != g.cols())
        throw std::invalid_argument("Gram matrix does not match the number of trials");
  } else {
    if (table.design.size() != table.ranks.size()) throw std::invalid_argument("feature table has no design matrices");
    for (const auto& x : table.design)
      if (static_cast<std::size_t>(x.rows()) != n) throw std::invalid_argument("design rows do not match trials");
  }
}

struct OuterTask {
  int repeat;
  int fold;
};

}  // namespace

std::vector<double> CvReport::fold_metrics(int repeat) const {
  std::vector<double> out;
  for (const auto& f : folds)
    if (f.repeat == repeat) out.push_back(f.metric);
  return out;
}

CvReport nested_cv_classify(const FeatureTable& table, std::span<const int> labels, std::span<const int> groups,
                            const CvConfig& config, const ClassifierSpec& classifier, const FitObserver& observer) {
  config.validate();
  const std::size_t n = labels.size();
  const bool kernel = classifier.kind == ClassifierKind::KernelL2;
  check_table(table, n, kernel);
  if (distinct_classes({labels.begin(), labels.end()}).size() < 2)
    throw std::invalid_argument("classification needs at least two classes");
  if (config.split_rule == SplitRule::Grouped && groups.size() != n)
    throw std::invalid_argument("grouped split needs one group id per trial");

  CvReport report;
  report.task = "classify";
  report.metric = MetricKind::BalancedAccuracy;
  report.model = to_string(classifier.kind);
  report.config = to_json(config);
  report.ranks = table.ranks;
  report.notes = table.notes;

  std::vector<FoldAssignment> outer;
  std::vector<OuterTask> tasks;
  for (int r = 0; r < config.outer_repeats; ++r) {
    outer.push_back(make_folds(n, labels, groups, config.outer_folds, config.split_rule,
                               derive_seed(config.seed, {0, static_cast<std::uint64_t>(r)})));
    report.assignments.push_back(outer.back().fold_of);
    for (int f = 0; f < config.outer_folds; ++f) tasks.push_back({r, f});
  }

  std::vector<double> costs = config.cost_grid;
  std::sort(costs.begin(), costs.end());
  costs.erase(std::unique(costs.begin(), costs.end()), costs.end());

  Notifier notify(observer);
  std::vector<FoldResult> results(tasks.size());
  std::vector<double> select_time(tasks.size(), 0.0), refit_time(tasks.size(), 0.0);

  parallel_for(tasks.size(), worker_count(config), [&](std::size_t t) {
    const auto [rep, fold] = tasks[t];
    const auto urep = static_cast<std::uint64_t>(rep);
    const auto ufold = static_cast<std::uint64_t>(fold);
    const auto& assign = outer[static_cast<std::size_t>(rep)];
    const std::vector<std::size_t> train = assign.train_indices(fold);
    const std::vector<std::size_t> test = assign.test_indices(fold);
    const std::vector<int> train_labels = take(labels, train);
    const std::vector<int> train_groups = take(groups, train);

    const auto start = Clock::now();
    const std::size_t nr = table.ranks.size();
    std::vector<double> score(nr * costs.size(), 0.0);
    int evaluations = 0;
    for (int ir = 0; ir < config.inner_repeats; ++ir) {
      const auto inner = make_folds(train.size(), train_labels, train_groups, config.inner_folds, config.split_rule,
                                    derive_seed(config.seed, {1, urep, ufold, static_cast<std::uint64_t>(ir)}));
      for (int jf = 0; jf < config.inner_folds; ++jf) {
        const auto itrain = remap(inner.train_indices(jf), train);
        const auto itest = remap(inner.test_indices(jf), train);
        std::vector<std::size_t> fit_rows = itrain;
        if (config.oversample) {
          const auto y = take(labels, itrain);
          fit_rows = remap(oversample_indices(y, derive_seed(config.seed, {2, urep, ufold, static_cast<std::uint64_t>(ir),
                                                                           static_cast<std::uint64_t>(jf)})),
                           itrain);
        }
        notify({rep, fold, ir, jf, fit_rows, itest});
        const std::vector<int> truth = take(labels, itest);
        for (std::size_t r = 0; r < nr; ++r)
          for (std::size_t c = 0; c < costs.size(); ++c) {
            const Prediction p = fit_predict(table, r, fit_rows, labels, itest, costs[c], classifier);
            score[r * costs.size() + c] += balanced_accuracy(truth, p.labels).value;
          }
        ++evaluations;
      }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < score.size(); ++k)
      if (score[k] > score[best]) best = k;
    select_time[t] = seconds_since(start);

    const auto refit_start = Clock::now();
    FoldResult& out = results[t];
    out.repeat = rep;
    out.fold = fold;
    const std::size_t r = best / costs.size();
    out.rank = table.ranks[r];
    out.hyperparameters = {costs[best % costs.size()]};
    out.inner_score = score[best] / evaluations;
    std::vector<std::size_t> fit_rows = train;
    if (config.oversample)
      fit_rows = remap(oversample_indices(train_labels, derive_seed(config.seed, {3, urep, ufold})), train);
    notify({rep, fold, -1, -1, fit_rows, test});
    const Prediction p = fit_predict(table, r, fit_rows, labels, test, out.hyperparameters[0], classifier);
    out.test = test;
    out.predicted = p.labels;
    out.margins = p.margins;
    out.metric = balanced_accuracy(take(labels, test), p.labels).value;
    refit_time[t] = seconds_since(refit_start);
  });

  report.folds = std::move(results);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    report.timings.selection_seconds += select_time[t];
    report.timings.refit_seconds += refit_time[t];
  }
  finalize(report, config.outer_repeats);
  return report;
}

namespace {

// Builds every outer and inner split the run will use, so a split that cannot
// be made fails before features are extracted.
void check_splits(std::size_t n, std::span<const int> labels, std::span<const int> groups, const CvConfig& config) {
  for (int r = 0; r < config.outer_repeats; ++r) {
    const auto urep = static_cast<std::uint64_t>(r);
    const auto outer = make_folds(n, labels, groups, config.outer_folds, config.split_rule, derive_seed(config.seed, {0, urep}));
    for (int f = 0; f < config.outer_folds; ++f) {
      const auto train = outer.train_indices(f);
      const auto train_labels = take(labels, train);
      const auto train_groups = take(groups, train);
      for (int ir = 0; ir < config.inner_repeats; ++ir)
        make_folds(train.size(), train_labels, train_groups, config.inner_folds, config.split_rule,
                   derive_seed(config.seed, {1, urep, static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(ir)}));
    }
  }
}

}  // namespace

CvReport nested_cv_classify(const Dataset& dataset, const CvConfig& config, const PipelineSpec& pipeline,
                            const ClassifierSpec& classifier, const FitObserver& observer) {
  if (!dataset.labels) throw std::invalid_argument("classification needs labels");
  config.validate();
  check_splits(dataset.size(), *dataset.labels, dataset.groups ? std::span<const int>(*dataset.groups) : std::span<const int>(), config);
  const auto start = Clock::now();
  const FeatureTable table = build_feature_table(dataset, pipeline, config.rank_grid,
                                                 classifier.kind == ClassifierKind::KernelL2, worker_count(config));
  const double features_seconds = seconds_since(start);
  std::span<const int> groups;
  if (dataset.groups) groups = *dataset.groups;
  CvReport report = nested_cv_classify(table, *dataset.labels, groups, config, classifier, observer);
  report.timings.features_seconds = features_seconds;
  report.config = {{"cv", report.config}, {"pipeline", to_json(pipeline)}};
  return report;
}

CvReport nested_cv_regress(const FeatureTable& table, const Eigen::MatrixXd& targets, std::span<const int> groups,
                           const CvConfig& config, const FitObserver& observer) {
  config.validate();
  const auto n = static_cast<std::size_t>(targets.rows());
  check_table(table, n, false);
  if (targets.cols() < 1) throw std::invalid_argument("regression needs at least one target dimension");
  if (config.split_rule == SplitRule::Grouped && groups.size() != n)
    throw std::invalid_argument("grouped split needs one group id per trial");
  const auto m = static_cast<std::size_t>(targets.cols());

  CvReport report;
  report.task = "regress";
  report.metric = MetricKind::MeanCorrelation;
  report.model = "ridge";
  report.config = to_json(config);
  report.ranks = table.ranks;
  report.notes = table.notes;

  std::vector<double> lambdas = config.lambda_grid;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  std::vector<FoldAssignment> outer;
  std::vector<OuterTask> tasks;
  for (int r = 0; r < config.outer_repeats; ++r) {
    outer.push_back(make_folds(n, {}, groups, config.outer_folds, config.split_rule,
                               derive_seed(config.seed, {0, static_cast<std::uint64_t>(r)})));
    report.assignments.push_back(outer.back().fold_of);
    for (int f = 0; f < config.outer_folds; ++f) tasks.push_back({r, f});
  }

  Notifier notify(observer);
  std::vector<FoldResult> results(tasks.size());
  std::vector<double> select_time(tasks.size(), 0.0), refit_time(tasks.size(), 0.0);

  parallel_for(tasks.size(), worker_count(config), [&](std::size_t t) {
    const auto [rep, fold] = tasks[t];
    const auto urep = static_cast<std::uint64_t>(rep);
    const auto ufold = static_cast<std::uint64_t>(fold);
    const auto& assign = outer[static_cast<std::size_t>(rep)];
    const std::vector<std::size_t> train = assign.train_indices(fold);
    const std::vector<std::size_t> test = assign.test_indices(fold);
    const std::vector<int> train_groups = take(groups, train);

    const auto start = Clock::now();
    const std::size_t nr = table.ranks.size();
    // Summed squared error per (rank, lambda, target dimension).
    std::vector<Eigen::MatrixXd> sse(nr, Eigen::MatrixXd::Zero(static_cast<Index>(lambdas.size()), targets.cols()));
    std::size_t counted = 0;
    for (int ir = 0; ir < config.inner_repeats; ++ir) {
      const auto inner = make_folds(train.size(), {}, train_groups, config.inner_folds, config.split_rule,
                                    derive_seed(config.seed, {1, urep, ufold, static_cast<std::uint64_t>(ir)}));
      for (int jf = 0; jf < config.inner_folds; ++jf) {
        const auto itrain = to_index(remap(inner.train_indices(jf), train));
        const auto itest = to_index(remap(inner.test_indices(jf), train));
        notify({rep, fold, ir, jf, {itrain.begin(), itrain.end()}, {itest.begin(), itest.end()}});
        const Eigen::MatrixXd ytrain = targets(itrain, Eigen::all);
        const Eigen::MatrixXd ytest = targets(itest, Eigen::all);
        for (std::size_t r = 0; r < nr; ++r) {
          const RidgePath path(table.design[r](itrain, Eigen::all), ytrain);
          const Eigen::MatrixXd xtest = table.design[r](itest, Eigen::all);
          for (std::size_t l = 0; l < lambdas.size(); ++l) {
            const Eigen::MatrixXd w = path.weights(lambdas[l]);
            const Eigen::MatrixXd pred = (xtest * w).rowwise() + path.bias(w).transpose();
            sse[r].row(static_cast<Index>(l)) += (pred - ytest).colwise().squaredNorm();
          }
        }
        counted += itest.size();
      }
    }

    std::size_t best_rank = 0;
    std::vector<double> best_lambdas;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < nr; ++r) {
      std::vector<double> chosen(m);
      double total = 0.0;
      for (std::size_t d = 0; d < m; ++d) {
        std::size_t arg = 0;
        for (std::size_t l = 1; l < lambdas.size(); ++l)
          if (sse[r](static_cast<Index>(l), static_cast<Index>(d)) < sse[r](static_cast<Index>(arg), static_cast<Index>(d)))
            arg = l;
        chosen[d] = lambdas[arg];
        total += sse[r](static_cast<Index>(arg), static_cast<Index>(d)) / static_cast<double>(counted);
      }
      const double score = total / static_cast<double>(m);
      if (score < best_score) {
        best_score = score;
        best_rank = r;
        best_lambdas = chosen;
      }
    }
    select_time[t] = seconds_since(start);

    const auto refit_start = Clock::now();
    FoldResult& out = results[t];
    out.repeat = rep;
    out.fold = fold;
    out.rank = table.ranks[best_rank];
    out.hyperparameters = best_lambdas;
    out.inner_score = best_score;
    notify({rep, fold, -1, -1, train, test});
    const auto tr = to_index(train);
    const auto te = to_index(test);
    const RidgePath path(table.design[best_rank](tr, Eigen::all), targets(tr, Eigen::all));
    const LinearModel model = path.model(best_lambdas);
    out.test = test;
    out.predicted_targets = model.decisions(table.design[best_rank](te, Eigen::all));
    const Metric metric = mean_correlation(targets(te, Eigen::all), out.predicted_targets);
    out.metric = metric.value;
    out.flags = metric.flags;
    refit_time[t] = seconds_since(refit_start);
  });

  report.folds = std::move(results);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    report.timings.selection_seconds += select_time[t];
    report.timings.refit_seconds += refit_time[t];
  }
  finalize(report, config.outer_repeats);
  return report;
}

CvReport nested_cv_regress(const Dataset& dataset, const CvConfig& config, const PipelineSpec& pipeline,
                           const FitObserver& observer) {
  if (!dataset.targets) throw std::invalid_argument("regression needs targets");
  config.validate();
  check_splits(dataset.size(), {}, dataset.groups ? std::span<const int>(*dataset.groups) : std::span<const int>(), config);
  const auto start = Clock::now();
  const FeatureTable table = build_feature_table(dataset, pipeline, config.rank_grid, false, worker_count(config));
  const double features_seconds = seconds_since(start);
  std::span<const int> groups;
  if (dataset.groups) groups = *dataset.groups;
  CvReport report = nested_cv_regress(table, *dataset.targets, groups, config, observer);
  report.timings.features_seconds = features_seconds;
  report.config = {{"cv", report.config}, {"pipeline", to_json(pipeline)}};
  return report;
}

}  // namespace sdm
