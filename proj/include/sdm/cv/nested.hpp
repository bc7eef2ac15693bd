#pragma once

#include "sdm/cv/config.hpp"
#include "sdm/cv/feature_table.hpp"
#include "sdm/decoder/metrics.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sdm {

/// One model fit inside the harness. Inner fits carry their inner repeat and
/// fold; the outer refit has inner_repeat == inner_fold == -1. Indices refer
/// to dataset trials; `train` lists oversampled duplicates as repeats.
struct FitEvent {
  int repeat = 0;
  int outer_fold = 0;
  int inner_repeat = -1;
  int inner_fold = -1;
  std::vector<std::size_t> train;
  std::vector<std::size_t> evaluated;
};

/// Called once per (inner or outer) training set; calls are serialized.
using FitObserver = std::function<void(const FitEvent&)>;

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  int rank = 0;
  std::vector<double> hyperparameters;  // {cost}, or lambda per target dimension
  double inner_score = 0.0;             // mean inner balanced accuracy, or mean inner MSE
  double metric = 0.0;
  std::vector<std::size_t> test;
  std::vector<int> predicted;           // classification
  std::vector<double> margins;          // smallest |decision| per test trial
  Eigen::MatrixXd predicted_targets;    // regression, test x M
  std::vector<std::string> flags;
};

struct CvTimings {
  double features_seconds = 0.0;
  double selection_seconds = 0.0;  // summed over folds
  double refit_seconds = 0.0;
};

struct CvReport {
  std::string task;  // "classify" or "regress"
  MetricKind metric = MetricKind::BalancedAccuracy;
  std::string model;
  nlohmann::json config;
  std::vector<int> ranks;
  std::vector<std::vector<int>> assignments;  // per outer repeat: fold per trial
  std::vector<FoldResult> folds;              // repeat-major
  std::vector<double> repeat_means;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation of the per-fold metrics
  CvTimings timings;
  std::vector<std::string> notes;

  /// Per-fold metrics of one outer repeat, in fold order.
  std::vector<double> fold_metrics(int repeat) const;
};

/// Nested CV over precomputed features. Per outer fold the inner CV picks
/// (rank, cost) by mean inner balanced accuracy; ties go to the smaller rank,
/// then the smaller cost. Throws std::invalid_argument when the table, labels
/// and config are inconsistent.
CvReport nested_cv_classify(const FeatureTable& table, std::span<const int> labels, std::span<const int> groups,
                            const CvConfig& config, const ClassifierSpec& classifier,
                            const FitObserver& observer = {});

CvReport nested_cv_classify(const Dataset& dataset, const CvConfig& config, const PipelineSpec& pipeline,
                            const ClassifierSpec& classifier, const FitObserver& observer = {});

/// Ridge decoding. Per outer fold and rank, lambda is chosen per target
/// dimension by inner MSE (ties to the larger lambda); the rank with the lowest
/// mean chosen MSE wins (ties to the smaller rank). The outer metric is the
/// mean per-dimension correlation on the test fold.
CvReport nested_cv_regress(const FeatureTable& table, const Eigen::MatrixXd& targets, std::span<const int> groups,
                           const CvConfig& config, const FitObserver& observer = {});

CvReport nested_cv_regress(const Dataset& dataset, const CvConfig& config, const PipelineSpec& pipeline,
                           const FitObserver& observer = {});

/// Structured report without timings, so identical runs compare byte-equal.
nlohmann::json to_json(const CvReport& report);

/// Writes report.json, folds.csv, predictions.csv and timings.json.
void write_report(const CvReport& report, const std::filesystem::path& directory);

}  // namespace sdm
