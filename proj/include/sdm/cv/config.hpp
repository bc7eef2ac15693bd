#pragma once

#include "sdm/cv/folds.hpp"
#include "sdm/decoder/models.hpp"
#include "sdm/features/sdm.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sdm {

std::vector<double> default_cost_grid();    // 1e-1 .. 1e8
std::vector<double> default_lambda_grid();  // 1e-8 .. 1e8
std::vector<int> default_rank_grid();       // 25 50 100 200 300 600 900

struct CvConfig {
  int outer_folds = 10;
  int outer_repeats = 1;
  int inner_folds = 10;
  int inner_repeats = 1;
  SplitRule split_rule = SplitRule::ClassBalanced;
  std::vector<double> cost_grid = default_cost_grid();
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<int> rank_grid = default_rank_grid();
  std::uint64_t seed = 1;
  bool oversample = true;  // balance classes inside every training set
  std::size_t workers = 0;  // 0: default_worker_count()

  /// Throws std::invalid_argument on folds < 2, repeats < 1, empty grids,
  /// cost or rank <= 0, or lambda < 0.
  void validate() const;
};

/// Unknown keys are rejected; missing keys keep their defaults.
CvConfig cv_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CvConfig& config);

enum class ClassifierKind { LinearL2, KernelL2, L1Logistic };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& text);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::LinearL2;
  SolverOptions solver;
};

/// Per-trial featurization used by the harness. Every step is a function of
/// one trial alone.
struct PipelineSpec {
  FeatureSpec features;   // layout BandPower switches to PSD band powers
  bool car = true;        // common-average reference each trial first
  int stack_factor = 0;   // 0: smallest h with h >= (L + 1) / (P + 1)
  int psd_nfft = 512;
};

nlohmann::json to_json(const PipelineSpec& spec);
PipelineSpec pipeline_spec_from_json(const nlohmann::json& j);

}  // namespace sdm
