#include "sdm/cv/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace sdm {
namespace {

std::vector<double> decades(int from, int to) {
  std::vector<double> out;
  for (int e = from; e <= to; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument(std::string("unknown ") + what + " key: " + key);
}

}  // namespace

std::vector<double> default_cost_grid() { return decades(-1, 8); }
std::vector<double> default_lambda_grid() { return decades(-8, 8); }
std::vector<int> default_rank_grid() { return {25, 50, 100, 200, 300, 600, 900}; }

void CvConfig::validate() const {
  if (outer_folds < 2 || inner_folds < 2) throw std::invalid_argument("fold counts must be at least 2");
  if (outer_repeats < 1 || inner_repeats < 1) throw std::invalid_argument("repeat counts must be at least 1");
  if (cost_grid.empty() || lambda_grid.empty() || rank_grid.empty())
    throw std::invalid_argument("hyperparameter grids must be nonempty");
  for (double c : cost_grid)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("cost grid values must be positive");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda grid values must be >= 0");
  for (int r : rank_grid)
    if (r <= 0) throw std::invalid_argument("rank grid values must be positive");
}

CvConfig cv_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"outer_folds", "outer_repeats", "inner_folds", "inner_repeats", "split_rule", "cost_grid",
                  "lambda_grid", "rank_grid", "seed", "oversample", "workers"},
                 "cv config");
  CvConfig c;
  c.outer_folds = j.value("outer_folds", c.outer_folds);
  c.outer_repeats = j.value("outer_repeats", c.outer_repeats);
  c.inner_folds = j.value("inner_folds", c.inner_folds);
  c.inner_repeats = j.value("inner_repeats", c.inner_repeats);
  if (j.contains("split_rule")) c.split_rule = parse_split_rule(j.at("split_rule").get<std::string>());
  c.cost_grid = j.value("cost_grid", c.cost_grid);
  c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
  c.rank_grid = j.value("rank_grid", c.rank_grid);
  c.seed = j.value("seed", c.seed);
  c.oversample = j.value("oversample", c.oversample);
  c.workers = j.value("workers", c.workers);
  c.validate();
  return c;
}

nlohmann::json to_json(const CvConfig& c) {
  return {{"outer_folds", c.outer_folds}, {"outer_repeats", c.outer_repeats}, {"inner_folds", c.inner_folds},
          {"inner_repeats", c.inner_repeats}, {"split_rule", to_string(c.split_rule)}, {"cost_grid", c.cost_grid},
          {"lambda_grid", c.lambda_grid}, {"rank_grid", c.rank_grid}, {"seed", c.seed},
          {"oversample", c.oversample}, {"workers", c.workers}};
}

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LinearL2: return "linear-l2";
    case ClassifierKind::KernelL2: return "kernel-l2";
    case ClassifierKind::L1Logistic: return "l1";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(const std::string& text) {
  for (auto k : {ClassifierKind::LinearL2, ClassifierKind::KernelL2, ClassifierKind::L1Logistic})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown classifier: " + text);
}

nlohmann::json to_json(const PipelineSpec& s) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : s.features.bands) bands.push_back({b.low, b.high});
  return {{"layout", to_string(s.features.base)}, {"bands", bands}, {"scale_edges", s.features.scale_edges},
          {"car", s.car}, {"stack_factor", s.stack_factor}, {"psd_nfft", s.psd_nfft}};
}

PipelineSpec pipeline_spec_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"layout", "bands", "scale_edges", "car", "stack_factor", "psd_nfft"}, "pipeline");
  PipelineSpec s;
  if (j.contains("layout")) s.features.base = parse_feature_layout(j.at("layout").get<std::string>());
  if (j.contains("bands"))
    for (const auto& b : j.at("bands")) s.features.bands.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  s.features.scale_edges = j.value("scale_edges", s.features.scale_edges);
  s.car = j.value("car", s.car);
  s.stack_factor = j.value("stack_factor", s.stack_factor);
  s.psd_nfft = j.value("psd_nfft", s.psd_nfft);
  return s;
}

}  // namespace sdm
