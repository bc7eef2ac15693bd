#include "sdm/common/format.hpp"
#include "sdm/cv/nested.hpp"

#include <fstream>
#include <stdexcept>

namespace sdm {
namespace {

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ";" : "") + format_double(values[i]);
  return s;
}

}  // namespace

nlohmann::json to_json(const CvReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    nlohmann::json j = {{"repeat", f.repeat},
                        {"fold", f.fold},
                        {"rank", f.rank},
                        {"hyperparameters", f.hyperparameters},
                        {"inner_score", f.inner_score},
                        {"metric", f.metric},
                        {"test", f.test},
                        {"flags", f.flags}};
    if (report.task == "classify") {
      j["predicted"] = f.predicted;
      j["margins"] = f.margins;
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < f.predicted_targets.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(f.predicted_targets.cols()));
        for (Eigen::Index c = 0; c < f.predicted_targets.cols(); ++c) r[static_cast<std::size_t>(c)] = f.predicted_targets(i, c);
        rows.push_back(r);
      }
      j["predicted_targets"] = rows;
    }
    folds.push_back(std::move(j));
  }
  return {{"task", report.task},
          {"metric", report.metric == MetricKind::BalancedAccuracy ? "balanced-accuracy" : "mean-correlation"},
          {"model", report.model},
          {"config", report.config},
          {"ranks", report.ranks},
          {"mean", report.mean},
          {"stddev", report.stddev},
          {"repeat_means", report.repeat_means},
          {"assignments", report.assignments},
          {"folds", folds},
          {"notes", report.notes}};
}

void write_report(const CvReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  open_output(directory / "report.json") << to_json(report).dump(2) << '\n';

  auto folds = open_output(directory / "folds.csv");
  folds << "repeat,fold,rank,hyperparameters,inner_score,metric,test_size\n";
  for (const auto& f : report.folds)
    folds << f.repeat << ',' << f.fold << ',' << f.rank << ',' << join(f.hyperparameters) << ','
          << format_double(f.inner_score) << ',' << format_double(f.metric) << ',' << f.test.size() << '\n';

  auto preds = open_output(directory / "predictions.csv");
  if (report.task == "classify") {
    preds << "repeat,fold,trial,predicted,margin\n";
    for (const auto& f : report.folds)
      for (std::size_t i = 0; i < f.test.size(); ++i)
        preds << f.repeat << ',' << f.fold << ',' << f.test[i] << ',' << f.predicted[i] << ','
              << format_double(f.margins[i]) << '\n';
  } else {
    preds << "repeat,fold,trial,dimension,predicted\n";
    for (const auto& f : report.folds)
      for (std::size_t i = 0; i < f.test.size(); ++i)
        for (Eigen::Index d = 0; d < f.predicted_targets.cols(); ++d)
          preds << f.repeat << ',' << f.fold << ',' << f.test[i] << ',' << d << ','
                << format_double(f.predicted_targets(static_cast<Eigen::Index>(i), d)) << '\n';
  }

  const nlohmann::json timings = {{"features_seconds", report.timings.features_seconds},
                                  {"selection_seconds", report.timings.selection_seconds},
                                  {"refit_seconds", report.timings.refit_seconds}};
  open_output(directory / "timings.json") << timings.dump(2) << '\n';
}

}  // namespace sdm
