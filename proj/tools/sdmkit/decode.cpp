#include "common.hpp"

#include "sdm/cv/nested.hpp"
#include "sdm/signal/dataset_io.hpp"
#include "sdm/signal/synth.hpp"

#include <cstdio>
#include <iostream>
#include <memory>

namespace sdmkit {
namespace {

struct DecodeArgs {
  std::string data;
  std::string out;
  std::string config;
  std::string classifier = "linear-l2";
  std::string features = "sdm";
  std::string bands;
  bool canonical_bands = false;
  bool scale_edges = false;
  bool no_car = false;
  int stack_factor = 0;
  bool regress = false;
  bool permute = false;
  std::uint64_t seed = 1;
  int outer_folds = 10;
  int outer_repeats = 1;
  int inner_folds = 10;
  int inner_repeats = 1;
  std::string split;
  std::string ranks;
  std::string costs;
  std::string lambdas;
  bool no_oversample = false;
  std::size_t workers = 0;
};

struct DecodeOptions {
  CLI::Option* classifier = nullptr;
  CLI::Option* features = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* outer_folds = nullptr;
  CLI::Option* outer_repeats = nullptr;
  CLI::Option* inner_folds = nullptr;
  CLI::Option* inner_repeats = nullptr;
  CLI::Option* stack_factor = nullptr;
  CLI::Option* workers = nullptr;
};

const std::vector<std::string> kConfigKeys = {"schema_version", "command",  "data",           "classifier",
                                              "features",       "regress",  "permute_labels", "cv",
                                              "pipeline"};

void run_decode(DecodeArgs a, const DecodeOptions& opt) {
  sdm::CvConfig cv;
  sdm::PipelineSpec pipeline;
  bool pipeline_from_file = false;
  if (!a.config.empty()) {
    const auto j = read_run_config(a.config, kConfigKeys);
    if (j.contains("command") && j.at("command") != "decode") throw UsageError("config is not a decode config");
    try {
      if (j.contains("cv")) cv = sdm::cv_config_from_json(j.at("cv"));
      if (j.contains("pipeline")) {
        pipeline = sdm::pipeline_spec_from_json(j.at("pipeline"));
        pipeline_from_file = true;
      }
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid config: ") + e.what());
    }
    if (a.data.empty()) a.data = j.value("data", "");
    if (!opt.classifier->count()) a.classifier = j.value("classifier", a.classifier);
    if (!opt.features->count()) a.features = j.value("features", a.features);
    a.regress = a.regress || j.value("regress", false);
    a.permute = a.permute || j.value("permute_labels", false);
  }
  if (a.data.empty()) throw UsageError("--data is required");

  if (opt.seed->count() || a.config.empty()) cv.seed = a.seed;
  if (opt.outer_folds->count() || a.config.empty()) cv.outer_folds = a.outer_folds;
  if (opt.outer_repeats->count() || a.config.empty()) cv.outer_repeats = a.outer_repeats;
  if (opt.inner_folds->count() || a.config.empty()) cv.inner_folds = a.inner_folds;
  if (opt.inner_repeats->count() || a.config.empty()) cv.inner_repeats = a.inner_repeats;
  if (opt.workers->count()) cv.workers = a.workers;
  if (!a.split.empty()) cv.split_rule = sdm::parse_split_rule(a.split);
  if (!a.ranks.empty()) cv.rank_grid = parse_int_list(a.ranks);
  if (!a.costs.empty()) cv.cost_grid = parse_double_list(a.costs);
  if (!a.lambdas.empty()) cv.lambda_grid = parse_double_list(a.lambdas);
  if (a.no_oversample) cv.oversample = false;
  try {
    cv.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const bool gram = a.features == "gram";
  if (a.regress && a.classifier != "ridge" && opt.classifier->count())
    throw UsageError("--regress uses the ridge decoder; drop --classifier or pass --classifier ridge");
  if (!a.regress && a.classifier == "ridge") throw UsageError("ridge is a regression decoder; add --regress");
  if (a.regress) a.classifier = "ridge";
  if (gram != (a.classifier == "kernel-l2"))
    throw UsageError("--features gram and --classifier kernel-l2 go together");

  if (!pipeline_from_file || opt.features->count()) {
    pipeline.features.base = gram ? sdm::FeatureLayout::FullVec : sdm::parse_feature_layout(a.features);
  }
  if (!a.bands.empty() && a.canonical_bands) throw UsageError("--bands and --canonical-bands are exclusive");
  if (!a.bands.empty()) pipeline.features.bands = parse_bands(a.bands);
  if (a.canonical_bands) pipeline.features.bands = sdm::canonical_bands();
  if (gram && !pipeline.features.bands.empty()) throw UsageError("gram features take no bands");
  if (a.scale_edges) pipeline.features.scale_edges = true;
  if (a.no_car) pipeline.car = false;
  if (opt.stack_factor->count()) pipeline.stack_factor = a.stack_factor;

  sdm::Dataset dataset = sdm::read_dataset(a.data);
  if (a.regress && !dataset.targets) throw sdm::DataError("dataset has no targets for regression");
  if (!a.regress && !dataset.labels) throw sdm::DataError("dataset has no class labels");
  if (a.permute) dataset = sdm::permute_labels(dataset, cv.seed);

  nlohmann::json echo = {{"data", a.data},
                         {"classifier", a.classifier},
                         {"features", a.features},
                         {"regress", a.regress},
                         {"permute_labels", a.permute},
                         {"cv", sdm::to_json(cv)},
                         {"pipeline", sdm::to_json(pipeline)}};

  sdm::CvReport report;
  if (a.regress) {
    report = sdm::nested_cv_regress(dataset, cv, pipeline);
  } else {
    sdm::ClassifierSpec spec;
    spec.kind = sdm::parse_classifier_kind(a.classifier);
    spec.solver.seed = cv.seed;
    report = sdm::nested_cv_classify(dataset, cv, pipeline, spec);
  }
  sdm::write_report(report, a.out);
  write_config(a.out, "decode", echo);

  const char* metric = a.regress ? "mean correlation" : "balanced accuracy";
  std::printf("%s (%s, %s): %.4f +/- %.4f over %zu folds\n", metric, report.model.c_str(), a.features.c_str(),
              report.mean, report.stddev, report.folds.size());
  for (const auto& f : report.folds)
    std::printf("  repeat %d fold %d  rank %d  metric %.4f\n", f.repeat, f.fold, f.rank, f.metric);
  for (const auto& note : report.notes) std::printf("note: %s\n", note.c_str());
}

}  // namespace

void add_decode_command(CLI::App& app) {
  auto args = std::make_shared<DecodeArgs>();
  auto opt = std::make_shared<DecodeOptions>();
  auto* cmd = app.add_subcommand("decode", "Nested cross-validated decoding");
  cmd->add_option("--data", args->data, "Dataset directory or manifest");
  cmd->add_option("--out", args->out, "Report directory")->required();
  cmd->add_option("--config", args->config, "JSON run config (keys cv, pipeline, classifier, features, ...)");
  opt->classifier = cmd->add_option("--classifier", args->classifier, "Decoder")
                        ->check(CLI::IsMember({"linear-l2", "kernel-l2", "l1", "ridge"}));
  opt->features = cmd->add_option("--features", args->features, "Feature set")
                      ->check(CLI::IsMember({"sdm", "sndm", "sedm", "sndm+sedm", "gram", "band-power"}));
  cmd->add_option("--bands", args->bands, "Frequency bands lo:hi,... in Hz");
  cmd->add_flag("--canonical-bands", args->canonical_bands, "Use the eight conventional bands");
  cmd->add_flag("--scale-edges", args->scale_edges, "Scale off-diagonal entries by sqrt(2)");
  cmd->add_flag("--no-car", args->no_car, "Skip common-average referencing");
  opt->stack_factor = cmd->add_option("--stack-factor", args->stack_factor, "Hankel stacking factor (0: automatic)")
                          ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--regress", args->regress, "Ridge regression on targets");
  cmd->add_flag("--permute-labels", args->permute, "Permute labels (chance-level control)");
  opt->seed = cmd->add_option("--seed", args->seed, "Seed for folds, solvers and permutation");
  opt->outer_folds = cmd->add_option("--outer-folds", args->outer_folds, "Outer folds");
  opt->outer_repeats = cmd->add_option("--outer-repeats", args->outer_repeats, "Outer repeats");
  opt->inner_folds = cmd->add_option("--inner-folds", args->inner_folds, "Inner folds");
  opt->inner_repeats = cmd->add_option("--inner-repeats", args->inner_repeats, "Inner repeats");
  cmd->add_option("--split", args->split, "Split rule")
      ->check(CLI::IsMember({"class-balanced", "grouped", "time-sequence"}));
  cmd->add_option("--ranks", args->ranks, "Rank grid, comma separated");
  cmd->add_option("--costs", args->costs, "Cost grid, comma separated");
  cmd->add_option("--lambdas", args->lambdas, "Ridge lambda grid, comma separated");
  cmd->add_flag("--no-oversample", args->no_oversample, "Do not balance classes in training sets");
  opt->workers = cmd->add_option("--workers", args->workers, "Worker threads (0: default)");
  cmd->callback([args, opt] { run_decode(*args, *opt); });
}

}  // namespace sdmkit
