#include "common.hpp"

#include "sdm/signal/dataset_io.hpp"
#include "sdm/signal/synth.hpp"

#include <iostream>
#include <memory>

namespace sdmkit {
namespace fs = std::filesystem;
namespace {

struct SynthArgs {
  std::string out;
  std::string preset;
  int classes = 3;
  int per_class = 40;
  int channels = 16;
  int samples = 250;
  double dt = 1e-3;
  double noise = 0.9;
  std::uint64_t seed = 0;
  bool regression = false;
  int trials = 300;
  int targets = 2;
  int groups = 10;
  bool force = false;
};

bool non_empty_directory(const fs::path& dir) {
  return fs::is_directory(dir) && fs::directory_iterator(dir) != fs::directory_iterator();
}

void run_synth(const SynthArgs& a) {
  const fs::path out = a.out;
  if (fs::exists(out) && !fs::is_directory(out)) throw sdm::DataError("output exists and is not a directory: " + a.out);
  if (non_empty_directory(out) && !a.force)
    throw sdm::DataError("output directory is not empty (use --force): " + a.out);

  nlohmann::json config;
  sdm::Dataset dataset;
  if (a.preset == "fig1") {
    dataset.trials.push_back(sdm::fig1_preset());
    config = {{"preset", "fig1"}};
  } else if (!a.preset.empty()) {
    throw UsageError("unknown preset: " + a.preset);
  } else if (a.regression) {
    sdm::RegressionDatasetOptions o;
    o.trials = a.trials;
    o.target_dims = a.targets;
    o.n_groups = a.groups;
    o.channels = a.channels;
    o.samples = a.samples;
    o.dt = a.dt;
    o.noise = a.noise;
    o.seed = a.seed;
    dataset = sdm::generate_regression_dataset(o);
    config = {{"kind", "regression"}, {"trials", a.trials}, {"targets", a.targets}, {"groups", a.groups},
              {"channels", a.channels}, {"samples", a.samples}, {"dt", a.dt}, {"noise", a.noise}, {"seed", a.seed}};
  } else {
    sdm::ClassDatasetOptions o;
    o.n_classes = a.classes;
    o.trials_per_class = a.per_class;
    o.channels = a.channels;
    o.samples = a.samples;
    o.dt = a.dt;
    o.noise = a.noise;
    o.seed = a.seed;
    dataset = sdm::generate_class_dataset(o);
    config = {{"kind", "classes"}, {"classes", a.classes}, {"per_class", a.per_class}, {"channels", a.channels},
              {"samples", a.samples}, {"dt", a.dt}, {"noise", a.noise}, {"seed", a.seed}};
  }

  // Build next to the target and rename into place so a failure leaves nothing behind.
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  fs::create_directories(parent);
  const fs::path staging = parent / ("." + out.filename().string() + ".partial");
  fs::remove_all(staging);
  try {
    fs::create_directories(staging);
    sdm::write_dataset(dataset, staging);
    write_config(staging, "synth", config);
    if (fs::exists(out)) fs::remove_all(out);
    fs::rename(staging, out);
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
  std::cout << "wrote " << dataset.size() << " trials (" << dataset.channels() << " channels x "
            << dataset.trials.front().samples() << " samples) to " << a.out << '\n';
}

}  // namespace

void add_synth_command(CLI::App& app) {
  auto args = std::make_shared<SynthArgs>();
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic dataset directory");
  cmd->add_option("--out", args->out, "Output dataset directory")->required();
  cmd->add_option("--preset", args->preset, "Named preset (fig1)");
  cmd->add_option("--classes", args->classes, "Number of classes")->check(CLI::PositiveNumber);
  cmd->add_option("--per-class", args->per_class, "Trials per class")->check(CLI::PositiveNumber);
  cmd->add_option("--channels", args->channels, "Channels per trial")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", args->samples, "Samples per trial")->check(CLI::Range(2, 1 << 24));
  cmd->add_option("--dt", args->dt, "Sampling interval in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", args->noise, "White-noise standard deviation")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", args->seed, "Random seed");
  cmd->add_flag("--regression", args->regression, "Generate continuous targets instead of classes");
  cmd->add_option("--trials", args->trials, "Trials (regression)")->check(CLI::PositiveNumber);
  cmd->add_option("--targets", args->targets, "Target dimensions (regression)")->check(CLI::PositiveNumber);
  cmd->add_option("--groups", args->groups, "Temporal groups (regression)")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", args->force, "Replace a non-empty output directory");
  cmd->callback([args] { run_synth(*args); });
}

}  // namespace sdmkit
