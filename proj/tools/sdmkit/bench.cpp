#include "common.hpp"

#include "sdm/bench/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

namespace sdmkit {
namespace {

struct BenchArgs {
  std::string out;
  std::string pipelines = "kernel-l2,linear-l2,l1-sndm";
  std::string n_values = "50,100,200,400,800";
  int repetitions = 5;
  std::uint64_t seed = 1;
  int channels = 6;
  int samples = 80;
  int rank = 6;
  double noise = 0.9;
  double cost = 1.0;
};

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

void run_bench(const BenchArgs& a) {
  const auto names = split_names(a.pipelines);
  const auto known = sdm::builtin_pipelines();
  if (names.empty()) throw UsageError("no pipelines given");
  for (const auto& name : names)
    if (std::find(known.begin(), known.end(), name) == known.end()) throw UsageError("unknown pipeline: " + name);

  sdm::BenchOptions options;
  options.n_values = parse_int_list(a.n_values);
  options.repetitions = a.repetitions;
  sdm::BenchDataOptions data;
  data.max_per_class = *std::max_element(options.n_values.begin(), options.n_values.end());
  data.channels = a.channels;
  data.samples = a.samples;
  data.rank = a.rank;
  data.noise = a.noise;
  data.cost = a.cost;
  data.seed = a.seed;
  const auto features = sdm::prepare_bench_features(data);

  std::vector<sdm::TimingSeries> series;
  for (const auto& name : names) {
    auto pipeline = sdm::make_pipeline(name, features);
    series.push_back(sdm::run_scaling_benchmark(*pipeline, options));
  }
  sdm::write_bench_csv(series, a.out);
  write_config(a.out, "bench",
               {{"pipelines", names}, {"n", options.n_values}, {"repetitions", a.repetitions}, {"seed", a.seed},
                {"channels", a.channels}, {"samples", a.samples}, {"rank", a.rank}, {"noise", a.noise},
                {"cost", a.cost}});

  std::printf("%-12s %8s %8s %8s %8s\n", "pipeline", "train", "r2", "predict", "r2");
  for (const auto& s : series) {
    std::printf("%-12s %8.3f %8.3f %8.3f %8.3f\n", s.pipeline.c_str(), s.train_fit.exponent, s.train_fit.r_squared,
                s.predict_fit.exponent, s.predict_fit.r_squared);
    for (const auto& flag : s.flags) std::printf("  note: %s\n", flag.c_str());
  }
}

}  // namespace

void add_bench_command(CLI::App& app) {
  auto args = std::make_shared<BenchArgs>();
  auto* cmd = app.add_subcommand("bench", "Train/predict scaling benchmark with fitted exponents");
  cmd->add_option("--out", args->out, "Output directory")->required();
  cmd->add_option("--pipelines", args->pipelines, "Comma-separated pipelines (kernel-l2, linear-l2, l1-sndm)");
  cmd->add_option("--n", args->n_values, "Comma-separated samples per class");
  cmd->add_option("--repetitions", args->repetitions, "Timed repetitions per n")->check(CLI::Range(3, 1000));
  cmd->add_option("--seed", args->seed, "Data seed");
  cmd->add_option("--channels", args->channels, "Channels")->check(CLI::Range(2, 4096));
  cmd->add_option("--samples", args->samples, "Samples per trial")->check(CLI::Range(4, 1 << 20));
  cmd->add_option("--rank", args->rank, "DMD rank")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", args->noise, "Noise level")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cost", args->cost, "SVM / logistic cost")->check(CLI::PositiveNumber);
  cmd->callback([args] { run_bench(*args); });
}

}  // namespace sdmkit
