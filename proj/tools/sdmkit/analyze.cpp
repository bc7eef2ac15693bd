#include "common.hpp"

#include "sdm/analysis/analysis.hpp"
#include "sdm/common/parallel.hpp"
#include "sdm/cv/feature_table.hpp"
#include "sdm/signal/dataset_io.hpp"
#include "sdm/signal/preprocess.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

namespace sdmkit {
namespace fs = std::filesystem;
namespace {

struct AnalyzeArgs {
  std::string data;
  std::string out;
  int rank = 10;
  int nfft = 512;
  std::string layout = "sndm";
  bool z_transform = false;
  bool no_car = false;
  int top = 10;
  std::size_t workers = 0;
};

sdm::PipelineSpec pipeline_of(const AnalyzeArgs& a) {
  sdm::PipelineSpec spec;
  spec.car = !a.no_car;
  spec.psd_nfft = a.nfft;
  spec.features.base = sdm::parse_feature_layout(a.layout);
  return spec;
}

std::vector<sdm::SdmFeatures> sdm_per_trial(const sdm::Dataset& dataset, const AnalyzeArgs& a) {
  const auto spec = pipeline_of(a);
  std::vector<sdm::SdmFeatures> out(dataset.size());
  sdm::parallel_for(dataset.size(), a.workers == 0 ? sdm::default_worker_count() : a.workers, [&](std::size_t i) {
    const auto pair = sdm::prepare_trial(dataset.trials[i], spec);
    out[i] = sdm::sdm_features(sdm::exact_dmd(pair, a.rank, dataset.dt()).modes);
  });
  return out;
}

const std::vector<int>& require_labels(const sdm::Dataset& dataset) {
  if (!dataset.labels) throw sdm::DataError("dataset has no class labels");
  return *dataset.labels;
}

std::vector<std::string> channel_ids(const sdm::Dataset& dataset) {
  const auto& ids = dataset.trials.front().channel_ids();
  return ids.empty() ? sdm::default_channel_ids(dataset.channels()) : ids;
}

nlohmann::json echo(const AnalyzeArgs& a, const std::string& mode) {
  return {{"mode", mode},       {"data", a.data},       {"rank", a.rank}, {"nfft", a.nfft},
          {"layout", a.layout}, {"z_transform", a.z_transform}, {"car", !a.no_car}};
}

void run_f_map(const AnalyzeArgs& a) {
  const sdm::Dataset dataset = sdm::read_dataset(a.data);
  const auto& labels = require_labels(dataset);
  const auto features = sdm_per_trial(dataset, a);
  const sdm::FMap map = sdm::anova_f_map(features, labels);
  fs::create_directories(a.out);
  const auto ids = channel_ids(dataset);
  sdm::write_f_map_csv(map, ids, fs::path(a.out) / "f_map.csv");
  write_config(a.out, "analyze", echo(a, "f-map"));

  struct Entry {
    double f;
    Eigen::Index i, j;
  };
  std::vector<Entry> entries;
  for (Eigen::Index i = 0; i < map.values.rows(); ++i)
    for (Eigen::Index j = i; j < map.values.cols(); ++j) entries.push_back({map.values(i, j), i, j});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.f > y.f; });
  std::printf("F map over %zu trials, dof (%d, %d)\n", dataset.size(), map.dof_between, map.dof_within);
  for (std::size_t k = 0; k < std::min<std::size_t>(entries.size(), static_cast<std::size_t>(a.top)); ++k) {
    const auto& e = entries[k];
    std::printf("  %-10s %-10s F = %.6g\n", ids[static_cast<std::size_t>(e.i)].c_str(),
                ids[static_cast<std::size_t>(e.j)].c_str(), e.f);
  }
  if (!map.infinite.empty()) std::printf("%zu entries have zero within-class spread (F = inf)\n", map.infinite.size());
}

void run_psd_corr(const AnalyzeArgs& a) {
  const sdm::Dataset dataset = sdm::read_dataset(a.data);
  const auto features = sdm_per_trial(dataset, a);
  std::vector<Eigen::VectorXd> sndm(dataset.size());
  std::vector<sdm::PsdMatrix> spectra(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    sndm[i] = features[i].matrix.diagonal();
    const auto& t = dataset.trials[i];
    spectra[i] = sdm::psd(a.no_car ? t : sdm::common_average_reference(t), a.nfft);
  }
  const sdm::PsdCorrelation spectrum = sdm::sndm_psd_spectrum(sndm, spectra);
  fs::create_directories(a.out);
  sdm::write_psd_correlation_csv(spectrum, fs::path(a.out) / "psd_correlation.csv");
  write_config(a.out, "analyze", echo(a, "psd-corr"));
  const auto peak = spectrum.peak();
  std::printf("peak correlation r = %.4f at %.3f Hz\n", spectrum.r(peak), spectrum.freqs(peak));
}

void run_reproducibility(const AnalyzeArgs& a) {
  const sdm::Dataset dataset = sdm::read_dataset(a.data);
  const auto& labels = require_labels(dataset);
  const auto features = sdm_per_trial(dataset, a);
  const auto layout = sdm::parse_feature_layout(a.layout);
  if (layout == sdm::FeatureLayout::BandPower || layout == sdm::FeatureLayout::BandConcatenated)
    throw UsageError("reproducibility takes an sDM layout");
  Eigen::MatrixXd rows;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::VectorXd v = sdm::vectorize(features[i].matrix, layout);
    if (i == 0) rows.resize(static_cast<Eigen::Index>(features.size()), v.size());
    rows.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  const auto report = sdm::reproducibility(rows, labels, a.z_transform);
  fs::create_directories(a.out);
  sdm::write_reproducibility_csv(report, fs::path(a.out) / "reproducibility.csv");
  write_config(a.out, "analyze", echo(a, "reproducibility"));
  for (std::size_t c = 0; c < report.classes.size(); ++c)
    std::printf("  class %d: r = %.4f over %zu pairs\n", report.classes[c], report.class_back_transformed[c],
                report.pairs[c]);
  std::printf("overall within-class correlation %.4f\n", report.overall_back_transformed);
}

void add_common(CLI::App* cmd, AnalyzeArgs& a) {
  cmd->add_option("--data", a.data, "Dataset directory or manifest")->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--rank", a.rank, "DMD truncation rank")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-car", a.no_car, "Skip common-average referencing");
  cmd->add_option("--workers", a.workers, "Worker threads (0: default)");
}

}  // namespace

void add_analyze_command(CLI::App& app) {
  auto* cmd = app.add_subcommand("analyze", "Feature analyses (F map, PSD correlation, reproducibility)");
  cmd->require_subcommand(1);

  auto fmap = std::make_shared<AnalyzeArgs>();
  auto* f = cmd->add_subcommand("f-map", "One-way ANOVA F value per sDM entry");
  add_common(f, *fmap);
  f->add_option("--top", fmap->top, "Entries to print")->check(CLI::NonNegativeNumber);
  f->callback([fmap] { run_f_map(*fmap); });

  auto psd = std::make_shared<AnalyzeArgs>();
  auto* p = cmd->add_subcommand("psd-corr", "Correlation of snDM with PSD per frequency bin");
  add_common(p, *psd);
  p->add_option("--nfft", psd->nfft, "FFT length")->check(CLI::PositiveNumber);
  p->callback([psd] { run_psd_corr(*psd); });

  auto rep = std::make_shared<AnalyzeArgs>();
  auto* r = cmd->add_subcommand("reproducibility", "Within-class correlation of feature vectors");
  add_common(r, *rep);
  r->add_option("--layout", rep->layout, "Feature layout")->check(CLI::IsMember({"sndm", "sedm", "sndm+sedm", "sdm"}));
  r->add_flag("--z-transform", rep->z_transform, "Average Fisher z-transformed correlations");
  r->callback([rep] { run_reproducibility(*rep); });
}

}  // namespace sdmkit
