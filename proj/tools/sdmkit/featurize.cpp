#include "common.hpp"

#include "sdm/common/format.hpp"
#include "sdm/common/parallel.hpp"
#include "sdm/cv/feature_table.hpp"
#include "sdm/features/spectral.hpp"
#include "sdm/signal/dataset_io.hpp"
#include "sdm/signal/preprocess.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>

namespace sdmkit {
namespace fs = std::filesystem;
namespace {

struct FeaturizeArgs {
  std::string data;
  std::string out;
  int rank = 10;
  std::string layout = "sndm";
  std::string bands;
  bool canonical_bands = false;
  bool scale_edges = false;
  bool no_car = false;
  int stack_factor = 0;
  int nfft = 512;
  std::size_t workers = 0;
};

fs::path manifest_path(const fs::path& data) {
  return fs::is_directory(data) ? data / sdm::kManifestName : data;
}

std::string dataset_fingerprint(const fs::path& data, const nlohmann::json& config) {
  sdm::Fnv1a hash;
  const fs::path manifest = manifest_path(data);
  auto add_file = [&](const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw sdm::DataError("cannot read " + file.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    hash.update(file.filename().string());
    hash.update(bytes);
  };
  add_file(manifest);
  std::ifstream in(manifest);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("trials")) throw sdm::DataError("malformed manifest: " + manifest.string());
  for (const auto& t : j.at("trials")) add_file(manifest.parent_path() / t.at("file").get<std::string>());
  hash.update(config.dump());
  return hash.hex();
}

void run_featurize(const FeaturizeArgs& a) {
  sdm::PipelineSpec spec;
  spec.features.base = sdm::parse_feature_layout(a.layout);
  if (spec.features.base == sdm::FeatureLayout::BandConcatenated)
    throw UsageError("use a base layout together with --bands or --canonical-bands");
  if (!a.bands.empty() && a.canonical_bands) throw UsageError("--bands and --canonical-bands are exclusive");
  if (!a.bands.empty()) spec.features.bands = parse_bands(a.bands);
  if (a.canonical_bands || (spec.features.base == sdm::FeatureLayout::BandPower && spec.features.bands.empty()))
    spec.features.bands = sdm::canonical_bands();
  spec.features.scale_edges = a.scale_edges;
  spec.car = !a.no_car;
  spec.stack_factor = a.stack_factor;
  spec.psd_nfft = a.nfft;
  const bool band_power = spec.features.base == sdm::FeatureLayout::BandPower;

  nlohmann::json config = {{"data", a.data}, {"rank", band_power ? 0 : a.rank}, {"pipeline", sdm::to_json(spec)}};
  const std::string fingerprint = dataset_fingerprint(a.data, config);
  const fs::path out = a.out;
  const fs::path meta_file = out / "features.json";
  if (fs::exists(meta_file) && fs::exists(out / "features.csv")) {
    std::ifstream in(meta_file);
    const auto previous = nlohmann::json::parse(in, nullptr, false);
    if (!previous.is_discarded() && previous.value("fingerprint", "") == fingerprint) {
      std::cout << "up to date: " << a.out << " (fingerprint " << fingerprint << ")\n";
      return;
    }
  }

  const sdm::Dataset dataset = sdm::read_dataset(a.data);
  const std::size_t n = dataset.size();
  std::vector<std::optional<sdm::FeatureVector>> rows(n);
  std::vector<std::string> errors(n);
  sdm::parallel_for(n, a.workers == 0 ? sdm::default_worker_count() : a.workers, [&](std::size_t i) {
    try {
      const auto& trial = dataset.trials[i];
      if (band_power) {
        const sdm::TrialMatrix t = spec.car ? sdm::common_average_reference(trial) : trial;
        rows[i] = sdm::band_power_features(t, spec.features.bands, spec.psd_nfft);
        rows[i]->provenance.trial = static_cast<int>(i);
      } else {
        const sdm::StackedPair pair = sdm::prepare_trial(trial, spec);
        rows[i] = sdm::featurize(sdm::exact_dmd(pair, a.rank, trial.dt()), spec.features, static_cast<int>(i));
        rows[i]->provenance.rank = a.rank;
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  fs::create_directories(out);
  std::ofstream csv(out / "features.csv");
  std::ofstream err(out / "errors.csv");
  err << "trial,message\n";
  std::size_t ok = 0, failed = 0;
  Eigen::Index length = -1;
  std::string layout_name;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i]) {
      err << i << ",\"" << csv_escape(errors[i]) << "\"\n";
      ++failed;
      continue;
    }
    const auto& v = *rows[i];
    if (length < 0) {
      length = v.values.size();
      layout_name = sdm::to_string(v.layout);
      csv << "trial";
      if (dataset.labels) csv << ",label";
      for (Eigen::Index d = 0; d < length; ++d) csv << ",f" << d;
      csv << '\n';
    }
    if (v.values.size() != length) {
      err << i << ",\"feature length " << v.values.size() << " differs from " << length << "\"\n";
      ++failed;
      continue;
    }
    csv << i;
    if (dataset.labels) csv << ',' << (*dataset.labels)[i];
    for (Eigen::Index d = 0; d < length; ++d) csv << ',' << sdm::format_double(v.values(d));
    csv << '\n';
    ++ok;
  }
  if (!csv || !err) throw std::runtime_error("failed writing features to " + a.out);

  nlohmann::json meta = {{"fingerprint", fingerprint},
                         {"layout", layout_name},
                         {"base_layout", sdm::to_string(spec.features.base)},
                         {"rank", band_power ? 0 : a.rank},
                         {"bands", bands_json(spec.features.bands)},
                         {"length", length},
                         {"trials", n},
                         {"failed", failed}};
  write_text(meta_file, meta.dump(2) + "\n");
  write_config(out, "featurize", config);
  std::cout << "featurized " << ok << " of " << n << " trials, layout " << layout_name << ", length " << length
            << '\n';
  if (failed > 0) std::cout << failed << " trial(s) failed; see errors.csv\n";
}

}  // namespace

void add_featurize_command(CLI::App& app) {
  auto args = std::make_shared<FeaturizeArgs>();
  auto* cmd = app.add_subcommand("featurize", "Compute per-trial DMD feature vectors");
  cmd->add_option("--data", args->data, "Dataset directory or manifest")->required();
  cmd->add_option("--out", args->out, "Output directory")->required();
  cmd->add_option("--rank", args->rank, "DMD truncation rank")->check(CLI::PositiveNumber);
  cmd->add_option("--layout", args->layout, "Feature layout")
      ->check(CLI::IsMember({"sndm", "sedm", "sndm+sedm", "sdm", "band-power"}));
  cmd->add_option("--bands", args->bands, "Frequency bands lo:hi,... in Hz");
  cmd->add_flag("--canonical-bands", args->canonical_bands, "Use the eight conventional bands");
  cmd->add_flag("--scale-edges", args->scale_edges, "Scale off-diagonal entries by sqrt(2)");
  cmd->add_flag("--no-car", args->no_car, "Skip common-average referencing");
  cmd->add_option("--stack-factor", args->stack_factor, "Hankel stacking factor (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--nfft", args->nfft, "FFT length for band power")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", args->workers, "Worker threads (0: default)");
  cmd->callback([args] { run_featurize(*args); });
}

}  // namespace sdmkit
