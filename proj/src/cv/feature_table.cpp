#include "sdm/cv/feature_table.hpp"

#include "sdm/common/parallel.hpp"
#include "sdm/features/spectral.hpp"
#include "sdm/signal/preprocess.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdm {

StackedPair prepare_trial(const TrialMatrix& trial, const PipelineSpec& spec) {
  const TrialMatrix clean = spec.car ? common_average_reference(trial) : trial;
  return spec.stack_factor > 0 ? hankel_stack(clean, spec.stack_factor) : hankel_stack(clean);
}

int max_stacked_rank(Eigen::Index channels, Eigen::Index samples, int stack_factor) {
  const int h = stack_factor > 0 ? stack_factor : choose_stack_factor(channels, samples);
  return static_cast<int>(std::min<Eigen::Index>(h * channels, samples - h));
}

std::vector<int> clip_rank_grid(std::span<const int> grid, int max_rank) {
  std::vector<int> out;
  for (int r : grid) out.push_back(std::min(r, max_rank));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FeatureTable build_feature_table(const Dataset& dataset, const PipelineSpec& spec, std::span<const int> rank_grid,
                                 bool kernel, std::size_t workers) {
  dataset.validate();
  if (dataset.size() == 0) throw std::invalid_argument("dataset has no trials");
  const auto n = static_cast<Eigen::Index>(dataset.size());
  FeatureTable table;

  if (spec.features.base == FeatureLayout::BandPower) {
    if (kernel) throw std::invalid_argument("band-power features have no projection kernel");
    const std::vector<Band> bands = spec.features.bands.empty() ? canonical_bands() : spec.features.bands;
    std::vector<Eigen::VectorXd> rows(dataset.size());
    parallel_for(dataset.size(), workers, [&](std::size_t i) {
      const TrialMatrix t = spec.car ? common_average_reference(dataset.trials[i]) : dataset.trials[i];
      rows[i] = band_power_features(t, bands, spec.psd_nfft).values;
    });
    Eigen::MatrixXd x(n, rows.front().size());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    table.ranks = {0};
    table.design.push_back(std::move(x));
    return table;
  }

  const auto& first = dataset.trials.front();
  table.ranks = clip_rank_grid(rank_grid, max_stacked_rank(first.channels(), first.samples(), spec.stack_factor));
  if (table.ranks.empty()) throw std::invalid_argument("rank grid is empty");
  const std::size_t nr = table.ranks.size();

  std::vector<std::vector<Eigen::VectorXd>> rows(nr, std::vector<Eigen::VectorXd>(dataset.size()));
  std::vector<std::vector<Eigen::MatrixXcd>> modes(nr, std::vector<Eigen::MatrixXcd>(kernel ? dataset.size() : 0));
  std::vector<int> clamped(dataset.size(), 0);
  parallel_for(dataset.size(), workers, [&](std::size_t i) {
    const StackedPair pair = prepare_trial(dataset.trials[i], spec);
    const SnapshotSvd svd = snapshot_svd(pair);
    for (std::size_t r = 0; r < nr; ++r) {
      const DmdResult res = exact_dmd(pair, svd, table.ranks[r], dataset.dt());
      if (res.rank_used < table.ranks[r]) clamped[i] = 1;
      if (kernel) modes[r][i] = res.modes;
      else rows[r][i] = featurize(res, spec.features, static_cast<int>(i)).values;
    }
  });
  const auto n_clamped = std::count(clamped.begin(), clamped.end(), 1);
  if (n_clamped > 0)
    table.notes.push_back(std::to_string(n_clamped) + " trial(s) had numerical rank below a grid value");

  for (std::size_t r = 0; r < nr; ++r) {
    if (kernel) {
      table.gram.push_back(gram_matrix(modes[r], workers));
    } else {
      Eigen::MatrixXd x(n, rows[r].front().size());
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& v = rows[r][static_cast<std::size_t>(i)];
        if (v.size() != x.cols()) throw std::invalid_argument("trials yield feature vectors of different length");
        x.row(i) = v.transpose();
      }
      table.design.push_back(std::move(x));
    }
  }
  return table;
}

}  // namespace sdm
