#include "sdm/signal/preprocess.hpp"

#include <stdexcept>

namespace sdm {

TrialMatrix common_average_reference(const TrialMatrix& trial) {
  if (trial.channels() < 2)
    throw std::invalid_argument("common average reference needs at least two channels");
  const Eigen::RowVectorXd mean = trial.data().colwise().mean();
  Eigen::MatrixXd out = trial.data().rowwise() - mean;
  return TrialMatrix(std::move(out), trial.dt(), trial.channel_ids());
}

int choose_stack_factor(Eigen::Index channels, Eigen::Index samples) {
  if (channels < 1 || samples < 2) throw std::invalid_argument("need P >= 1 and L >= 2");
  // ceil((L + 1) / (P + 1)) in integer arithmetic, exact at integer ratios.
  return static_cast<int>((samples + 1 + channels) / (channels + 1));
}

StackedPair hankel_stack(const TrialMatrix& trial, int h) {
  const Eigen::Index p = trial.channels();
  const Eigen::Index l = trial.samples();
  if (h < 1) throw std::invalid_argument("stack factor must be >= 1");
  if (l <= h) throw std::invalid_argument("trial too short for the requested stack factor");

  const Eigen::Index cols = l - h;
  StackedPair pair;
  pair.h = h;
  pair.channels = p;
  pair.x.resize(h * p, cols);
  pair.xp.resize(h * p, cols);
  const auto& d = trial.data();
  for (int i = 0; i < h; ++i) {
    pair.x.middleRows(i * p, p) = d.middleCols(i, cols);
    pair.xp.middleRows(i * p, p) = d.middleCols(i + 1, cols);
  }
  return pair;
}

StackedPair hankel_stack(const TrialMatrix& trial) {
  return hankel_stack(trial, choose_stack_factor(trial.channels(), trial.samples()));
}

}  // namespace sdm
