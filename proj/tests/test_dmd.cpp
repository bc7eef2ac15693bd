#include "sdm/dmd/dmd.hpp"
#include "sdm/signal/preprocess.hpp"
#include "sdm/signal/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace {

using cd = std::complex<double>;

sdm::TrialMatrix cosine_trial(double hz, double dt, int samples) {
  Eigen::MatrixXd m(1, samples);
  for (int k = 0; k < samples; ++k) m(0, k) = std::cos(2 * std::numbers::pi * hz * k * dt);
  return sdm::TrialMatrix(m, dt);
}

// Random matrix with spectral radius `radius`.
Eigen::MatrixXd random_stable(int n, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
  return a * (radius / rho);
}

sdm::TrialMatrix iterate(const Eigen::MatrixXd& a, int steps, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(a.rows(), steps);
  for (Eigen::Index i = 0; i < a.rows(); ++i) m(i, 0) = g(rng);
  for (int k = 1; k < steps; ++k) m.col(k) = a * m.col(k - 1);
  return sdm::TrialMatrix(m, 1e-3);
}

// Each oracle eigenvalue matched to a distinct DMD eigenvalue, greedily by distance.
double max_matching_error(const Eigen::VectorXcd& oracle, const Eigen::VectorXcd& found) {
  std::vector<bool> used(static_cast<std::size_t>(found.size()), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < oracle.size(); ++i) {
    double best = 1e300;
    Eigen::Index arg = -1;
    for (Eigen::Index j = 0; j < found.size(); ++j)
      if (!used[static_cast<std::size_t>(j)] && std::abs(oracle(i) - found(j)) < best) {
        best = std::abs(oracle(i) - found(j));
        arg = j;
      }
    if (arg < 0) return 1e300;
    used[static_cast<std::size_t>(arg)] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

TEST(EigToPhysics, Examples) {
  auto s = sdm::eig_to_physics(cd(1.0, 0.0), 0.37);
  EXPECT_DOUBLE_EQ(s.frequency_hz, 0.0);
  EXPECT_DOUBLE_EQ(s.growth_rate, 1.0);
  s = sdm::eig_to_physics(cd(0.0, 1.0), 1e-3);
  EXPECT_NEAR(s.frequency_hz, 250.0, 1e-9);
  EXPECT_NEAR(s.growth_rate, 1.0, 1e-12);
  s = sdm::eig_to_physics(cd(0.5, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(s.frequency_hz, 0.0);
  EXPECT_NEAR(s.growth_rate, 0.25, 1e-15);
  s = sdm::eig_to_physics(cd(0.0, 0.0), 1e-3);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.growth_rate, 0.0);
  EXPECT_EQ(s.frequency_hz, 0.0);
}

TEST(EigToPhysics, NyquistEdgeIsPositive) {
  const auto s = sdm::eig_to_physics(cd(-1.0, 0.0), 1e-3);
  EXPECT_NEAR(s.frequency_hz, 500.0, 1e-9);
}

TEST(ExactDmd, Fig1RecoversFrequenciesAndGrowth) {
  const auto trial = sdm::fig1_preset();
  const auto pair = sdm::hankel_stack(trial);
  const auto svd = sdm::snapshot_svd(pair);
  int above = 0;
  for (Eigen::Index i = 0; i < svd.s.size(); ++i) above += svd.s(i) > 1e-8 * svd.s(0);
  EXPECT_EQ(above, 4);

  const auto r = sdm::exact_dmd(pair, 10, trial.dt());
  EXPECT_EQ(r.rank_used, 4);
  ASSERT_EQ(r.mode_count(), 4);
  std::vector<double> freqs, growth;
  for (Eigen::Index k = 0; k < 4; ++k) {
    freqs.push_back(std::abs(r.frequencies(k)));
    growth.push_back(r.growth_rates(k));
  }
  std::sort(freqs.begin(), freqs.end());
  std::sort(growth.begin(), growth.end());
  EXPECT_NEAR(freqs[0], 8.0, 0.1);
  EXPECT_NEAR(freqs[1], 8.0, 0.1);
  EXPECT_NEAR(freqs[2], 13.0, 0.1);
  EXPECT_NEAR(freqs[3], 13.0, 0.1);
  EXPECT_NEAR(growth[0], 0.25, 0.0125);
  EXPECT_NEAR(growth[1], 0.25, 0.0125);
  EXPECT_NEAR(growth[2], 2.0, 0.1);
  EXPECT_NEAR(growth[3], 2.0, 0.1);
}

TEST(ExactDmd, Fig1ReconstructionIsExact) {
  const auto trial = sdm::fig1_preset();
  const auto r = sdm::exact_dmd(sdm::hankel_stack(trial), 10, trial.dt());
  const auto times = sdm::sample_times(trial.samples(), trial.dt());
  const Eigen::MatrixXcd rec = sdm::reconstruct(r, times);
  const double err = (rec.real() - trial.data()).norm() / trial.data().norm();
  EXPECT_LT(err, 1e-6);
  EXPECT_LT(sdm::imaginary_residual(rec), 1e-8);
}

TEST(ExactDmd, PureCosineOnUnitCircle) {
  const auto trial = cosine_trial(10.0, 1e-3, 400);
  const auto r = sdm::exact_dmd(sdm::hankel_stack(trial), 2, trial.dt());
  ASSERT_EQ(r.eigenvalues.size(), 2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    EXPECT_NEAR(std::abs(r.eigenvalues(k)), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(r.frequencies(k)), 10.0, 0.1);
  }
  EXPECT_NEAR(std::abs(r.eigenvalues(0) - std::conj(r.eigenvalues(1))), 0.0, 1e-9);
}

TEST(ExactDmd, StoredSpectrumConsistent) {
  const auto trial = sdm::fig1_preset();
  const auto r = sdm::exact_dmd(sdm::hankel_stack(trial), 10, trial.dt());
  for (Eigen::Index k = 0; k < r.mode_count(); ++k) {
    const auto s = sdm::eig_to_physics(r.eigenvalues(k), r.dt);
    EXPECT_EQ(s.frequency_hz, r.frequencies(k));
    EXPECT_EQ(s.growth_rate, r.growth_rates(k));
    EXPECT_NEAR(r.modes.col(k).norm(), 1.0, 1e-12);
  }
}

TEST(ExactDmd, RandomLinearSystemsMatchOracleEigenvalues) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const Eigen::MatrixXd a = random_stable(n, 0.95, rng);
    const auto data = iterate(a, 50, rng);
    const auto pair = sdm::hankel_stack(data, 1);
    const auto r = sdm::exact_dmd(pair, n, data.dt());
    ASSERT_EQ(r.eigenvalues.size(), n);
    EXPECT_LT(max_matching_error(a.eigenvalues(), r.eigenvalues), 1e-6) << "system " << trial;
  }
}

TEST(ExactDmd, ConjugateClosureOnRealData) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd a = random_stable(6, 0.97, rng);
  const auto data = iterate(a, 60, rng);
  const auto r = sdm::exact_dmd(sdm::hankel_stack(data, 1), 6, data.dt());
  Eigen::VectorXcd conj = r.eigenvalues.conjugate();
  EXPECT_LT(max_matching_error(r.eigenvalues, conj), 1e-9);
  // Partners are adjacent, positive frequency first.
  for (Eigen::Index k = 0; k < r.mode_count(); ++k)
    if (r.eigenvalues(k).imag() > 0) {
      ASSERT_LT(k + 1, r.mode_count());
      EXPECT_NEAR(std::abs(r.eigenvalues(k + 1) - std::conj(r.eigenvalues(k))), 0.0, 1e-9);
    }
}

TEST(ExactDmd, OneStepPredictionOnLowRankData) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd a = random_stable(4, 0.9, rng);
  const auto data = iterate(a, 30, rng);
  const auto pair = sdm::hankel_stack(data, 1);
  const auto svd = sdm::snapshot_svd(pair);
  const Eigen::MatrixXd sinv = svd.s.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd prop = pair.xp * svd.v * sinv * svd.u.transpose();
  EXPECT_LT((pair.xp - prop * pair.x).norm() / pair.xp.norm(), 1e-8);
}

TEST(ExactDmd, AmplitudesReproduceFirstSnapshot) {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd a = random_stable(5, 0.99, rng);
  const auto data = iterate(a, 40, rng);
  const auto r = sdm::exact_dmd(sdm::hankel_stack(data, 1), 5, data.dt());
  const Eigen::VectorXcd x0 = r.modes * r.amplitudes;
  EXPECT_LT((x0.real() - data.data().col(0)).norm() / data.data().col(0).norm(), 1e-8);
  EXPECT_LT(x0.imag().norm(), 1e-8 * data.data().col(0).norm());
}

TEST(ExactDmd, ModeOrderingByAmplitude) {
  const auto trial = sdm::fig1_preset();
  const auto r = sdm::exact_dmd(sdm::hankel_stack(trial), 10, trial.dt());
  for (Eigen::Index k = 0; k + 1 < r.mode_count(); ++k)
    EXPECT_GE(std::abs(r.amplitudes(k)) * (1 + 1e-9), std::abs(r.amplitudes(k + 1)));
}

TEST(ExactDmd, KeepsAtMostChannelCount) {
  const auto d = sdm::generate_class_dataset(1, 1, 4, 100, 1e-3, 3);
  const auto pair = sdm::hankel_stack(d.trials[0]);
  const auto r = sdm::exact_dmd(pair, 30, d.dt());
  // P modes, plus possibly one conjugate partner.
  EXPECT_LE(r.mode_count(), 5);
  EXPECT_GE(r.mode_count(), 4);
  EXPECT_EQ(r.modes.rows(), 4);
}

TEST(ExactDmd, RankClampedWithWarning) {
  const auto trial = cosine_trial(10.0, 1e-3, 20);
  const auto pair = sdm::hankel_stack(trial, 2);
  const auto r = sdm::exact_dmd(pair, 50, trial.dt());
  EXPECT_TRUE(r.truncation.clamped);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_LE(r.truncation.effective_rank, 2);
}

TEST(ExactDmd, ZeroInputGivesEmptyResult) {
  const sdm::TrialMatrix zero(Eigen::MatrixXd::Zero(3, 20), 1e-3);
  const auto r = sdm::exact_dmd(sdm::hankel_stack(zero), 4, 1e-3);
  EXPECT_TRUE(r.empty());
  EXPECT_EQ(r.rank_used, 0);
}

TEST(ExactDmd, RejectsBadArguments) {
  const auto trial = cosine_trial(10.0, 1e-3, 50);
  const auto pair = sdm::hankel_stack(trial);
  EXPECT_THROW(sdm::exact_dmd(pair, 0, 1e-3), std::invalid_argument);
  EXPECT_THROW(sdm::exact_dmd(pair, 2, 0.0), std::invalid_argument);
}

TEST(Reconstruct, ZeroAmplitudesGiveZero) {
  const auto trial = sdm::fig1_preset();
  auto r = sdm::exact_dmd(sdm::hankel_stack(trial), 10, trial.dt());
  r.amplitudes.setZero();
  const auto times = sdm::sample_times(10, trial.dt());
  EXPECT_EQ(sdm::reconstruct(r, times).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SnapshotSvd, SharedSvdMatchesDirect) {
  const auto trial = sdm::fig1_preset();
  const auto pair = sdm::hankel_stack(trial);
  const auto svd = sdm::snapshot_svd(pair);
  EXPECT_EQ(svd.numerical_rank(), 4);
  const auto a = sdm::exact_dmd(pair, 4, trial.dt());
  const auto b = sdm::exact_dmd(pair, svd, 4, trial.dt());
  EXPECT_LT((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 0; i + 1 < svd.s.size(); ++i) EXPECT_GE(svd.s(i), svd.s(i + 1));
}

}  // namespace
