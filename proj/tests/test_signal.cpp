#include "sdm/signal/dataset_io.hpp"
#include "sdm/signal/preprocess.hpp"
#include "sdm/signal/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace {

using sdm::TrialMatrix;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sdm_test_signal_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(TrialMatrix, RejectsInvalidShapesAndValues) {
  EXPECT_THROW(TrialMatrix(Eigen::MatrixXd::Zero(0, 5), 1e-3), std::invalid_argument);
  EXPECT_THROW(TrialMatrix(Eigen::MatrixXd::Zero(2, 1), 1e-3), std::invalid_argument);
  EXPECT_THROW(TrialMatrix(Eigen::MatrixXd::Zero(2, 5), 0.0), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 5);
  bad(1, 3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TrialMatrix(bad, 1e-3), std::invalid_argument);
  EXPECT_NO_THROW(TrialMatrix(Eigen::MatrixXd::Zero(1, 2), 1e-3));
}

TEST(Fig1Signal, PresetShape) {
  const TrialMatrix t = sdm::fig1_preset();
  EXPECT_EQ(t.channels(), 81);
  EXPECT_EQ(t.samples(), 500);
  EXPECT_DOUBLE_EQ(t.dt(), 0.001);
}

TEST(Fig1Signal, FirstSampleIsZero) {
  const TrialMatrix t = sdm::fig1_preset();
  EXPECT_EQ(t.data().col(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fig1Signal, MatchesDirectEvaluation) {
  const double p = -3.0;
  const double dt = 0.25;
  const std::vector<double> positions{p};
  const TrialMatrix t = sdm::generate_fig1_signal(dt, 0.5, positions);
  ASSERT_EQ(t.samples(), 2);
  const double time = 0.25;
  const double pi = std::numbers::pi;
  const double expected = (1.0 / std::cosh(p + 3.0)) * std::pow(0.25, time) * std::sin(2 * pi * 13 * time) +
                          (1.0 / std::cosh(p - 3.0)) * std::pow(2.0, time) * std::sin(2 * pi * 8 * time);
  EXPECT_NEAR(t.data()(0, 1), expected, 1e-15);
}

TEST(Fig1Signal, RejectsBadParameters) {
  const std::vector<double> positions{0.0};
  EXPECT_THROW(sdm::generate_fig1_signal(0.0, 0.5, positions), std::invalid_argument);
  EXPECT_THROW(sdm::generate_fig1_signal(1e-3, std::numeric_limits<double>::infinity(), positions),
               std::invalid_argument);
  EXPECT_THROW(sdm::generate_fig1_signal(1e-3, 0.5, {}), std::invalid_argument);
}

TEST(ClassDataset, CountsAndDeterminism) {
  const auto a = sdm::generate_class_dataset(3, 40, 8, 60, 1e-3, 5);
  const auto b = sdm::generate_class_dataset(3, 40, 8, 60, 1e-3, 5);
  ASSERT_EQ(a.size(), 120u);
  ASSERT_TRUE(a.labels);
  std::array<int, 3> counts{};
  for (int l : *a.labels) ++counts.at(static_cast<std::size_t>(l));
  EXPECT_EQ(counts, (std::array<int, 3>{40, 40, 40}));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.trials[i].data(), b.trials[i].data());
  EXPECT_EQ(*a.labels, *b.labels);
}

TEST(ClassDataset, ZeroNoiseGivesIdenticalTrialsPerClass) {
  sdm::ClassDatasetOptions o;
  o.trials_per_class = 4;
  o.channels = 6;
  o.samples = 40;
  o.noise = 0.0;
  const auto d = sdm::generate_class_dataset(o);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if ((*d.labels)[i] == (*d.labels)[j]) {
        EXPECT_EQ(d.trials[i].data(), d.trials[j].data());
      }
}

TEST(CommonAverageReference, IdenticalChannelsVanish) {
  Eigen::MatrixXd m(3, 5);
  for (int r = 0; r < 3; ++r) m.row(r) << 1, -2, 3, 0.5, 7;
  const auto out = sdm::common_average_reference(TrialMatrix(m, 1e-3));
  EXPECT_LT(out.data().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CommonAverageReference, TwoChannelAlgebra) {
  Eigen::MatrixXd m(2, 2);
  m << 3, 1, 1, -5;
  const auto out = sdm::common_average_reference(TrialMatrix(m, 1e-3)).data();
  EXPECT_DOUBLE_EQ(out(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(out(1, 1), -3.0);
}

TEST(CommonAverageReference, ColumnMeansZeroAndIdempotent) {
  const TrialMatrix t(random_matrix(4, 10, 3), 1e-3);
  const auto once = sdm::common_average_reference(t);
  for (Eigen::Index c = 0; c < 10; ++c) EXPECT_LT(std::abs(once.data().col(c).mean()), 1e-12);
  const auto twice = sdm::common_average_reference(once);
  EXPECT_LT((twice.data() - once.data()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CommonAverageReference, SingleChannelRejected) {
  EXPECT_THROW(sdm::common_average_reference(TrialMatrix(Eigen::MatrixXd::Ones(1, 4), 1e-3)),
               std::invalid_argument);
}

TEST(StackFactor, Examples) {
  EXPECT_EQ(sdm::choose_stack_factor(81, 500), 7);
  EXPECT_EQ(sdm::choose_stack_factor(60, 500), 9);
  EXPECT_EQ(sdm::choose_stack_factor(10, 9), 1);
  EXPECT_EQ(sdm::choose_stack_factor(20, 9), 1);
  // (L + 1) / (P + 1) exactly integral: 21 / 7 = 3.
  EXPECT_EQ(sdm::choose_stack_factor(6, 20), 3);
}

TEST(StackFactor, MonotoneInChannels) {
  for (int samples : {2, 17, 100, 500})
    for (int p = 1; p < 120; ++p) EXPECT_GE(sdm::choose_stack_factor(p, samples), sdm::choose_stack_factor(p + 1, samples));
}

TEST(StackFactor, SmallestSatisfyingInteger) {
  for (int p = 1; p < 40; ++p)
    for (int l = 2; l < 200; l += 7) {
      const int h = sdm::choose_stack_factor(p, l);
      EXPECT_GE(h * (p + 1), l + 1);
      if (h > 1) {
        EXPECT_LT((h - 1) * (p + 1), l + 1);
      }
    }
}

TEST(HankelStack, HandWrittenExample) {
  Eigen::MatrixXd m(1, 4);
  m << 1, 2, 3, 4;
  const auto pair = sdm::hankel_stack(TrialMatrix(m, 1.0), 2);
  Eigen::MatrixXd x(2, 2), xp(2, 2);
  x << 1, 2, 2, 3;
  xp << 2, 3, 3, 4;
  EXPECT_EQ(pair.x, x);
  EXPECT_EQ(pair.xp, xp);
  EXPECT_EQ(pair.h, 2);
}

TEST(HankelStack, UnstackedIsPlainShift) {
  const Eigen::MatrixXd m = random_matrix(3, 9, 4);
  const auto pair = sdm::hankel_stack(TrialMatrix(m, 1e-3), 1);
  EXPECT_EQ(pair.x, m.leftCols(8));
  EXPECT_EQ(pair.xp, m.rightCols(8));
}

TEST(HankelStack, ShiftConsistencyAndRoundTrip) {
  const Eigen::MatrixXd m = random_matrix(5, 40, 9);
  for (int h : {1, 2, 3, 7}) {
    const auto pair = sdm::hankel_stack(TrialMatrix(m, 1e-3), h);
    ASSERT_EQ(pair.x.rows(), 5 * h);
    ASSERT_EQ(pair.x.cols(), 40 - h);
    EXPECT_EQ(pair.x.topRows(5), m.leftCols(40 - h));
    for (Eigen::Index j = 0; j + 1 < pair.x.cols(); ++j) EXPECT_EQ(pair.xp.col(j), pair.x.col(j + 1));
    for (int b = 0; b < h; ++b) EXPECT_EQ(pair.x.middleRows(5 * b, 5), m.middleCols(b, 40 - h));
  }
}

TEST(HankelStack, RejectsBadFactor) {
  const TrialMatrix t(random_matrix(2, 4, 1), 1e-3);
  EXPECT_THROW(sdm::hankel_stack(t, 0), std::invalid_argument);
  EXPECT_THROW(sdm::hankel_stack(t, 4), std::invalid_argument);
}

TEST(HankelStack, DefaultFactorFig1Columns) {
  const auto pair = sdm::hankel_stack(sdm::fig1_preset());
  EXPECT_EQ(pair.h, 7);
  EXPECT_EQ(pair.x.cols(), 493);
}

TEST(DatasetIo, RoundTripIsExact) {
  auto d = sdm::generate_class_dataset(2, 3, 4, 12, 2e-3, 1);
  d.groups = std::vector<int>{0, 0, 1, 1, 2, 2};
  const auto dir = temp_dir("roundtrip");
  sdm::write_dataset(d, dir);
  const auto back = sdm::read_dataset(dir);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(back.trials[i].data(), d.trials[i].data());
  EXPECT_EQ(*back.labels, *d.labels);
  EXPECT_EQ(*back.groups, *d.groups);
  EXPECT_DOUBLE_EQ(back.dt(), 2e-3);
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, RegressionTargetsRoundTrip) {
  sdm::RegressionDatasetOptions o;
  o.trials = 6;
  o.n_groups = 3;
  o.channels = 6;
  o.samples = 20;
  const auto d = sdm::generate_regression_dataset(o);
  const auto dir = temp_dir("targets");
  sdm::write_dataset(d, dir);
  const auto back = sdm::read_dataset(dir / sdm::kManifestName);
  ASSERT_TRUE(back.targets);
  EXPECT_EQ(*back.targets, *d.targets);
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, TruncatedTrialIsDataError) {
  const auto dir = temp_dir("truncated");
  std::filesystem::create_directories(dir);
  sdm::write_trial_binary(random_matrix(2, 5, 1), dir / "t.bin");
  std::filesystem::resize_file(dir / "t.bin", 40);
  EXPECT_THROW(sdm::read_trial_binary(dir / "t.bin"), sdm::DataError);
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, CsvTrial) {
  const auto dir = temp_dir("csv");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "t.csv") << "1,2,3\n4,5,6\n";
  const auto m = sdm::read_trial_csv(dir / "t.csv");
  Eigen::MatrixXd expected(2, 3);
  expected << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(m, expected);
  std::filesystem::remove_all(dir);
}

TEST(PermuteLabels, KeepsMultisetAndIsSeeded) {
  const auto d = sdm::generate_class_dataset(3, 10, 4, 20, 1e-3, 2);
  const auto a = sdm::permute_labels(d, 3);
  const auto b = sdm::permute_labels(d, 3);
  EXPECT_EQ(*a.labels, *b.labels);
  auto x = *a.labels, y = *d.labels;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  EXPECT_EQ(x, y);
  EXPECT_NE(*a.labels, *d.labels);
}

}  // namespace
