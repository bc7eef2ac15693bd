#include "sdm/cv/nested.hpp"
#include "sdm/decoder/ridge.hpp"
#include "sdm/signal/synth.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

namespace {

using sdm::SplitRule;
using sdm_test::random_matrix;

std::vector<int> class_labels(int classes, int per) {
  std::vector<int> y;
  for (int i = 0; i < classes * per; ++i) y.push_back(i % classes);
  return y;
}

TEST(Folds, ClassBalancedDivisible) {
  const auto labels = class_labels(3, 40);
  const auto a = sdm::make_folds(labels.size(), labels, {}, 10, SplitRule::ClassBalanced, 4);
  for (int f = 0; f < 10; ++f) {
    std::array<int, 3> counts{};
    for (auto i : a.test_indices(f)) ++counts.at(static_cast<std::size_t>(labels[i]));
    EXPECT_EQ(counts, (std::array<int, 3>{4, 4, 4})) << "fold " << f;
  }
}

TEST(Folds, ClassBalancedCountsDifferByAtMostOne) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> uc(2, 5), un(1, 30);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<int> labels;
    const int classes = uc(rng);
    for (int c = 0; c < classes; ++c)
      for (int i = un(rng); i > 0; --i) labels.push_back(c);
    std::shuffle(labels.begin(), labels.end(), rng);
    const int k = std::min<int>(5, static_cast<int>(labels.size()));
    const auto a = sdm::make_folds(labels.size(), labels, {}, k, SplitRule::ClassBalanced, draw);
    for (int c = 0; c < classes; ++c) {
      int lo = 1 << 30, hi = 0;
      for (int f = 0; f < k; ++f) {
        int n = 0;
        for (auto i : a.test_indices(f)) n += labels[i] == c;
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      EXPECT_LE(hi - lo, 1);
    }
    for (int f = 0; f < k; ++f) EXPECT_FALSE(a.test_indices(f).empty());
  }
}

TEST(Folds, GroupedOneGroupPerFold) {
  std::vector<int> groups;
  for (int g = 0; g < 10; ++g)
    for (int i = 0; i < 3 + g % 2; ++i) groups.push_back(g);
  const auto a = sdm::make_folds(groups.size(), {}, groups, 10, SplitRule::Grouped, 0);
  for (int f = 0; f < 10; ++f) {
    std::set<int> seen;
    for (auto i : a.test_indices(f)) seen.insert(groups[i]);
    EXPECT_EQ(seen.size(), 1u);
  }
}

TEST(Folds, GroupedNeverSplitsAGroup) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> ug(0, 11);
  std::vector<int> groups(200);
  for (auto& g : groups) g = ug(rng);
  const auto a = sdm::make_folds(groups.size(), {}, groups, 5, SplitRule::Grouped, 0);
  std::map<int, int> fold_of_group;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto [it, inserted] = fold_of_group.emplace(groups[i], a.fold_of[i]);
    EXPECT_EQ(it->second, a.fold_of[i]);
  }
  EXPECT_THROW(sdm::make_folds(groups.size(), {}, groups, 13, SplitRule::Grouped, 0), std::invalid_argument);
}

TEST(Folds, TimeSequenceBlocks) {
  const auto a = sdm::make_folds(25, {}, {}, 10, SplitRule::TimeSequence, 0);
  std::vector<std::size_t> sizes;
  std::size_t next = 0;
  for (int f = 0; f < 10; ++f) {
    const auto t = a.test_indices(f);
    sizes.push_back(t.size());
    for (auto i : t) EXPECT_EQ(i, next++);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 3, 3, 2, 2, 2, 2, 2}));
}

TEST(Folds, PartitionAndErrors) {
  const auto labels = class_labels(2, 7);
  const auto a = sdm::make_folds(labels.size(), labels, {}, 3, SplitRule::ClassBalanced, 9);
  for (int f = 0; f < 3; ++f) {
    auto train = a.train_indices(f);
    auto test = a.test_indices(f);
    std::vector<std::size_t> all(train);
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  }
  EXPECT_THROW(sdm::make_folds(labels.size(), labels, {}, 1, SplitRule::ClassBalanced, 0), std::invalid_argument);
  EXPECT_THROW(sdm::make_folds(labels.size(), labels, {}, 15, SplitRule::ClassBalanced, 0), std::invalid_argument);
  EXPECT_THROW(sdm::make_folds(10, {}, {}, 3, SplitRule::Grouped, 0), std::invalid_argument);
}

TEST(Folds, SeededAndDeriveSeed) {
  const auto labels = class_labels(3, 10);
  const auto a = sdm::make_folds(labels.size(), labels, {}, 5, SplitRule::ClassBalanced, 3);
  const auto b = sdm::make_folds(labels.size(), labels, {}, 5, SplitRule::ClassBalanced, 3);
  const auto c = sdm::make_folds(labels.size(), labels, {}, 5, SplitRule::ClassBalanced, 4);
  EXPECT_EQ(a.fold_of, b.fold_of);
  EXPECT_NE(a.fold_of, c.fold_of);
  EXPECT_EQ(sdm::derive_seed(1, {0, 2}), sdm::derive_seed(1, {0, 2}));
  EXPECT_NE(sdm::derive_seed(1, {0, 2}), sdm::derive_seed(1, {2, 0}));
  EXPECT_NE(sdm::derive_seed(1, {0}), sdm::derive_seed(2, {0}));
}

TEST(CvConfig, DefaultsAndValidation) {
  sdm::CvConfig c;
  EXPECT_EQ(c.cost_grid.size(), 10u);
  EXPECT_DOUBLE_EQ(c.cost_grid.front(), 0.1);
  EXPECT_DOUBLE_EQ(c.cost_grid.back(), 1e8);
  EXPECT_EQ(c.lambda_grid.size(), 17u);
  EXPECT_EQ(c.rank_grid, (std::vector<int>{25, 50, 100, 200, 300, 600, 900}));
  EXPECT_NO_THROW(c.validate());
  c.outer_folds = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.cost_grid = {0.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.lambda_grid = {0.0, 1.0};
  EXPECT_NO_THROW(c.validate());
  c.lambda_grid = {-1.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.rank_grid = {};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(CvConfig, JsonRoundTripAndUnknownKeys) {
  sdm::CvConfig c;
  c.outer_folds = 4;
  c.inner_repeats = 3;
  c.split_rule = SplitRule::TimeSequence;
  c.cost_grid = {0.5, 2.0};
  c.seed = 99;
  c.oversample = false;
  const auto back = sdm::cv_config_from_json(sdm::to_json(c));
  EXPECT_EQ(sdm::to_json(back), sdm::to_json(c));
  EXPECT_EQ(back.split_rule, SplitRule::TimeSequence);
  EXPECT_THROW(sdm::cv_config_from_json({{"outer_fold", 3}}), std::invalid_argument);

  sdm::PipelineSpec p;
  p.features.base = sdm::FeatureLayout::SnSeDm;
  p.features.bands = {{0.0, 10.0}, {10.0, 50.0}};
  p.car = false;
  EXPECT_EQ(sdm::to_json(sdm::pipeline_spec_from_json(sdm::to_json(p))), sdm::to_json(p));
  EXPECT_THROW(sdm::pipeline_spec_from_json({{"layuot", "sndm"}}), std::invalid_argument);
}

TEST(FeatureTable, RankGridClipping) {
  EXPECT_EQ(sdm::max_stacked_rank(16, 250), 16 * 15 < 250 - 15 ? 16 * 15 : 250 - 15);
  const std::vector<int> grid{25, 50, 100, 200, 300, 600, 900};
  EXPECT_EQ(sdm::clip_rank_grid(grid, 235), (std::vector<int>{25, 50, 100, 200, 235}));
}

TEST(FeatureTable, KernelTableMatchesDesignDotProducts) {
  sdm::ClassDatasetOptions o;
  o.trials_per_class = 3;
  o.channels = 5;
  o.samples = 50;
  const auto d = sdm::generate_class_dataset(o);
  sdm::PipelineSpec spec;
  spec.features.base = sdm::FeatureLayout::FullVec;
  const std::vector<int> ranks{4, 8};
  const auto design = sdm::build_feature_table(d, spec, ranks, false, 2);
  const auto kernel = sdm::build_feature_table(d, spec, ranks, true, 1);
  ASSERT_EQ(design.ranks, kernel.ranks);
  for (std::size_t r = 0; r < 2; ++r) {
    const Eigen::MatrixXd g = design.design[r] * design.design[r].transpose();
    EXPECT_LT((g - kernel.gram[r]).cwiseAbs().maxCoeff(), 1e-9 * g.cwiseAbs().maxCoeff());
  }
}

sdm::CvConfig small_config(std::uint64_t seed) {
  sdm::CvConfig c;
  c.outer_folds = 5;
  c.inner_folds = 3;
  c.cost_grid = {0.1, 1.0, 10.0};
  c.rank_grid = {6};
  c.seed = seed;
  c.workers = 2;
  return c;
}

sdm::Dataset small_classes(double noise, std::uint64_t seed) {
  sdm::ClassDatasetOptions o;
  o.trials_per_class = 40;
  o.channels = 8;
  o.samples = 80;
  o.noise = noise;
  o.seed = seed;
  return sdm::generate_class_dataset(o);
}

sdm::PipelineSpec sndm_pipeline() {
  sdm::PipelineSpec p;
  p.features.base = sdm::FeatureLayout::SnDm;
  return p;
}

TEST(NestedClassify, NoiselessIsPerfect) {
  const auto d = small_classes(0.0, 1);
  sdm::ClassifierSpec spec;
  const auto report = sdm::nested_cv_classify(d, small_config(1), sndm_pipeline(), spec);
  EXPECT_DOUBLE_EQ(report.mean, 1.0);
  EXPECT_EQ(report.folds.size(), 5u);
}

TEST(NestedClassify, NoLeakageAndAggregation) {
  const auto d = small_classes(0.9, 2);
  auto config = small_config(2);
  config.outer_repeats = 2;
  config.inner_repeats = 2;
  std::vector<sdm::FitEvent> events;
  sdm::ClassifierSpec spec;
  const auto report =
      sdm::nested_cv_classify(d, config, sndm_pipeline(), spec, [&](const sdm::FitEvent& e) { events.push_back(e); });
  ASSERT_EQ(events.size(), 2u * 5u * (2u * 3u + 1u));
  ASSERT_EQ(report.assignments.size(), 2u);
  for (const auto& e : events) {
    const auto& fold_of = report.assignments[static_cast<std::size_t>(e.repeat)];
    std::set<std::size_t> train(e.train.begin(), e.train.end());
    for (auto i : e.train) EXPECT_NE(fold_of[i], e.outer_fold) << "outer test trial used for fitting";
    for (auto i : e.evaluated) EXPECT_EQ(train.count(i), 0u) << "evaluated trial also trained on";
    if (e.inner_fold >= 0)
      for (auto i : e.evaluated) EXPECT_NE(fold_of[i], e.outer_fold) << "outer test trial used for selection";
    else
      for (auto i : e.evaluated) EXPECT_EQ(fold_of[i], e.outer_fold);
  }
  for (int r = 0; r < 2; ++r) {
    const auto m = report.fold_metrics(r);
    double s = 0;
    for (double v : m) s += v;
    EXPECT_DOUBLE_EQ(report.repeat_means[static_cast<std::size_t>(r)], s / 5.0);
  }
  EXPECT_DOUBLE_EQ(report.mean, (report.repeat_means[0] + report.repeat_means[1]) / 2.0);
}

TEST(NestedClassify, DeterministicAcrossWorkerCounts) {
  const auto d = small_classes(0.9, 3);
  auto c1 = small_config(3);
  auto c2 = c1;
  c2.workers = 1;
  sdm::ClassifierSpec spec;
  const auto a = sdm::to_json(sdm::nested_cv_classify(d, c1, sndm_pipeline(), spec));
  const auto b = sdm::to_json(sdm::nested_cv_classify(d, c2, sndm_pipeline(), spec));
  auto strip = [](nlohmann::json j) {
    j["config"]["cv"].erase("workers");
    return j;
  };
  EXPECT_EQ(strip(a).dump(), strip(b).dump());
}

TEST(NestedClassify, PermutedLabelsNearChance) {
  const auto d = sdm::permute_labels(small_classes(0.9, 4), 3);
  sdm::ClassifierSpec spec;
  const auto report = sdm::nested_cv_classify(d, small_config(3), sndm_pipeline(), spec);
  EXPECT_GE(report.mean, 0.2);
  EXPECT_LE(report.mean, 0.47);
}

TEST(NestedClassify, KernelAndLinearAgreePerFold) {
  const auto d = small_classes(0.9, 5);
  auto config = small_config(5);
  config.rank_grid = {4, 8};
  sdm::PipelineSpec full;
  full.features.base = sdm::FeatureLayout::FullVec;
  sdm::ClassifierSpec lin, ker;
  ker.kind = sdm::ClassifierKind::KernelL2;
  const auto a = sdm::nested_cv_classify(d, config, full, lin);
  const auto b = sdm::nested_cv_classify(d, config, full, ker);
  ASSERT_EQ(a.folds.size(), b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    EXPECT_EQ(a.folds[f].metric, b.folds[f].metric);
    EXPECT_EQ(a.folds[f].rank, b.folds[f].rank);
    EXPECT_EQ(a.folds[f].hyperparameters, b.folds[f].hyperparameters);
  }
}

TEST(NestedClassify, RejectsInconsistentInput) {
  auto d = small_classes(0.9, 6);
  d.labels.reset();
  sdm::ClassifierSpec spec;
  EXPECT_THROW(sdm::nested_cv_classify(d, small_config(1), sndm_pipeline(), spec), std::invalid_argument);
}

sdm::FeatureTable table_of(const Eigen::MatrixXd& x) {
  sdm::FeatureTable t;
  t.ranks = {1};
  t.design = {x};
  return t;
}

sdm::CvConfig regression_config() {
  sdm::CvConfig c;
  c.outer_folds = 5;
  c.inner_folds = 4;
  c.split_rule = SplitRule::TimeSequence;
  c.lambda_grid = {1e-4, 1e-2, 1.0, 1e2, 1e4};
  c.rank_grid = {1};
  c.workers = 2;
  return c;
}

TEST(NestedRegress, RealizableTargets) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd x = random_matrix(100, 6, rng);
  const Eigen::MatrixXd y = x * random_matrix(6, 2, rng);
  const auto report = sdm::nested_cv_regress(table_of(x), y, {}, regression_config());
  EXPECT_GE(report.mean, 0.999);
}

TEST(NestedRegress, IndependentTargetsNearZero) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd x = random_matrix(300, 10, rng);
  const Eigen::MatrixXd y = random_matrix(300, 2, rng);
  const auto report = sdm::nested_cv_regress(table_of(x), y, {}, regression_config());
  EXPECT_LT(std::abs(report.mean), 0.15);
}

TEST(NestedRegress, PerDimensionLambdaMatchesExhaustiveOracle) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const int n = 60;
  const Eigen::MatrixXd x = random_matrix(n, 8, rng);
  const Eigen::VectorXd w = random_matrix(8, 1, rng).col(0);
  Eigen::MatrixXd y(n, 2);
  for (int i = 0; i < n; ++i) {
    y(i, 0) = 0.1 * x.row(i).dot(w) + 3.0 * g(rng);
    y(i, 1) = x.row(i).dot(w) + 0.01 * g(rng);
  }
  const auto config = regression_config();
  const auto report = sdm::nested_cv_regress(table_of(x), y, {}, config);

  std::vector<double> lambdas = config.lambda_grid;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  const auto outer = sdm::make_folds(n, {}, {}, config.outer_folds, SplitRule::TimeSequence, 0);
  ASSERT_EQ(report.folds.size(), static_cast<std::size_t>(config.outer_folds));
  for (const auto& fold : report.folds) {
    const auto train = outer.train_indices(fold.fold);
    const auto inner = sdm::make_folds(train.size(), {}, {}, config.inner_folds, SplitRule::TimeSequence, 0);
    std::vector<double> chosen;
    for (Eigen::Index m = 0; m < 2; ++m) {
      double best = 1e300;
      double arg = 0.0;
      for (double lambda : lambdas) {
        double sse = 0.0;
        for (int jf = 0; jf < config.inner_folds; ++jf) {
          std::vector<Eigen::Index> tr, te;
          for (auto p : inner.train_indices(jf)) tr.push_back(static_cast<Eigen::Index>(train[p]));
          for (auto p : inner.test_indices(jf)) te.push_back(static_cast<Eigen::Index>(train[p]));
          const Eigen::MatrixXd xtr = x(tr, Eigen::all);
          const Eigen::VectorXd ytr = y(tr, m);
          Eigen::MatrixXd aug(xtr.rows(), 9);
          aug << xtr, Eigen::VectorXd::Ones(xtr.rows());
          Eigen::MatrixXd penalty = lambda * Eigen::MatrixXd::Identity(9, 9);
          penalty(8, 8) = 0.0;
          const Eigen::VectorXd theta = (aug.transpose() * aug + penalty).ldlt().solve(aug.transpose() * ytr);
          const Eigen::VectorXd pred = x(te, Eigen::all) * theta.head(8) + Eigen::VectorXd::Constant(te.size(), theta(8));
          sse += (pred - y(te, m)).squaredNorm();
        }
        if (sse < best) {
          best = sse;
          arg = lambda;
        }
      }
      chosen.push_back(arg);
    }
    EXPECT_EQ(fold.hyperparameters, chosen) << "fold " << fold.fold;
    EXPECT_GT(fold.hyperparameters[0], fold.hyperparameters[1]);
  }
}

TEST(NestedRegress, GroupedSplitAndLeakage) {
  sdm::RegressionDatasetOptions o;
  o.trials = 60;
  o.n_groups = 6;
  o.channels = 8;
  o.samples = 80;
  o.seed = 3;
  const auto d = sdm::generate_regression_dataset(o);
  auto config = regression_config();
  config.split_rule = SplitRule::Grouped;
  config.outer_folds = 3;
  config.inner_folds = 2;
  config.rank_grid = {6, 12};
  std::vector<sdm::FitEvent> events;
  const auto report = sdm::nested_cv_regress(d, config, sndm_pipeline(),
                                             [&](const sdm::FitEvent& e) { events.push_back(e); });
  EXPECT_EQ(report.task, "regress");
  for (const auto& e : events)
    for (auto i : e.train) EXPECT_NE(report.assignments[0][i], e.outer_fold);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if ((*d.groups)[i] == (*d.groups)[j]) {
        EXPECT_EQ(report.assignments[0][i], report.assignments[0][j]);
      }
}

TEST(NestedRegress, ImpossibleGroupedSplitFailsUpFront) {
  sdm::RegressionDatasetOptions o;
  o.trials = 30;
  o.n_groups = 5;
  o.channels = 6;
  o.samples = 60;
  const auto d = sdm::generate_regression_dataset(o);
  auto config = regression_config();
  config.split_rule = SplitRule::Grouped;
  config.outer_folds = 5;
  config.inner_folds = 5;
  int fits = 0;
  EXPECT_THROW(sdm::nested_cv_regress(d, config, sndm_pipeline(), [&](const sdm::FitEvent&) { ++fits; }),
               std::invalid_argument);
  EXPECT_EQ(fits, 0);
}

}  // namespace
