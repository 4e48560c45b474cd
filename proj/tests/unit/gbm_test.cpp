#include "toxblend/gbm/gbm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "../support/oracles.hpp"
#include "toxblend/eval/auc.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::gbm {
namespace {

StackedRows rows(Matrix x, std::vector<double> y) {
  StackedRows s;
  s.x = std::move(x);
  s.y = Eigen::Map<Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return s;
}

GbmConfig stump_config() {
  GbmConfig c;
  c.max_rounds = 1;
  c.max_depth = 1;
  c.eta = 1.0;
  c.lambda = 0.0;
  c.min_child_hessian = 0.0;
  return c;
}

// Random data whose label depends on the first feature only.
StackedRows informative(Rng& rng, int n, int features, double noise = 0.1) {
  Matrix x(n, features);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < features; ++f) x(i, f) = rng.uniform();
    y[static_cast<std::size_t>(i)] = (x(i, 0) > 0.5) != rng.bernoulli(noise) ? 1.0 : 0.0;
  }
  return rows(x, y);
}

TEST(GbmTest, SeparatingStump) {
  Matrix x(4, 1);
  x << 1, 1, 0, 0;
  const auto m = train_gbm(rows(x, {1, 1, 0, 0}), stump_config());
  ASSERT_EQ(m.trees.size(), 1u);
  EXPECT_DOUBLE_EQ(m.base_score, 0.0);
  const auto& t = m.trees[0];
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.feature[0], 0);
  EXPECT_DOUBLE_EQ(t.threshold[0], 0.5);
  EXPECT_NEAR(t.value[t.left[0]], -2.0, 1e-12);
  EXPECT_NEAR(t.value[t.right[0]], 2.0, 1e-12);
  const Vector p = predict_gbm(m, x);
  EXPECT_NEAR(p[0], 0.8807970779778823, 1e-12);
  EXPECT_NEAR(p[2], 0.11920292202211755, 1e-12);
  EXPECT_NEAR(p[0], 1 / (1 + std::exp(-2.0)), 1e-15);
  const Vector imp = gain_importance(m);
  EXPECT_DOUBLE_EQ(imp[0], 1.0);
}

TEST(GbmTest, ZeroRoundsPredictsPrior) {
  Matrix x(5, 2);
  x.setRandom();
  GbmConfig c;
  c.max_rounds = 0;
  const auto m = train_gbm(rows(x, {1, 0, 0, 0, 1}), c);
  EXPECT_TRUE(m.trees.empty());
  const Vector p = predict_gbm(m, x);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], 0.4, 1e-12);
  EXPECT_EQ(gain_importance(m).sum(), 0.0);
}

TEST(GbmTest, RejectsBadInput) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  EXPECT_THROW(train_gbm(rows(x, {1, 1, 1}), GbmConfig{}), DataError);
  Matrix nan = x;
  nan(1, 0) = std::nan("");
  EXPECT_THROW(train_gbm(rows(nan, {1, 0, 1}), GbmConfig{}), DataError);
  GbmConfig bad;
  bad.eta = 2.0;
  EXPECT_THROW(train_gbm(rows(x, {1, 0, 1}), bad), ConfigError);
  bad = GbmConfig{};
  bad.max_depth = 21;
  EXPECT_THROW(bad.validate(), ConfigError);
  std::vector<int> mono{1, 1};
  EXPECT_THROW(train_gbm(rows(x, {1, 0, 1}), GbmConfig{}, mono), ConfigError);
  const auto m = train_gbm(rows(x, {1, 0, 1}), stump_config());
  EXPECT_THROW(predict_gbm(m, Matrix::Zero(2, 2)), DataError);
}

TEST(GbmTest, MissingValuesFollowLearnedDirection) {
  // Missing rows are all positive; they should join the positive side.
  Matrix x(6, 1);
  const double nan = std::nan("");
  x << 0, 0, 1, 1, nan, nan;
  auto c = stump_config();
  c.allow_missing = true;
  const auto m = train_gbm(rows(x, {0, 0, 1, 1, 1, 1}), c);
  const auto& t = m.trees[0];
  ASSERT_FALSE(t.is_leaf(0));
  EXPECT_FALSE(t.default_left[0]);
  const Vector p = predict_gbm(m, x);
  EXPECT_GT(p[4], 0.5);
  EXPECT_LT(p[0], 0.5);

  x << 0, 0, 1, 1, nan, nan;
  const auto m2 = train_gbm(rows(x, {1, 1, 0, 0, 1, 1}), c);
  EXPECT_TRUE(m2.trees[0].default_left[0]);
}

TEST(GbmTest, StackTasks) {
  Matrix f(2, 2);
  f << 1, 2, 3, 4;
  LabelMatrix l(2, 3);
  l << Label::Active, Label::Missing, Label::Inactive, Label::Inactive, Label::Active, Label::Active;
  const auto s = stack_tasks(f, l);
  ASSERT_EQ(s.x.rows(), 5);
  EXPECT_EQ(s.x.cols(), 3);
  EXPECT_EQ(s.task_feature, 2);
  EXPECT_EQ(s.molecule, (std::vector<int>{0, 0, 1, 1, 1}));
  EXPECT_EQ(s.task, (std::vector<int>{0, 2, 0, 1, 2}));
  EXPECT_EQ(s.x(1, 2), 2.0);
  EXPECT_EQ(s.x(3, 0), 3.0);
  EXPECT_EQ(s.y, (Vector(5) << 1, 0, 0, 1, 1).finished());

  LabelMatrix single(2, 1);
  single << Label::Active, Label::Missing;
  const auto one = stack_tasks(f, single);
  EXPECT_EQ(one.x.rows(), 1);
  EXPECT_EQ(one.task_feature, -1);
  EXPECT_EQ(stack_all(f, 3).x.rows(), 6);
}

TEST(GbmTest, ConstantTaskColumnIsNeverSplit) {
  Rng rng(3);
  auto base = informative(rng, 120, 3);
  StackedRows with = base;
  with.x.conservativeResize(Eigen::NoChange, 4);
  with.x.col(3).setZero();
  GbmConfig c;
  c.max_rounds = 20;
  c.eta = 0.3;
  c.max_depth = 3;
  const auto a = train_gbm(base, c);
  const auto b = train_gbm(with, c);
  const Vector pa = predict_gbm(a, base.x), pb = predict_gbm(b, with.x);
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(gain_importance(b)[3], 0.0);
}

TEST(GbmTest, SplitSearchMatchesBruteForce) {
  Rng rng(20240501);
  int compared = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 4 + static_cast<int>(rng.below(47));
    const int features = 1 + static_cast<int>(rng.below(5));
    const bool discrete = rng.bernoulli(0.5);
    Matrix x(n, features);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int f = 0; f < features; ++f) {
        x(i, f) = discrete ? static_cast<double>(rng.below(6)) - 2.0 : (rng.bernoulli(0.3) ? 0.0 : rng.normal());
      }
      y[static_cast<std::size_t>(i)] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    }
    y[0] = 1.0;
    y[1] = 0.0;
    GbmConfig c;
    c.max_depth = 1 + static_cast<int>(rng.below(3));
    c.max_rounds = 1 + static_cast<int>(rng.below(3));
    c.eta = 0.3;
    c.lambda = rng.bernoulli(0.5) ? 1.0 : 0.0;
    c.min_child_hessian = rng.bernoulli(0.5) ? 0.0 : 0.5;
    std::vector<int> mono;
    if (rng.bernoulli(0.5)) {
      for (int f = 0; f < features; ++f) mono.push_back(static_cast<int>(rng.below(3)) - 1);
    }
    const auto data = rows(x, y);
    const auto m = train_gbm(data, c, mono);
    oracle::BruteForceGbm brute(x, c, mono);
    const auto trees = brute.boost(data.y, c.max_rounds);
    ASSERT_EQ(m.trees.size(), trees.size());
    for (std::size_t t = 0; t < trees.size(); ++t) {
      ASSERT_TRUE(oracle::same_tree(m.trees[t], 0, *trees[t], 1e-9)) << "instance " << inst << " tree " << t;
      ++compared;
    }
  }
  EXPECT_GE(compared, 200);
}

TEST(GbmTest, TrainingLossNonIncreasing) {
  for (double eta : kShrinkageGrid) {
    Rng rng(11);
    auto d = informative(rng, 200, 4, 0.2);
    GbmConfig c;
    c.max_rounds = 60;
    c.eta = eta;
    const auto m = train_gbm(d, c);
    ASSERT_EQ(m.train_log.size(), 61u);
    for (std::size_t r = 1; r < m.train_log.size(); ++r) EXPECT_LE(m.train_log[r], m.train_log[r - 1] + 1e-12);
  }
}

TEST(GbmTest, EarlyStoppingReturnsBestPrefix) {
  Rng rng(5);
  auto train = informative(rng, 150, 3, 0.3);
  auto valid = informative(rng, 100, 3, 0.3);
  GbmConfig c;
  c.max_rounds = 400;
  c.eta = 0.3;
  c.max_depth = 4;
  c.patience = 10;
  const auto m = train_gbm(train, c, {}, &valid);
  const auto best = std::min_element(m.valid_log.begin(), m.valid_log.end()) - m.valid_log.begin();
  EXPECT_EQ(static_cast<std::ptrdiff_t>(m.trees.size()), best);
  EXPECT_LT(m.valid_log.size(), 401u);
  EXPECT_NEAR(log_loss(valid.y, predict_gbm(m, valid.x)), m.valid_log[static_cast<std::size_t>(best)], 1e-12);
}

TEST(GbmTest, EarlyStoppingCanKeepZeroTrees) {
  // Validation labels are the reverse of training ones, so every tree hurts.
  Matrix x(40, 1);
  std::vector<double> y(40), yv(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i;
    y[static_cast<std::size_t>(i)] = i < 20 ? 0.0 : 1.0;
    yv[static_cast<std::size_t>(i)] = 1.0 - y[static_cast<std::size_t>(i)];
  }
  GbmConfig c;
  c.eta = 0.1;
  c.patience = 5;
  const auto v = rows(x, yv);
  const auto m = train_gbm(rows(x, y), c, {}, &v);
  EXPECT_TRUE(m.trees.empty());
  EXPECT_EQ(m.valid_log.size(), 6u);
}

TEST(GbmTest, AucStopMetric) {
  Rng rng(8);
  auto train = informative(rng, 150, 3, 0.2);
  auto valid = informative(rng, 100, 3, 0.2);
  GbmConfig c;
  c.max_rounds = 100;
  c.eta = 0.3;
  c.stop_metric = StopMetric::Auc;
  c.patience = 10;
  const auto m = train_gbm(train, c, {}, &valid);
  const auto best = std::max_element(m.valid_log.begin(), m.valid_log.end()) - m.valid_log.begin();
  EXPECT_EQ(static_cast<std::ptrdiff_t>(m.trees.size()), best);
}

TEST(GbmTest, MonotoneProbes) {
  for (int dir : {1, -1}) {
    Rng rng(static_cast<std::uint64_t>(40 + dir));
    const int n = 400;
    Matrix x(n, 3);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      for (int f = 0; f < 3; ++f) x(i, f) = rng.uniform();
      // Non-monotone truth in feature 0 so the constraint has to bind.
      const double z = std::sin(6 * x(i, 0)) + x(i, 1) - 0.5;
      y[static_cast<std::size_t>(i)] = rng.bernoulli(1 / (1 + std::exp(-3 * z))) ? 1.0 : 0.0;
    }
    std::vector<int> mono{dir, 0, 0};
    GbmConfig c;
    c.max_rounds = 80;
    c.eta = 0.3;
    c.max_depth = 5;
    c.min_child_hessian = 0.1;
    const auto m = train_gbm(rows(x, y), c, mono);
    Matrix a(10000, 3), b(10000, 3);
    for (int k = 0; k < 10000; ++k) {
      for (int f = 0; f < 3; ++f) a(k, f) = b(k, f) = rng.uniform(-0.2, 1.2);
      const double u = rng.uniform(-0.2, 1.2), v = rng.uniform(-0.2, 1.2);
      a(k, 0) = std::min(u, v);
      b(k, 0) = std::max(u, v);
    }
    const Vector pa = predict_gbm(m, a), pb = predict_gbm(m, b);
    int violations = 0;
    for (int k = 0; k < 10000; ++k) violations += dir * (pb[k] - pa[k]) < 0 ? 1 : 0;
    EXPECT_EQ(violations, 0) << "direction " << dir;
  }
}

TEST(GbmTest, InformativeFeatureRanksFirstByGain) {
  int first = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(static_cast<std::uint64_t>(1000 + seed));
    auto d = informative(rng, 200, 5, 0.15);
    GbmConfig c;
    c.max_rounds = 30;
    c.eta = 0.1;
    c.max_depth = 3;
    const Vector imp = gain_importance(train_gbm(d, c));
    Eigen::Index top;
    imp.maxCoeff(&top);
    first += top == 0 ? 1 : 0;
    EXPECT_NEAR(imp.sum(), 1.0, 1e-12);
  }
  EXPECT_GE(first, 95);
}

TEST(GbmTest, BatchMatchesRowByRow) {
  Rng rng(9);
  auto d = informative(rng, 100, 3);
  GbmConfig c;
  c.max_rounds = 15;
  c.eta = 0.2;
  const auto m = train_gbm(d, c);
  const Vector all = predict_gbm(m, d.x);
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    Matrix one = d.x.row(i);
    EXPECT_EQ(predict_gbm(m, one)[0], all[i]);
  }
}

TEST(GbmTest, JsonRoundTrip) {
  Rng rng(12);
  auto d = informative(rng, 80, 3);
  GbmConfig c;
  c.max_rounds = 10;
  c.eta = 0.2;
  c.allow_missing = true;
  std::vector<int> mono{1, 0, -1};
  auto m = train_gbm(d, c, mono);
  m.feature_names = {"a", "b", "c"};
  const auto path = std::filesystem::temp_directory_path() / "toxblend_gbm_roundtrip.json";
  save_gbm(m, path.string());
  const auto back = load_gbm(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.monotone, mono);
  EXPECT_EQ(back.feature_names, m.feature_names);
  EXPECT_EQ(back.config.allow_missing, true);
  EXPECT_EQ(predict_gbm(back, d.x), predict_gbm(m, d.x));
  EXPECT_EQ(to_json(back), to_json(m));

  auto j = to_json(m);
  j["trees"][0]["left"][0] = 0;
  EXPECT_THROW(gbm_from_json(j), DataError);
  j = to_json(m);
  j["version"] = 2;
  EXPECT_THROW(gbm_from_json(j), DataError);
  EXPECT_THROW(gbm_config_from_json({{"etaa", 0.1}}), ConfigError);
}

}  // namespace
}  // namespace toxblend::gbm
