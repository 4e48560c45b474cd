#include "toxblend/blend/blend.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "toxblend/blend/bundle.hpp"
#include "toxblend/blend/member.hpp"
#include "toxblend/dataset/synthetic.hpp"
#include "toxblend/eval/auc.hpp"
#include "toxblend/log.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::blend {
namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

TEST(PredictionAverage, Examples) {
  const std::vector<double> three{0.2, 0.4, 0.6};
  EXPECT_NEAR(prediction_average(three), 0.4, 1e-15);
  const std::vector<double> one{0.37};
  EXPECT_EQ(prediction_average(one), 0.37);
  EXPECT_THROW(prediction_average(std::span<const double>{}), DataError);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> s(1 + rng.below(6));
    for (auto& x : s) x = rng.uniform();
    const double m = prediction_average(s);
    EXPECT_GE(m, *std::min_element(s.begin(), s.end()) - 1e-15);
    EXPECT_LE(m, *std::max_element(s.begin(), s.end()) + 1e-15);
  }
}

TEST(PredictionAverage, MatrixForm) {
  std::vector<Matrix> s{column({0.2, 1.0}), column({0.4, 0.0}), column({0.6, 0.5})};
  const Matrix m = prediction_average(s);
  EXPECT_NEAR(m(0, 0), 0.4, 1e-15);
  EXPECT_NEAR(m(1, 0), 0.5, 1e-15);
  s[1](0, 0) = std::nan("");
  EXPECT_THROW(prediction_average(s), DataError);
  s[1](0, 0) = 1.5;
  EXPECT_THROW(prediction_average(s), DataError);
  s.pop_back();
  s.push_back(Matrix::Zero(3, 1));
  EXPECT_THROW(prediction_average(s), DataError);
}

struct LabelAndNoise {
  std::vector<Matrix> scores;
  LabelMatrix labels;
};

// Member A is the label itself, member B uniform noise; two targets.
LabelAndNoise label_and_noise(int n, std::uint64_t seed) {
  Rng rng(seed);
  LabelAndNoise d;
  d.labels.resize(n, 2);
  Matrix a(n, 2), b(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < 2; ++t) {
      const bool y = rng.bernoulli(0.4);
      d.labels(i, t) = rng.bernoulli(0.1) ? Label::Missing : (y ? Label::Active : Label::Inactive);
      a(i, t) = y ? 1.0 : 0.0;
      b(i, t) = rng.uniform();
    }
  }
  d.scores = {a, b};
  return d;
}

double blend_auc(const Matrix& pred, const LabelMatrix& labels) {
  double sum = 0.0;
  for (Eigen::Index t = 0; t < labels.cols(); ++t) {
    std::vector<Label> l(labels.col(t).begin(), labels.col(t).end());
    std::vector<double> s(pred.col(t).begin(), pred.col(t).end());
    sum += eval::roc_auc(l, s).value();
  }
  return sum / static_cast<double>(labels.cols());
}

TEST(Blend, LabelMemberDominatesNoise) {
  const auto valid = label_and_noise(600, 1);
  const auto test = label_and_noise(600, 2);
  BlendConfig cfg;
  cfg.seed = 5;
  const auto model = train_blend(valid.scores, valid.labels, {"label", "noise"}, cfg);
  EXPECT_EQ(model.model.monotone, (std::vector<int>{1, 1, 0}));
  EXPECT_GE(blend_auc(predict_blend(model, test.scores), test.labels), 0.99);
}

TEST(Blend, SingleMemberKeepsRanking) {
  Rng rng(9);
  const int n = 800;
  LabelMatrix y(n, 1);
  Matrix s(n, 1);
  for (int i = 0; i < n; ++i) {
    s(i, 0) = rng.uniform();
    y(i, 0) = rng.bernoulli(s(i, 0)) ? Label::Active : Label::Inactive;
  }
  const std::vector<Matrix> scores{s};
  const auto model = train_blend(scores, y, {"only"}, BlendConfig{});
  const Matrix p = predict_blend(model, scores);
  // Monotone in the single input: every pair keeps its order or ties.
  for (int i = 0; i + 1 < n; ++i) {
    if (s(i, 0) < s(i + 1, 0)) EXPECT_LE(p(i, 0), p(i + 1, 0));
  }
}

TEST(Blend, MonotoneProbes) {
  const auto valid = label_and_noise(500, 11);
  auto scores = valid.scores;
  Rng nudge(12);
  for (auto& m : scores) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::clamp(0.7 * m.data()[i] + 0.3 * nudge.uniform(), 0.0, 1.0);
  }
  BlendConfig cfg;
  cfg.gbm.max_depth = 4;
  const auto model = train_blend(scores, valid.labels, {"a", "b"}, cfg);
  Rng rng(13);
  int violations = 0;
  for (int f = 0; f < 2; ++f) {
    for (int probe = 0; probe < 10000; ++probe) {
      std::vector<Matrix> lo{Matrix(1, 2), Matrix(1, 2)};
      for (auto& m : lo) m << rng.uniform(), rng.uniform();
      auto hi = lo;
      const int t = static_cast<int>(rng.below(2));
      hi[static_cast<std::size_t>(f)](0, t) = rng.uniform(lo[static_cast<std::size_t>(f)](0, t), 1.0);
      if (predict_blend(model, hi)(0, t) < predict_blend(model, lo)(0, t)) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Blend, JsonRoundTripAndValidation) {
  const auto valid = label_and_noise(300, 21);
  const auto model = train_blend(valid.scores, valid.labels, {"a", "b"}, BlendConfig{});
  const auto back = blend_from_json(nlohmann::json::parse(to_json(model).dump()));
  EXPECT_EQ(back.members, model.members);
  const Matrix p = predict_blend(model, valid.scores), q = predict_blend(back, valid.scores);
  EXPECT_EQ((p - q).cwiseAbs().maxCoeff(), 0.0);

  auto j = to_json(model);
  j["model"]["monotone"][0] = 0;
  EXPECT_THROW(blend_from_json(j), DataError);
  std::vector<Matrix> one{valid.scores[0]};
  EXPECT_THROW(predict_blend(model, one), DataError);
}

TEST(Correlation, Examples) {
  Rng rng(31);
  const int n = 10000;
  LabelMatrix y = LabelMatrix::Constant(n, 2, Label::Inactive);
  Matrix a(n, 2), b(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < 2; ++t) {
      a(i, t) = rng.uniform();
      b(i, t) = rng.uniform();
    }
  }
  const std::vector<Matrix> s{a, Matrix(Matrix::Ones(n, 2) - a), b};
  const auto c = correlation_matrix(s, y);
  EXPECT_NEAR(c.rho(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(c.rho(0, 1), -1.0, 1e-12);
  EXPECT_LT(std::abs(c.rho(0, 2)), 0.05);
  EXPECT_NEAR(c.rho(2, 0), c.rho(0, 2), 1e-15);
}

TEST(Correlation, ConstantVectorExcludedWithWarning) {
  LabelMatrix y = LabelMatrix::Constant(4, 2, Label::Active);
  y(3, 0) = Label::Missing;
  Matrix a(4, 2), b(4, 2);
  a << 0.1, 0.5, 0.2, 0.5, 0.3, 0.5, 0.9, 0.5;
  b << 0.3, 0.1, 0.2, 0.2, 0.1, 0.3, 0.0, 0.4;
  log::WarningCapture warnings;
  const std::vector<Matrix> s{a, b};
  const auto c = correlation_matrix(s, y);
  EXPECT_FALSE(warnings.warnings().empty());
  EXPECT_NEAR(c.rho(0, 1), -1.0, 1e-12);  // target 1 dropped, row 3 of target 0 masked
  EXPECT_EQ(c.excluded[1], 1);
}

class BundleTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dataset::SyntheticOptions o;
    o.molecules = 300;
    o.seed = 4;
    table_ = new dataset::AssayTable(dataset::synthetic_table(o));
  }
  static void TearDownTestSuite() { delete table_; }

  static Bundle make_bundle() {
    const auto smiles = table_->smiles();
    Bundle b;
    b.featurizers = build_featurizers(smiles);
    FeatureCache cache(b.featurizers, table_->graphs(), smiles);
    std::vector<int> tr, va;
    for (int i = 0; i < table_->molecule_count(); ++i) (i % 4 == 0 ? va : tr).push_back(i);
    const Matrix& x = cache.matrix(featurize::Family::Fingerprint);
    const Matrix xtr = take_rows(x, tr), xva = take_rows(x, va);
    const auto ytr = take_rows(table_->labels(), tr), yva = take_rows(table_->labels(), va);
    std::vector<chem::MolecularGraph> gtr, gva;
    for (int i : tr) gtr.push_back(table_->graphs()[static_cast<std::size_t>(i)]);
    for (int i : va) gva.push_back(table_->graphs()[static_cast<std::size_t>(i)]);
    auto recipe = recipe_from_name("gbm-fingerprint");
    recipe.gbm.max_rounds = 30;
    recipe.gbm.eta = 0.3;
    b.members.push_back(train_member(recipe, {&xtr, gtr}, ytr, {&xva, gva}, yva, 1));
    auto recipe2 = recipe;
    recipe2.family = featurize::Family::Pld;
    const Matrix& p = cache.matrix(featurize::Family::Pld);
    const Matrix ptr = take_rows(p, tr), pva = take_rows(p, va);
    b.members.push_back(train_member(recipe2, {&ptr, gtr}, ytr, {&pva, gva}, yva, 2));
    std::vector<Matrix> vs{predict_member(b.members[0], {&xva, gva}), predict_member(b.members[1], {&pva, gva})};
    b.blend = train_blend(vs, yva, {b.members[0].recipe.name(), b.members[1].recipe.name()}, BlendConfig{});
    for (const auto& t : table_->targets()) b.targets.push_back({t.name, t.family, "0.875000"});
    for (int i : tr) b.reference.push_back(cache.fingerprints()[static_cast<std::size_t>(i)]);
    b.reliability_threshold = reliability_threshold(b.reference, b.knn_k);
    b.config_checksum = "abc123";
    b.eval_report = "target\tauc\n";
    return b;
  }

  static dataset::AssayTable* table_;
};

dataset::AssayTable* BundleTest::table_ = nullptr;

TEST_F(BundleTest, SaveLoadPredict) {
  const auto b = make_bundle();
  const auto dir = (std::filesystem::temp_directory_path() / "toxblend_bundle_test").string();
  std::filesystem::remove_all(dir);
  save_bundle(b, dir);
  const auto loaded = load_bundle(dir);
  EXPECT_EQ(loaded.targets.size(), 3u);
  EXPECT_EQ(loaded.config_checksum, "abc123");
  EXPECT_EQ(loaded.reference.size(), b.reference.size());

  const std::vector<std::string> in{"CCO", "C1CC", "c1ccccc1Cl"};
  const auto p = predict_bundle(b, in), q = predict_bundle(loaded, in);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0].canonical, "CCO");
  EXPECT_EQ(p[0].targets.size(), 3u);
  EXPECT_TRUE(p[1].targets.empty());
  EXPECT_EQ(p[1].error.value_or(""), "unmatched ring closure");
  for (std::size_t i = 0; i < p.size(); ++i) {
    ASSERT_EQ(p[i].targets.size(), q[i].targets.size());
    for (std::size_t t = 0; t < p[i].targets.size(); ++t) {
      const auto& a = p[i].targets[t];
      EXPECT_EQ(a.score, q[i].targets[t].score);
      EXPECT_GE(a.score, 0.0);
      EXPECT_LE(a.score, 1.0);
      EXPECT_EQ(a.reliable, a.distance <= b.reliability_threshold);
      EXPECT_EQ(a.cv_auc.value(), "0.875000");
    }
  }
  const std::vector<int> only{2};
  EXPECT_EQ(predict_bundle(loaded, in, only)[0].targets.at(0).target, "SYN-halogen");

  // A training molecule sits at distance zero from the reference set.
  const std::vector<std::string> own{table_->smiles()[1]};
  EXPECT_LE(predict_bundle(loaded, own)[0].targets[0].distance, b.reliability_threshold);
}

TEST_F(BundleTest, TamperingIsDetected) {
  const auto b = make_bundle();
  const auto dir = std::filesystem::temp_directory_path() / "toxblend_bundle_tamper";
  std::filesystem::remove_all(dir);
  save_bundle(b, dir.string());
  const auto sum = bundle_checksum(dir.string());
  EXPECT_EQ(sum.size(), 64u);
  {
    std::ofstream out(dir / "blend.json", std::ios::app);
    out << " ";
  }
  EXPECT_THROW(load_bundle(dir.string()), DataError);
  save_bundle(b, dir.string());
  EXPECT_EQ(bundle_checksum(dir.string()), sum);
  {
    std::ofstream out(dir / "manifest.json", std::ios::app);
    out << " ";
  }
  EXPECT_THROW(load_bundle(dir.string()), DataError);
  EXPECT_THROW(load_bundle((dir / "missing").string()), DataError);
}

TEST(ReliabilityThreshold, Quantile) {
  std::vector<featurize::BitVector> fps{featurize::BitVector::from_string("1100"),
                                        featurize::BitVector::from_string("1100"),
                                        featurize::BitVector::from_string("0011")};
  // LOO 1-NN distances: 0, 0, 1 -> 90th percentile interpolates to 0.8.
  EXPECT_NEAR(reliability_threshold(fps, 1, 0.9), 0.8, 1e-12);
  EXPECT_NEAR(reliability_threshold(fps, 1, 0.0), 0.0, 1e-12);
  EXPECT_THROW(reliability_threshold(std::span(fps).first(1), 1), DataError);
}

}  // namespace
}  // namespace toxblend::blend
