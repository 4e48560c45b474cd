#include "toxblend/nn/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "../support/gradcheck.hpp"
#include "toxblend/eval/auc.hpp"

namespace toxblend::nn {
namespace {

LabelMatrix random_labels(Rng& rng, Eigen::Index n, Eigen::Index t, double missing) {
  LabelMatrix y(n, t);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y.data()[i] = rng.bernoulli(missing) ? Label::Missing : (rng.bernoulli(0.5) ? Label::Active : Label::Inactive);
  }
  y(0, 0) = Label::Active;
  return y;
}

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

TEST(MaskedBceTest, Examples) {
  LabelMatrix y(1, 2);
  y << Label::Active, Label::Missing;
  Matrix p(1, 2);
  p << 0.5, 0.9;
  const auto l = masked_bce(y, p);
  EXPECT_NEAR(l.value, 0.6931471805599453, 1e-12);
  EXPECT_NEAR(l.grad(0, 0), -2.0, 1e-12);
  EXPECT_EQ(l.grad(0, 1), 0.0);

  LabelMatrix one(1, 1);
  one << Label::Active;
  EXPECT_NEAR(masked_bce(one, Matrix::Constant(1, 1, 1.0 - 1e-7)).value, 0.0, 1e-6);
  EXPECT_TRUE(std::isfinite(masked_bce(one, Matrix::Zero(1, 1)).value));

  LabelMatrix none = LabelMatrix::Constant(2, 2, Label::Missing);
  try {
    masked_bce(none, Matrix::Constant(2, 2, 0.5));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "empty mask");
  }
}

TEST(MaskedBceTest, MatchesScalarLoop) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto y = random_labels(rng, 3, 4, 0.3);
    Matrix p(3, 4);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(0.01, 0.99);
    double sum = 0;
    int count = 0;
    for (int i = 0; i < 3; ++i) {
      for (int t = 0; t < 4; ++t) {
        if (y(i, t) == Label::Missing) continue;
        const double yt = y(i, t) == Label::Active ? 1 : 0;
        sum += -(yt * std::log(p(i, t)) + (1 - yt) * std::log(1 - p(i, t)));
        ++count;
      }
    }
    EXPECT_NEAR(masked_bce(y, p).value, sum / count, 1e-12);
  }
}

TEST(MlpForwardTest, ZeroWeightsGiveHalf) {
  Rng rng(1);
  auto p = init_network(5, 3, 2, 8, rng);
  p.assign(Vector::Zero(p.parameter_count()));
  const Matrix out = forward(p, random_matrix(rng, 4, 5));
  EXPECT_TRUE((out.array() == 0.5).all());
}

TEST(MlpForwardTest, HandComputedNetwork) {
  // One hidden unit per input: h = relu(x W0 + b0), out = sigmoid(h W1 + b1).
  NetworkParams p;
  Matrix w0(2, 2), w1(2, 1);
  w0 << 1, -1, 2, 0.5;
  w1 << 0.5, -1;
  p.weights = {w0, w1};
  p.biases = {(Vector(2) << 0.1, -0.2).finished(), (Vector(1) << 0.3).finished()};
  Matrix x(1, 2);
  x << 1, 2;
  // hidden pre = [1*1+2*2+0.1, 1*-1+2*0.5-0.2] = [5.1, -0.2] -> relu [5.1, 0]
  const double logit = 5.1 * 0.5 + 0.0 * -1 + 0.3;
  EXPECT_NEAR(forward(p, x)(0, 0), 1 / (1 + std::exp(-logit)), 1e-15);
  EXPECT_THROW(forward(p, Matrix::Zero(1, 3)), DataError);
}

TEST(MlpForwardTest, OutputsInUnitInterval) {
  Rng rng(4);
  auto p = init_network(6, 2, 3, 16, rng);
  const Matrix out = forward(p, random_matrix(rng, 50, 6) * 10.0);
  EXPECT_TRUE((out.array() >= 0.0).all() && (out.array() <= 1.0).all());
}

TEST(MlpGradientTest, MatchesFiniteDifferences) {
  Rng rng(99);
  double worst = 0;
  for (int draw = 0; draw < 100; ++draw) {
    auto p = init_network(5, 3, 2, 8, rng);
    // Random biases too: zero biases put dead rows exactly on the ReLU kink.
    Vector flat(p.parameter_count());
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = 0.5 * rng.normal();
    p.assign(flat);
    const Matrix x = random_matrix(rng, 6, 5);
    const auto y = random_labels(rng, 6, 3, 0.3);
    DropoutMasks masks = sample_dropout(p, 6, 0.3, rng);
    const DropoutMasks* mp = draw % 2 == 0 ? nullptr : &masks;
    NetworkParams grad;
    loss_and_gradient(p, x, y, mp, &grad);
    auto f = [&](const Vector& flat) {
      NetworkParams q = p;
      q.assign(flat);
      return loss_and_gradient(q, x, y, mp, nullptr);
    };
    const double err = oracle::relative_error(grad.flatten(), oracle::numeric_gradient(f, p.flatten()));
    worst = std::max(worst, err);
    if (err > 1e-4) ADD_FAILURE() << "draw " << draw << " err " << err;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(MlpGradientTest, MaskedEntriesDoNotMatter) {
  Rng rng(7);
  auto p = init_network(4, 3, 2, 8, rng);
  const Matrix x = random_matrix(rng, 5, 4);
  auto y = random_labels(rng, 5, 3, 0.4);
  const auto pass = forward_pass(p, x);
  Matrix perturbed = pass.probs;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y.data()[i] == Label::Missing) perturbed.data()[i] = rng.uniform(0.01, 0.99);
  }
  const auto a = masked_bce(y, pass.probs);
  const auto b = masked_bce(y, perturbed);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.grad, b.grad);
  const auto ga = backward(p, pass, a.grad);
  ForwardPass pb = pass;
  pb.probs = perturbed;
  const auto gb = backward(p, pb, b.grad);
  EXPECT_EQ(ga.flatten(), gb.flatten());
}

TEST(MlpDropoutTest, TrainModeAveragesToInference) {
  // One hidden layer: the output logit is linear in the dropped activations.
  Rng rng(13);
  auto p = init_network(4, 1, 1, 16, rng);
  const Matrix x = random_matrix(rng, 1, 4);
  NetworkParams logit_net = p;
  auto logit = [&](const DropoutMasks* m) {
    const double q = forward(logit_net, x, m)(0, 0);
    return std::log(q / (1 - q));
  };
  const double reference = logit(nullptr);
  double sum = 0, sum2 = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const auto masks = sample_dropout(p, 1, 0.5, rng);
    const double v = logit(&masks);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - reference), 3 * se);
}

struct Separable {
  Matrix x;
  LabelMatrix y;
};

Separable separable(Rng& rng, int n) {
  Separable s{Matrix(n, 2), LabelMatrix(n, 1)};
  for (int i = 0; i < n; ++i) {
    s.x(i, 0) = rng.uniform(-1, 1);
    s.x(i, 1) = rng.uniform(-1, 1);
    s.y(i, 0) = s.x(i, 0) + 0.5 * s.x(i, 1) > 0.1 ? Label::Active : Label::Inactive;
  }
  return s;
}

MlpConfig small_config() {
  MlpConfig c;
  c.layers = 2;
  c.width = 16;
  c.dropout = 0.0;
  c.batch_size = 32;
  c.adam.learning_rate = 1e-2;
  c.max_epochs = 200;
  c.seed = 5;
  return c;
}

TEST(MlpTrainTest, SeparableTaskReachesHighAuc) {
  Rng rng(21);
  auto train = separable(rng, 300);
  auto valid = separable(rng, 100);
  const auto m = train_mlp(train.x, train.y, valid.x, valid.y, small_config());
  const Matrix p = predict_mlp(m, train.x);
  std::vector<Label> labels(train.y.data(), train.y.data() + train.y.size());
  EXPECT_GE(*eval::roc_auc(labels, std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))), 0.99);
  EXPECT_LE(m.valid_log.size(), 201u);
  // Returned parameters are the best checkpoint.
  const double best = *std::min_element(m.valid_log.begin(), m.valid_log.end());
  EXPECT_DOUBLE_EQ(masked_bce(valid.y, predict_mlp(m, valid.x)).value, best);
  EXPECT_LE(best, m.valid_log.back());
}

TEST(MlpTrainTest, FixedSeedIsBitIdentical) {
  Rng rng(22);
  auto train = separable(rng, 100);
  auto valid = separable(rng, 40);
  auto c = small_config();
  c.max_epochs = 20;
  c.dropout = 0.2;
  const auto a = train_mlp(train.x, train.y, valid.x, valid.y, c);
  const auto b = train_mlp(train.x, train.y, valid.x, valid.y, c);
  EXPECT_EQ(a.params.flatten(), b.params.flatten());
  EXPECT_EQ(a.valid_log, b.valid_log);
  c.seed = 6;
  const auto d = train_mlp(train.x, train.y, valid.x, valid.y, c);
  EXPECT_NE(a.params.flatten(), d.params.flatten());
}

TEST(MlpTrainTest, RejectsBadConfigAndLabels) {
  MlpConfig c;
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = MlpConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  Matrix x = Matrix::Zero(3, 2);
  LabelMatrix none = LabelMatrix::Constant(3, 1, Label::Missing);
  EXPECT_THROW(train_mlp(x, none, x, none, small_config()), DataError);
}

TEST(MlpTrainTest, JsonRoundTrip) {
  Rng rng(23);
  auto train = separable(rng, 60);
  auto c = small_config();
  c.max_epochs = 5;
  const auto m = train_mlp(train.x, train.y, train.x, train.y, c);
  const auto path = std::filesystem::temp_directory_path() / "toxblend_mlp_roundtrip.json";
  save_mlp(m, path.string());
  const auto back = load_mlp(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.params.flatten(), m.params.flatten());
  EXPECT_EQ(predict_mlp(back, train.x), predict_mlp(m, train.x));
  auto j = to_json(m);
  j["layers"][1]["weights"]["rows"] = 3;
  EXPECT_THROW(mlp_from_json(j), DataError);
}

}  // namespace
}  // namespace toxblend::nn
