#include "toxblend/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "toxblend/log.hpp"
#include "toxblend/nn/blocks.hpp"

namespace toxblend::nn {

LossValue masked_bce(const LabelMatrix& y, const Matrix& yhat) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols()) throw DataError("label and prediction shapes differ");
  LossValue out;
  out.grad = Matrix::Zero(yhat.rows(), yhat.cols());
  long count = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index t = 0; t < y.cols(); ++t) count += is_known(y(i, t)) ? 1 : 0;
  }
  if (count == 0) throw DataError("empty mask");
  const double inv = 1.0 / static_cast<double>(count);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index t = 0; t < y.cols(); ++t) {
      if (!is_known(y(i, t))) continue;
      const double raw = yhat(i, t);
      const double p = std::clamp(raw, kProbEpsilon, 1.0 - kProbEpsilon);
      const bool inside = raw == p;
      if (y(i, t) == Label::Active) {
        out.value -= std::log(p) * inv;
        if (inside) out.grad(i, t) = -inv / p;
      } else {
        out.value -= std::log(1.0 - p) * inv;
        if (inside) out.grad(i, t) = inv / (1.0 - p);
      }
    }
  }
  return out;
}

void MlpConfig::validate() const {
  std::vector<std::string> problems;
  if (layers < 1) problems.push_back("layers must be >= 1");
  if (width < 1) problems.push_back("width must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) problems.push_back("dropout must lie in [0, 1)");
  if (batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (!(adam.learning_rate > 0.0)) problems.push_back("learning_rate must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    problems.push_back("beta1 and beta2 must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) problems.push_back("epsilon must be > 0");
  if (max_epochs < 0) problems.push_back("max_epochs must be >= 0");
  if (patience < 1) problems.push_back("patience must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid mlp config:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConfigError(msg);
  }
}

nlohmann::json to_json(const MlpConfig& c) {
  return {{"layers", c.layers},
          {"width", c.width},
          {"dropout", c.dropout},
          {"batch_size", c.batch_size},
          {"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"epsilon", c.adam.epsilon},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed}};
}

MlpConfig mlp_config_from_json(const nlohmann::json& j) {
  MlpConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "layers") c.layers = v.get<int>();
    else if (key == "width") c.width = v.get<int>();
    else if (key == "dropout") c.dropout = v.get<double>();
    else if (key == "batch_size") c.batch_size = v.get<int>();
    else if (key == "learning_rate") c.adam.learning_rate = v.get<double>();
    else if (key == "beta1") c.adam.beta1 = v.get<double>();
    else if (key == "beta2") c.adam.beta2 = v.get<double>();
    else if (key == "epsilon") c.adam.epsilon = v.get<double>();
    else if (key == "max_epochs") c.max_epochs = v.get<int>();
    else if (key == "patience") c.patience = v.get<int>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else throw ConfigError("unknown mlp config key '" + key + "'");
  }
  return c;
}

void NetworkParams::validate() const {
  if (weights.empty() || weights.size() != biases.size()) throw DataError("network has no layers");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].cols() != biases[l].size()) throw DataError("bias width differs from layer width");
    if (l > 0 && weights[l].rows() != weights[l - 1].cols()) throw DataError("consecutive layer sizes disagree");
    if (!weights[l].allFinite() || !biases[l].allFinite()) throw DataError("non-finite network parameter");
  }
}

Eigen::Index NetworkParams::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Vector NetworkParams::flatten() const {
  Vector out(parameter_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.segment(k, weights[l].size()) = Eigen::Map<const Vector>(weights[l].data(), weights[l].size());
    k += weights[l].size();
    out.segment(k, biases[l].size()) = biases[l];
    k += biases[l].size();
  }
  return out;
}

void NetworkParams::assign(const Vector& flat) {
  if (flat.size() != parameter_count()) throw Error("flat parameter size mismatch");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::Map<Vector>(weights[l].data(), weights[l].size()) = flat.segment(k, weights[l].size());
    k += weights[l].size();
    biases[l] = flat.segment(k, biases[l].size());
    k += biases[l].size();
  }
}

NetworkParams init_network(int inputs, int outputs, int layers, int width, Rng& rng) {
  if (inputs < 1 || outputs < 1) throw ConfigError("network needs at least one input and one output");
  NetworkParams p;
  int fan_in = inputs;
  for (int l = 0; l <= layers; ++l) {
    const int fan_out = l == layers ? outputs : width;
    const double limit = std::sqrt(6.0 / fan_in);
    Matrix w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Vector::Zero(fan_out));
    fan_in = fan_out;
  }
  return p;
}

DropoutMasks sample_dropout(const NetworkParams& p, Eigen::Index rows, double rate, Rng& rng) {
  DropoutMasks masks;
  const double keep = 1.0 / (1.0 - rate);
  for (int l = 0; l < p.hidden_layers(); ++l) {
    Matrix m(rows, p.weights[static_cast<std::size_t>(l)].cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.bernoulli(rate) ? 0.0 : keep;
    masks.push_back(std::move(m));
  }
  return masks;
}

ForwardPass forward_pass(const NetworkParams& p, const Matrix& x, const DropoutMasks* masks) {
  if (x.cols() != p.input_dim()) {
    throw DataError("input width " + std::to_string(x.cols()) + " differs from network input " +
                    std::to_string(p.input_dim()));
  }
  if (masks != nullptr && static_cast<int>(masks->size()) != p.hidden_layers()) throw DataError("dropout mask count");
  ForwardPass f;
  Matrix h = x;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    Matrix z = h * p.weights[l];
    z.rowwise() += p.biases[l].transpose();
    f.inputs.push_back(std::move(h));
    if (l + 1 == p.weights.size()) {
      f.probs = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      break;
    }
    h = z.cwiseMax(0.0);
    if (masks != nullptr) h = h.cwiseProduct((*masks)[l]);
    f.pre.push_back(std::move(z));
  }
  return f;
}

Matrix forward(const NetworkParams& p, const Matrix& x, const DropoutMasks* masks) {
  return forward_pass(p, x, masks).probs;
}

NetworkParams backward(const NetworkParams& p, const ForwardPass& pass, const Matrix& dprobs,
                       const DropoutMasks* masks) {
  NetworkParams g;
  g.weights.resize(p.weights.size());
  g.biases.resize(p.biases.size());
  Matrix delta = dprobs.cwiseProduct(pass.probs.cwiseProduct((1.0 - pass.probs.array()).matrix()));
  for (std::size_t l = p.weights.size(); l-- > 0;) {
    g.weights[l] = pass.inputs[l].transpose() * delta;
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix dh = delta * p.weights[l].transpose();
    if (masks != nullptr) dh = dh.cwiseProduct((*masks)[l - 1]);
    const Matrix& z = pass.pre[l - 1];
    delta = dh.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  }
  return g;
}

double loss_and_gradient(const NetworkParams& p, const Matrix& x, const LabelMatrix& y, const DropoutMasks* masks,
                         NetworkParams* grad) {
  const auto pass = forward_pass(p, x, masks);
  const auto loss = masked_bce(y, pass.probs);
  if (grad != nullptr) *grad = backward(p, pass, loss.grad, masks);
  return loss.value;
}

namespace {

LabelMatrix rows_of(const LabelMatrix& y, std::span<const int> idx) {
  LabelMatrix out(static_cast<Eigen::Index>(idx.size()), y.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = y.row(idx[r]);
  return out;
}

Matrix rows_of(const Matrix& x, std::span<const int> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(idx[r]);
  return out;
}

bool any_known(const LabelMatrix& y) {
  return (y.array() != Label::Missing).any();
}

}  // namespace

MlpModel train_mlp(const Matrix& x_train, const LabelMatrix& y_train, const Matrix& x_valid,
                   const LabelMatrix& y_valid, const MlpConfig& config) {
  config.validate();
  if (x_train.rows() != y_train.rows() || x_valid.rows() != y_valid.rows()) {
    throw DataError("feature and label row counts differ");
  }
  if (x_valid.cols() != x_train.cols() || y_valid.cols() != y_train.cols()) {
    throw DataError("validation schema differs from training");
  }
  if (!any_known(y_train)) throw DataError("empty mask");
  if (!any_known(y_valid)) throw DataError("empty mask");

  Rng init_rng(derive_seed(config.seed, 0));
  Rng order_rng(derive_seed(config.seed, 1));
  Rng drop_rng(derive_seed(config.seed, 2));

  MlpModel m;
  m.config = config;
  m.params = init_network(static_cast<int>(x_train.cols()), static_cast<int>(y_train.cols()), config.layers,
                          config.width, init_rng);
  NetworkParams best = m.params;
  double best_loss = masked_bce(y_valid, forward(m.params, x_valid)).value;
  m.valid_log.push_back(best_loss);

  Vector flat = m.params.flatten();
  Adam adam(flat.size(), config.adam);
  std::vector<int> order(static_cast<std::size_t>(x_train.rows()));
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(std::span<int>(order));
    double total = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const auto len = std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
      const std::span<const int> idx(order.data() + start, len);
      const LabelMatrix yb = rows_of(y_train, idx);
      if (!any_known(yb)) continue;
      const Matrix xb = rows_of(x_train, idx);
      DropoutMasks masks;
      const bool use_dropout = config.dropout > 0.0;
      if (use_dropout) masks = sample_dropout(m.params, xb.rows(), config.dropout, drop_rng);
      NetworkParams grad;
      total += loss_and_gradient(m.params, xb, yb, use_dropout ? &masks : nullptr, &grad);
      ++batches;
      adam.step(flat, grad.flatten());
      m.params.assign(flat);
    }
    m.train_log.push_back(batches > 0 ? total / batches : 0.0);
    const double v = masked_bce(y_valid, forward(m.params, x_valid)).value;
    m.valid_log.push_back(v);
    if (v < best_loss) {
      best_loss = v;
      best = m.params;
      m.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  m.params = std::move(best);
  return m;
}

Matrix predict_mlp(const MlpModel& m, const Matrix& x) { return forward(m.params, x); }

nlohmann::json params_to_json(const NetworkParams& p) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    layers.push_back({{"weights", matrix_to_json(p.weights[l])}, {"bias", vector_to_json(p.biases[l])}});
  }
  return layers;
}

NetworkParams params_from_json(const nlohmann::json& j) {
  NetworkParams p;
  for (const auto& layer : j) {
    p.weights.push_back(matrix_from_json(layer.at("weights")));
    p.biases.push_back(vector_from_json(layer.at("bias")));
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const MlpModel& m) {
  return {{"format", "toxblend-mlp"},   {"version", 1},
          {"config", to_json(m.config)}, {"layers", params_to_json(m.params)},
          {"train_log", m.train_log},    {"valid_log", m.valid_log},
          {"best_epoch", m.best_epoch}};
}

MlpModel mlp_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "toxblend-mlp") throw DataError("not a toxblend mlp model");
  if (j.at("version").get<int>() != 1) throw DataError("unsupported mlp model version");
  MlpModel m;
  m.config = mlp_config_from_json(j.at("config"));
  m.params = params_from_json(j.at("layers"));
  m.train_log = j.at("train_log").get<std::vector<double>>();
  m.valid_log = j.at("valid_log").get<std::vector<double>>();
  m.best_epoch = j.at("best_epoch").get<int>();
  return m;
}

void save_mlp(const MlpModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << to_json(m).dump() << "\n";
}

MlpModel load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return mlp_from_json(nlohmann::json::parse(in));
}

}  // namespace toxblend::nn
