#include "toxblend/nn/gcn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include "toxblend/nn/blocks.hpp"
#include "toxblend/nn/mlp.hpp"

namespace toxblend::nn {

namespace {

constexpr std::array<int, 12> kPalette = {6, 7, 8, 16, 9, 17, 35, 53, 15, 5, 14, 34};
constexpr int kDegreeOffset = static_cast<int>(kPalette.size()) + 1;
constexpr int kAromaticOffset = kDegreeOffset + 6;
constexpr int kHydrogenOffset = kAromaticOffset + 1;
static_assert(kHydrogenOffset + 5 == kAtomFeatureWidth);

// Sums the values in ascending order so the result does not depend on the
// order atoms or bonds are listed in.
double ordered_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// (A + I) h: each atom sums itself and its neighbours.
Matrix aggregate(const chem::MolecularGraph& g, const Matrix& h) {
  Matrix out(h.rows(), h.cols());
  std::vector<double> terms;
  for (int a = 0; a < g.atom_count(); ++a) {
    const auto nbs = g.neighbors(a);
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      terms.assign(1, h(a, c));
      for (const auto& nb : nbs) terms.push_back(h(nb.atom, c));
      out(a, c) = ordered_sum(terms);
    }
  }
  return out;
}

Vector column_sums(const Matrix& m) {
  Vector out(m.cols());
  std::vector<double> terms(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) terms[static_cast<std::size_t>(r)] = m(r, c);
    out[c] = ordered_sum(terms);
  }
  return out;
}

Matrix row_softmax(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    out.row(i) = (z.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

template <typename P, typename F>
void for_each_block(P& p, F&& f) {
  for (std::size_t r = 0; r < p.conv.size(); ++r) {
    f(p.conv[r].data(), p.conv[r].size());
    f(p.conv_bias[r].data(), p.conv_bias[r].size());
    f(p.readout[r].data(), p.readout[r].size());
  }
  f(p.head.data(), p.head.size());
  f(p.head_bias.data(), p.head_bias.size());
}

}  // namespace

Matrix atom_features(const chem::MolecularGraph& g) {
  Matrix x = Matrix::Zero(g.atom_count(), kAtomFeatureWidth);
  for (int a = 0; a < g.atom_count(); ++a) {
    const auto& atom = g.atom(a);
    const auto it = std::find(kPalette.begin(), kPalette.end(), atom.atomic_number);
    x(a, static_cast<int>(it - kPalette.begin())) = 1.0;  // end() is the "other" slot
    x(a, kDegreeOffset + std::min(atom.degree, 5)) = 1.0;
    x(a, kAromaticOffset) = atom.aromatic ? 1.0 : 0.0;
    x(a, kHydrogenOffset + std::min(atom.hydrogens, 4)) = 1.0;
  }
  return x;
}

void GcnConfig::validate() const {
  std::vector<std::string> problems;
  if (rounds < 1) problems.push_back("rounds must be >= 1");
  if (hidden < 1) problems.push_back("hidden must be >= 1");
  if (fingerprint < 1) problems.push_back("fingerprint must be >= 1");
  if (batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (!(adam.learning_rate > 0.0)) problems.push_back("learning_rate must be > 0");
  if (max_epochs < 0) problems.push_back("max_epochs must be >= 0");
  if (patience < 1) problems.push_back("patience must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid gcn config:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConfigError(msg);
  }
}

nlohmann::json to_json(const GcnConfig& c) {
  return {{"rounds", c.rounds},
          {"hidden", c.hidden},
          {"fingerprint", c.fingerprint},
          {"batch_size", c.batch_size},
          {"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"epsilon", c.adam.epsilon},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed}};
}

GcnConfig gcn_config_from_json(const nlohmann::json& j) {
  GcnConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "rounds") c.rounds = v.get<int>();
    else if (key == "hidden") c.hidden = v.get<int>();
    else if (key == "fingerprint") c.fingerprint = v.get<int>();
    else if (key == "batch_size") c.batch_size = v.get<int>();
    else if (key == "learning_rate") c.adam.learning_rate = v.get<double>();
    else if (key == "beta1") c.adam.beta1 = v.get<double>();
    else if (key == "beta2") c.adam.beta2 = v.get<double>();
    else if (key == "epsilon") c.adam.epsilon = v.get<double>();
    else if (key == "max_epochs") c.max_epochs = v.get<int>();
    else if (key == "patience") c.patience = v.get<int>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else throw ConfigError("unknown gcn config key '" + key + "'");
  }
  return c;
}

void GcnParams::validate() const {
  if (conv.empty() || conv.size() != conv_bias.size() || conv.size() != readout.size()) {
    throw DataError("gcn round blocks are inconsistent");
  }
  if (conv[0].rows() != kAtomFeatureWidth) throw DataError("gcn input width differs from the atom schema");
  for (std::size_t r = 0; r < conv.size(); ++r) {
    if (r > 0 && conv[r].rows() != conv[r - 1].cols()) throw DataError("gcn round widths disagree");
    if (conv_bias[r].size() != conv[r].cols() || readout[r].rows() != conv[r].cols() ||
        readout[r].cols() != head.rows()) {
      throw DataError("gcn block shapes disagree");
    }
  }
  if (head_bias.size() != head.cols()) throw DataError("gcn head bias width");
  if (!flatten().allFinite()) throw DataError("non-finite gcn parameter");
}

Eigen::Index GcnParams::parameter_count() const {
  Eigen::Index n = 0;
  for_each_block(*this, [&](const double*, Eigen::Index k) { n += k; });
  return n;
}

Vector GcnParams::flatten() const {
  Vector out(parameter_count());
  Eigen::Index pos = 0;
  for_each_block(*this, [&](const double* d, Eigen::Index k) {
    out.segment(pos, k) = Eigen::Map<const Vector>(d, k);
    pos += k;
  });
  return out;
}

void GcnParams::assign(const Vector& flat) {
  if (flat.size() != parameter_count()) throw Error("flat parameter size mismatch");
  Eigen::Index pos = 0;
  for_each_block(*this, [&](double* d, Eigen::Index k) {
    Eigen::Map<Vector>(d, k) = flat.segment(pos, k);
    pos += k;
  });
}

GcnParams init_gcn(int targets, const GcnConfig& config, Rng& rng) {
  config.validate();
  if (targets < 1) throw ConfigError("gcn needs at least one target");
  auto uniform = [&](Eigen::Index rows, Eigen::Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
    return m;
  };
  GcnParams p;
  int width = kAtomFeatureWidth;
  for (int r = 0; r < config.rounds; ++r) {
    p.conv.push_back(uniform(width, config.hidden));
    p.conv_bias.push_back(Vector::Zero(config.hidden));
    p.readout.push_back(uniform(config.hidden, config.fingerprint));
    width = config.hidden;
  }
  p.head = uniform(config.fingerprint, targets);
  p.head_bias = Vector::Zero(targets);
  return p;
}

GcnPass gcn_forward_pass(const GcnParams& p, const chem::MolecularGraph& g) {
  if (g.empty()) throw DataError("empty graph");
  GcnPass pass;
  pass.features = atom_features(g);
  pass.fingerprint = Vector::Zero(p.head.rows());
  const Matrix* h = &pass.features;
  for (int r = 0; r < p.rounds(); ++r) {
    const auto ri = static_cast<std::size_t>(r);
    pass.aggregated.push_back(aggregate(g, *h));
    Matrix z = pass.aggregated.back() * p.conv[ri];
    z.rowwise() += p.conv_bias[ri].transpose();
    pass.hidden.push_back(z.cwiseMax(0.0));
    pass.pre.push_back(std::move(z));
    pass.softmax.push_back(row_softmax(pass.hidden.back() * p.readout[ri]));
    pass.fingerprint += column_sums(pass.softmax.back());
    h = &pass.hidden.back();
  }
  const Vector logits = p.head.transpose() * pass.fingerprint + p.head_bias;
  pass.probs = logits.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return pass;
}

Vector gcn_forward(const GcnParams& p, const chem::MolecularGraph& g) { return gcn_forward_pass(p, g).probs; }

GcnParams gcn_backward(const GcnParams& p, const chem::MolecularGraph& g, const GcnPass& pass, const Vector& dprobs) {
  GcnParams grad;
  const Vector dlogit = dprobs.cwiseProduct(pass.probs.cwiseProduct((1.0 - pass.probs.array()).matrix()));
  grad.head = pass.fingerprint * dlogit.transpose();
  grad.head_bias = dlogit;
  const Vector dfp = p.head * dlogit;

  const int rounds = p.rounds();
  grad.conv.resize(static_cast<std::size_t>(rounds));
  grad.conv_bias.resize(static_cast<std::size_t>(rounds));
  grad.readout.resize(static_cast<std::size_t>(rounds));
  Matrix dh;  // gradient flowing into h^{r+1} from later rounds
  for (int r = rounds; r-- > 0;) {
    const auto ri = static_cast<std::size_t>(r);
    const Matrix& s = pass.softmax[ri];
    // Every atom row of the softmax receives dfp.
    Matrix dq(s.rows(), s.cols());
    for (Eigen::Index a = 0; a < s.rows(); ++a) {
      const double dot = s.row(a).dot(dfp.transpose());
      dq.row(a) = s.row(a).array() * (dfp.transpose().array() - dot);
    }
    grad.readout[ri] = pass.hidden[ri].transpose() * dq;
    Matrix dhidden = dq * p.readout[ri].transpose();
    if (dh.size() > 0) dhidden += dh;
    const Matrix dz = dhidden.cwiseProduct((pass.pre[ri].array() > 0.0).cast<double>().matrix());
    grad.conv[ri] = pass.aggregated[ri].transpose() * dz;
    grad.conv_bias[ri] = dz.colwise().sum().transpose();
    if (r > 0) dh = aggregate(g, dz * p.conv[ri].transpose());
  }
  return grad;
}

double gcn_loss_and_gradient(const GcnParams& p, std::span<const chem::MolecularGraph> graphs, const LabelMatrix& y,
                             GcnParams* grad) {
  if (static_cast<Eigen::Index>(graphs.size()) != y.rows()) throw DataError("graph count differs from label rows");
  std::vector<GcnPass> passes;
  Matrix probs(y.rows(), y.cols());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    passes.push_back(gcn_forward_pass(p, graphs[i]));
    if (passes.back().probs.size() != y.cols()) throw DataError("label width differs from gcn targets");
    probs.row(static_cast<Eigen::Index>(i)) = passes.back().probs.transpose();
  }
  const auto loss = masked_bce(y, probs);
  if (grad != nullptr) {
    Vector acc = Vector::Zero(p.parameter_count());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      const Vector d = loss.grad.row(static_cast<Eigen::Index>(i)).transpose();
      if (d.isZero(0.0)) continue;
      acc += gcn_backward(p, graphs[i], passes[i], d).flatten();
    }
    *grad = p;
    grad->assign(acc);
  }
  return loss.value;
}

namespace {

std::vector<chem::MolecularGraph> pick(std::span<const chem::MolecularGraph> g, std::span<const int> idx) {
  std::vector<chem::MolecularGraph> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(g[static_cast<std::size_t>(i)]);
  return out;
}

double valid_loss(const GcnParams& p, std::span<const chem::MolecularGraph> g, const LabelMatrix& y) {
  return gcn_loss_and_gradient(p, g, y, nullptr);
}

}  // namespace

GcnModel train_gcn(std::span<const chem::MolecularGraph> train, const LabelMatrix& y_train,
                   std::span<const chem::MolecularGraph> valid, const LabelMatrix& y_valid, const GcnConfig& config) {
  config.validate();
  if (static_cast<Eigen::Index>(train.size()) != y_train.rows() ||
      static_cast<Eigen::Index>(valid.size()) != y_valid.rows()) {
    throw DataError("graph count differs from label rows");
  }
  if (y_valid.cols() != y_train.cols()) throw DataError("validation schema differs from training");
  if (!(y_train.array() != Label::Missing).any() || !(y_valid.array() != Label::Missing).any()) {
    throw DataError("empty mask");
  }
  Rng init_rng(derive_seed(config.seed, 0));
  Rng order_rng(derive_seed(config.seed, 1));

  GcnModel m;
  m.config = config;
  m.params = init_gcn(static_cast<int>(y_train.cols()), config, init_rng);
  GcnParams best = m.params;
  double best_loss = valid_loss(m.params, valid, y_valid);
  m.valid_log.push_back(best_loss);

  Vector flat = m.params.flatten();
  Adam adam(flat.size(), config.adam);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(std::span<int>(order));
    double total = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const auto len = std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
      const std::span<const int> idx(order.data() + start, len);
      LabelMatrix yb(static_cast<Eigen::Index>(len), y_train.cols());
      for (std::size_t r = 0; r < len; ++r) yb.row(static_cast<Eigen::Index>(r)) = y_train.row(idx[r]);
      if (!(yb.array() != Label::Missing).any()) continue;
      const auto gb = pick(train, idx);
      GcnParams grad;
      total += gcn_loss_and_gradient(m.params, gb, yb, &grad);
      ++batches;
      adam.step(flat, grad.flatten());
      m.params.assign(flat);
    }
    m.train_log.push_back(batches > 0 ? total / batches : 0.0);
    const double v = valid_loss(m.params, valid, y_valid);
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

Matrix predict_gcn(const GcnModel& m, std::span<const chem::MolecularGraph> graphs) {
  Matrix out(static_cast<Eigen::Index>(graphs.size()), m.params.targets());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = gcn_forward(m.params, graphs[i]).transpose();
  }
  return out;
}

nlohmann::json to_json(const GcnModel& m) {
  nlohmann::json rounds = nlohmann::json::array();
  for (std::size_t r = 0; r < m.params.conv.size(); ++r) {
    rounds.push_back({{"weights", matrix_to_json(m.params.conv[r])},
                      {"bias", vector_to_json(m.params.conv_bias[r])},
                      {"readout", matrix_to_json(m.params.readout[r])}});
  }
  return {{"format", "toxblend-gcn"},
          {"version", 1},
          {"config", to_json(m.config)},
          {"rounds", rounds},
          {"head", {{"weights", matrix_to_json(m.params.head)}, {"bias", vector_to_json(m.params.head_bias)}}},
          {"train_log", m.train_log},
          {"valid_log", m.valid_log},
          {"best_epoch", m.best_epoch}};
}

GcnModel gcn_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "toxblend-gcn") throw DataError("not a toxblend gcn model");
  if (j.at("version").get<int>() != 1) throw DataError("unsupported gcn model version");
  GcnModel m;
  m.config = gcn_config_from_json(j.at("config"));
  for (const auto& r : j.at("rounds")) {
    m.params.conv.push_back(matrix_from_json(r.at("weights")));
    m.params.conv_bias.push_back(vector_from_json(r.at("bias")));
    m.params.readout.push_back(matrix_from_json(r.at("readout")));
  }
  m.params.head = matrix_from_json(j.at("head").at("weights"));
  m.params.head_bias = vector_from_json(j.at("head").at("bias"));
  m.params.validate();
  m.train_log = j.at("train_log").get<std::vector<double>>();
  m.valid_log = j.at("valid_log").get<std::vector<double>>();
  m.best_epoch = j.at("best_epoch").get<int>();
  return m;
}

void save_gcn(const GcnModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << to_json(m).dump() << "\n";
}

GcnModel load_gcn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return gcn_from_json(nlohmann::json::parse(in));
}

}  // namespace toxblend::nn
