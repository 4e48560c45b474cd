#include "toxblend/gbm/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "toxblend/eval/auc.hpp"
#include "toxblend/log.hpp"

namespace toxblend::gbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

struct Stats {
  double g = 0.0;
  double h = 0.0;
  int n = 0;

  Stats& operator+=(const Stats& o) {
    g += o.g;
    h += o.h;
    n += o.n;
    return *this;
  }
  friend Stats operator+(Stats a, const Stats& b) { return a += b; }
  friend Stats operator-(Stats a, const Stats& b) {
    a.g -= b.g;
    a.h -= b.h;
    a.n -= b.n;
    return a;
  }
};

struct Bounds {
  double lo = -kInf;
  double hi = kInf;
};

double raw_weight(const Stats& s, double lambda) {
  const double d = s.h + lambda;
  return d > 0.0 ? -s.g / d : 0.0;
}

double weight(const Stats& s, double lambda, const Bounds& b) {
  return std::clamp(raw_weight(s, lambda), b.lo, b.hi);
}

// Objective reduction of a leaf holding weight w; equals G^2/(H+lambda) at
// the unconstrained optimum.
double score(const Stats& s, double lambda, double w) {
  const double d = s.h + lambda;
  if (d <= 0.0) return 0.0;
  if (w == raw_weight(s, lambda)) return s.g * s.g / d;
  return -(2.0 * s.g * w + d * w * w);
}

struct Candidate {
  bool valid = false;
  double gain = -kInf;
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
  Stats left, right;
  double wl = 0.0, wr = 0.0;
};

bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Candidates arrive in ascending (feature, threshold) order, so a later one
// replaces the incumbent only when clearly better.
bool improves(const Candidate& c, const Candidate& best) {
  if (!best.valid) return true;
  return c.gain > best.gain && !ties(c.gain, best.gain);
}

struct ColumnEntry {
  double value;
  int row;
};

struct Column {
  std::vector<ColumnEntry> nonzero;  // sorted by (value, row)
  std::vector<int> missing;
};

std::vector<Column> build_columns(const Matrix& x, bool allow_missing) {
  std::vector<Column> cols(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto& c = cols[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (std::isnan(v)) {
        if (!allow_missing) {
          throw DataError("NaN feature at row " + std::to_string(i) + ", column " + std::to_string(j));
        }
        c.missing.push_back(static_cast<int>(i));
      } else if (std::isinf(v)) {
        throw DataError("infinite feature at row " + std::to_string(i) + ", column " + std::to_string(j));
      } else if (v != 0.0) {
        c.nonzero.push_back({v, static_cast<int>(i)});
      }
    }
    std::sort(c.nonzero.begin(), c.nonzero.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
      return a.value < b.value || (a.value == b.value && a.row < b.row);
    });
  }
  return cols;
}

struct NodeBuild {
  Stats stats;
  Bounds bounds;
  int depth = 0;
};

struct ScanState {
  Stats left;
  double last = 0.0;
  bool has_last = false;
  bool zero_done = false;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<Column>& cols, const GbmConfig& cfg, std::span<const int> monotone,
              const std::vector<double>& g, const std::vector<double>& h)
      : x_(x), cols_(cols), cfg_(cfg), monotone_(monotone), g_(g), h_(h) {}

  // Returns the tree and writes the leaf reached by each training row.
  Tree build(std::vector<int>& leaf_of_row) {
    const int n = static_cast<int>(x_.rows());
    Tree t;
    std::vector<NodeBuild> info;
    Stats root;
    for (int i = 0; i < n; ++i) root += Stats{g_[i], h_[i], 1};
    add_node(t, info, NodeBuild{root, Bounds{}, 0});

    std::vector<int> level{0};           // tree node per slot
    std::vector<int> slot(static_cast<std::size_t>(n), 0);  // slot per row, -1 once settled
    leaf_of_row.assign(static_cast<std::size_t>(n), 0);

    while (!level.empty()) {
      const int depth = info[static_cast<std::size_t>(level[0])].depth;
      std::vector<Candidate> best(level.size());
      if (depth < cfg_.max_depth) {
        for (std::size_t f = 0; f < cols_.size(); ++f) scan_feature(static_cast<int>(f), level, info, slot, best);
      }
      std::vector<int> next;
      std::vector<int> child_slot(level.size() * 2, -1);
      for (std::size_t s = 0; s < level.size(); ++s) {
        const int node = level[s];
        const auto& c = best[s];
        if (!c.valid) {
          finalize_leaf(t, info, node);
          continue;
        }
        const auto b = info[static_cast<std::size_t>(node)].bounds;
        Bounds lb = b, rb = b;
        const int dir = monotone_.empty() ? 0 : monotone_[static_cast<std::size_t>(c.feature)];
        if (dir != 0) {
          const double mid = (c.wl + c.wr) / 2.0;
          if (dir > 0) {
            lb.hi = mid;
            rb.lo = mid;
          } else {
            lb.lo = mid;
            rb.hi = mid;
          }
        }
        const int l = add_node(t, info, NodeBuild{c.left, lb, depth + 1});
        const int r = add_node(t, info, NodeBuild{c.right, rb, depth + 1});
        const int ns = node;
        t.feature[static_cast<std::size_t>(ns)] = c.feature;
        t.threshold[static_cast<std::size_t>(ns)] = c.threshold;
        t.default_left[static_cast<std::size_t>(ns)] = c.missing_left;
        t.left[static_cast<std::size_t>(ns)] = l;
        t.right[static_cast<std::size_t>(ns)] = r;
        t.gain[static_cast<std::size_t>(ns)] = c.gain;
        child_slot[2 * s] = static_cast<int>(next.size());
        next.push_back(l);
        child_slot[2 * s + 1] = static_cast<int>(next.size());
        next.push_back(r);
      }
      for (int i = 0; i < n; ++i) {
        const int s = slot[static_cast<std::size_t>(i)];
        if (s < 0) continue;
        const int node = level[static_cast<std::size_t>(s)];
        if (t.is_leaf(node)) {
          leaf_of_row[static_cast<std::size_t>(i)] = node;
          slot[static_cast<std::size_t>(i)] = -1;
          continue;
        }
        const double v = x_(i, t.feature[static_cast<std::size_t>(node)]);
        const bool go_left = std::isnan(v) ? t.default_left[static_cast<std::size_t>(node)]
                                           : v < t.threshold[static_cast<std::size_t>(node)];
        slot[static_cast<std::size_t>(i)] = child_slot[2 * static_cast<std::size_t>(s) + (go_left ? 0 : 1)];
      }
      level = std::move(next);
    }
    return t;
  }

 private:
  int add_node(Tree& t, std::vector<NodeBuild>& info, const NodeBuild& nb) {
    t.feature.push_back(-1);
    t.threshold.push_back(0.0);
    t.default_left.push_back(true);
    t.left.push_back(-1);
    t.right.push_back(-1);
    t.value.push_back(weight(nb.stats, cfg_.lambda, nb.bounds));
    t.gain.push_back(0.0);
    t.cover.push_back(nb.stats.h);
    info.push_back(nb);
    return static_cast<int>(t.size()) - 1;
  }

  void finalize_leaf(Tree& t, const std::vector<NodeBuild>& info, int node) {
    const auto& nb = info[static_cast<std::size_t>(node)];
    t.value[static_cast<std::size_t>(node)] = weight(nb.stats, cfg_.lambda, nb.bounds);
  }

  void evaluate(int f, double threshold, const NodeBuild& node, const Stats& left, const Stats& missing,
                Candidate& best) {
    const Stats right_base = node.stats - left - missing;
    const int dir = monotone_.empty() ? 0 : monotone_[static_cast<std::size_t>(f)];
    const double w_parent = weight(node.stats, cfg_.lambda, node.bounds);
    const double parent = score(node.stats, cfg_.lambda, w_parent);
    auto consider = [&](const Stats& l, const Stats& r, bool missing_left) -> std::optional<Candidate> {
      if (l.h < cfg_.min_child_hessian || r.h < cfg_.min_child_hessian) return std::nullopt;
      if (l.n == 0 || r.n == 0) return std::nullopt;
      const double wl = weight(l, cfg_.lambda, node.bounds);
      const double wr = weight(r, cfg_.lambda, node.bounds);
      if ((dir > 0 && wl > wr) || (dir < 0 && wl < wr)) return std::nullopt;
      Candidate c;
      c.valid = true;
      const double sl = score(l, cfg_.lambda, wl), sr = score(r, cfg_.lambda, wr);
      c.gain = 0.5 * (sl + sr - parent);
      // Gains at rounding level are not splits.
      const double noise = 1e-12 * (std::abs(sl) + std::abs(sr) + std::abs(parent));
      if (!(c.gain > cfg_.min_split_gain + noise)) return std::nullopt;
      c.feature = f;
      c.threshold = threshold;
      c.missing_left = missing_left;
      c.left = l;
      c.right = r;
      c.wl = wl;
      c.wr = wr;
      return c;
    };
    std::optional<Candidate> pick = consider(left + missing, right_base, true);
    if (missing.n > 0) {
      auto alt = consider(left, right_base + missing, false);
      if (alt && (!pick || improves(*alt, *pick))) pick = alt;
    }
    if (pick && improves(*pick, best)) best = *pick;
  }

  void scan_feature(int f, const std::vector<int>& level, const std::vector<NodeBuild>& info,
                    const std::vector<int>& slot, std::vector<Candidate>& best) {
    const auto& col = cols_[static_cast<std::size_t>(f)];
    const std::size_t k = level.size();
    std::vector<Stats> nonzero(k), missing(k);
    for (const auto& e : col.nonzero) {
      const int s = slot[static_cast<std::size_t>(e.row)];
      if (s >= 0) nonzero[static_cast<std::size_t>(s)] += Stats{g_[e.row], h_[e.row], 1};
    }
    for (int r : col.missing) {
      const int s = slot[static_cast<std::size_t>(r)];
      if (s >= 0) missing[static_cast<std::size_t>(s)] += Stats{g_[r], h_[r], 1};
    }
    std::vector<ScanState> st(k);
    auto node_of = [&](std::size_t s) -> const NodeBuild& { return info[static_cast<std::size_t>(level[s])]; };
    auto push = [&](std::size_t s, double v, const Stats& add) {
      auto& state = st[s];
      if (state.has_last && v != state.last) {
        double thr = state.last + (v - state.last) / 2.0;
        if (!(thr > state.last)) thr = v;
        evaluate(f, thr, node_of(s), state.left, missing[s], best[s]);
      }
      state.left += add;
      state.last = v;
      state.has_last = true;
    };
    auto push_zero = [&](std::size_t s) {
      st[s].zero_done = true;
      const Stats zero = node_of(s).stats - nonzero[s] - missing[s];
      if (zero.n > 0) push(s, 0.0, zero);
    };
    for (const auto& e : col.nonzero) {
      const int si = slot[static_cast<std::size_t>(e.row)];
      if (si < 0) continue;
      const auto s = static_cast<std::size_t>(si);
      if (e.value > 0.0 && !st[s].zero_done) push_zero(s);
      push(s, e.value, Stats{g_[e.row], h_[e.row], 1});
    }
    for (std::size_t s = 0; s < k; ++s) {
      if (!st[s].zero_done) push_zero(s);
    }
  }

  const Matrix& x_;
  const std::vector<Column>& cols_;
  const GbmConfig& cfg_;
  std::span<const int> monotone_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
};

double metric_value(StopMetric metric, const Vector& y, const Vector& p) {
  if (metric == StopMetric::LogLoss) return log_loss(y, p);
  std::vector<int> labels(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) labels[static_cast<std::size_t>(i)] = y[i] > 0.5 ? 1 : 0;
  const auto auc = eval::roc_auc(labels, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  if (!auc) throw DataError("validation AUC undefined: validation labels hold one class");
  return *auc;
}

bool metric_better(StopMetric metric, double candidate, double incumbent) {
  return metric == StopMetric::LogLoss ? candidate < incumbent : candidate > incumbent;
}

std::string_view metric_name(StopMetric m) { return m == StopMetric::LogLoss ? "logloss" : "auc"; }

}  // namespace

void GbmConfig::validate() const {
  std::vector<std::string> problems;
  if (max_rounds < 0 || max_rounds > 20000) problems.push_back("max_rounds must lie in [0, 20000]");
  if (max_depth < 0 || max_depth > 20) problems.push_back("max_depth must lie in [0, 20]");
  if (!(eta > 0.0 && eta <= 1.0)) problems.push_back("eta must lie in (0, 1]");
  if (!(lambda >= 0.0)) problems.push_back("lambda must be >= 0");
  if (!(min_child_hessian >= 0.0)) problems.push_back("min_child_hessian must be >= 0");
  if (!(min_split_gain >= 0.0)) problems.push_back("min_split_gain must be >= 0");
  if (patience < 1) problems.push_back("patience must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid gbm config:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConfigError(msg);
  }
}

nlohmann::json to_json(const GbmConfig& c) {
  return {{"max_rounds", c.max_rounds},         {"max_depth", c.max_depth},
          {"eta", c.eta},                       {"lambda", c.lambda},
          {"min_child_hessian", c.min_child_hessian}, {"min_split_gain", c.min_split_gain},
          {"patience", c.patience},             {"stop_metric", std::string(metric_name(c.stop_metric))},
          {"allow_missing", c.allow_missing}};
}

GbmConfig gbm_config_from_json(const nlohmann::json& j) {
  GbmConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "max_rounds") c.max_rounds = value.get<int>();
    else if (key == "max_depth") c.max_depth = value.get<int>();
    else if (key == "eta") c.eta = value.get<double>();
    else if (key == "lambda") c.lambda = value.get<double>();
    else if (key == "min_child_hessian") c.min_child_hessian = value.get<double>();
    else if (key == "min_split_gain") c.min_split_gain = value.get<double>();
    else if (key == "patience") c.patience = value.get<int>();
    else if (key == "allow_missing") c.allow_missing = value.get<bool>();
    else if (key == "stop_metric") {
      const auto s = value.get<std::string>();
      if (s == "logloss") c.stop_metric = StopMetric::LogLoss;
      else if (s == "auc") c.stop_metric = StopMetric::Auc;
      else throw ConfigError("unknown stop_metric '" + s + "'");
    } else {
      throw ConfigError("unknown gbm config key '" + key + "'");
    }
  }
  return c;
}

StackedRows stack_tasks(const Matrix& features, const LabelMatrix& labels) {
  if (features.rows() != labels.rows()) throw DataError("feature rows differ from label rows");
  const bool with_task = labels.cols() > 1;
  StackedRows out;
  std::vector<std::pair<int, int>> pairs;
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    for (Eigen::Index t = 0; t < labels.cols(); ++t) {
      if (is_known(labels(i, t))) pairs.emplace_back(static_cast<int>(i), static_cast<int>(t));
    }
  }
  const auto cols = features.cols() + (with_task ? 1 : 0);
  out.x.resize(static_cast<Eigen::Index>(pairs.size()), cols);
  out.y.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [i, t] = pairs[r];
    const auto row = static_cast<Eigen::Index>(r);
    out.x.row(row).head(features.cols()) = features.row(i);
    if (with_task) out.x(row, features.cols()) = t;
    out.y[row] = labels(i, t) == Label::Active ? 1.0 : 0.0;
    out.molecule.push_back(i);
    out.task.push_back(t);
  }
  out.task_feature = with_task ? static_cast<int>(features.cols()) : -1;
  return out;
}

StackedRows stack_all(const Matrix& features, int targets) {
  LabelMatrix all = LabelMatrix::Constant(features.rows(), targets, Label::Inactive);
  return stack_tasks(features, all);
}

int Tree::leaf(std::span<const double> row) const {
  int n = 0;
  while (feature[static_cast<std::size_t>(n)] >= 0) {
    const auto i = static_cast<std::size_t>(n);
    const double v = row[static_cast<std::size_t>(feature[i])];
    const bool go_left = std::isnan(v) ? default_left[i] : v < threshold[i];
    n = go_left ? left[i] : right[i];
  }
  return n;
}

double log_loss(const Vector& y, const Vector& p) {
  if (y.size() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
    s -= y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
  }
  return s / static_cast<double>(y.size());
}

BoostedModel train_gbm(const StackedRows& train, const GbmConfig& config, std::span<const int> monotone,
                       const StackedRows* valid) {
  config.validate();
  const auto n = train.x.rows();
  if (n < 2) throw DataError("need at least 2 rows to train");
  if (train.y.size() != n) throw DataError("label count differs from row count");
  if (!monotone.empty() && static_cast<Eigen::Index>(monotone.size()) != train.x.cols()) {
    throw ConfigError("monotone spec length differs from feature count");
  }
  for (int d : monotone) {
    if (d < -1 || d > 1) throw ConfigError("monotone directions must be -1, 0 or +1");
  }
  const double positives = train.y.sum();
  if (positives == 0.0 || positives == static_cast<double>(n)) throw DataError("training labels hold a single class");
  if (valid != nullptr && valid->x.cols() != train.x.cols()) throw DataError("validation schema differs from training");

  BoostedModel m;
  m.config = config;
  m.feature_count = static_cast<int>(train.x.cols());
  m.task_feature = train.task_feature;
  m.monotone.assign(monotone.begin(), monotone.end());
  if (m.monotone.empty()) m.monotone.assign(static_cast<std::size_t>(m.feature_count), 0);
  const double prior = positives / static_cast<double>(n);
  m.base_score = std::log(prior / (1.0 - prior));

  const auto cols = build_columns(train.x, config.allow_missing);
  if (valid != nullptr && !config.allow_missing && valid->x.hasNaN()) throw DataError("NaN in validation features");

  Vector margin = Vector::Constant(n, m.base_score);
  Vector valid_margin;
  if (valid != nullptr) valid_margin = Vector::Constant(valid->x.rows(), m.base_score);
  auto probs = [](const Vector& mg) { return mg.unaryExpr([](double v) { return sigmoid(v); }).eval(); };

  m.train_log.push_back(log_loss(train.y, probs(margin)));
  std::size_t best_rounds = 0;
  double best_metric = 0.0;
  if (valid != nullptr) {
    best_metric = metric_value(config.stop_metric, valid->y, probs(valid_margin));
    m.valid_log.push_back(best_metric);
  }

  std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
  std::vector<int> leaf_of_row;
  int since_best = 0;
  for (int round = 0; round < config.max_rounds; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[static_cast<std::size_t>(i)] = p - train.y[i];
      h[static_cast<std::size_t>(i)] = p * (1.0 - p);
    }
    TreeBuilder builder(train.x, cols, config, m.monotone, g, h);
    Tree tree = builder.build(leaf_of_row);
    for (Eigen::Index i = 0; i < n; ++i) {
      margin[i] += config.eta * tree.value[static_cast<std::size_t>(leaf_of_row[static_cast<std::size_t>(i)])];
    }
    m.train_log.push_back(log_loss(train.y, probs(margin)));
    if (valid != nullptr) {
      for (Eigen::Index i = 0; i < valid->x.rows(); ++i) {
        valid_margin[i] += config.eta * tree.predict(std::span<const double>(valid->x.row(i).data(),
                                                                              static_cast<std::size_t>(valid->x.cols())));
      }
    }
    m.trees.push_back(std::move(tree));
    if (valid == nullptr) continue;
    const double v = metric_value(config.stop_metric, valid->y, probs(valid_margin));
    m.valid_log.push_back(v);
    if (metric_better(config.stop_metric, v, best_metric)) {
      best_metric = v;
      best_rounds = m.trees.size();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (valid != nullptr) m.trees.resize(best_rounds);
  return m;
}

Vector predict_margin(const BoostedModel& m, const Matrix& x) {
  if (x.cols() != m.feature_count) {
    throw DataError("feature schema mismatch: model expects " + std::to_string(m.feature_count) + " columns, got " +
                    std::to_string(x.cols()));
  }
  if (!m.config.allow_missing && x.hasNaN()) throw DataError("NaN feature in prediction input");
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const std::span<const double> row(x.row(i).data(), static_cast<std::size_t>(x.cols()));
    double s = 0.0;
    for (const auto& t : m.trees) s += t.predict(row);
    out[i] = m.base_score + m.config.eta * s;
  }
  return out;
}

Vector predict_gbm(const BoostedModel& m, const Matrix& x) {
  return predict_margin(m, x).unaryExpr([](double v) { return sigmoid(v); });
}

Vector gain_importance(const BoostedModel& m) {
  Vector imp = Vector::Zero(m.feature_count);
  for (const auto& t : m.trees) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.feature[i] >= 0) imp[t.feature[i]] += t.gain[i];
    }
  }
  const double total = imp.sum();
  if (total > 0.0) imp /= total;
  return imp;
}

nlohmann::json to_json(const BoostedModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    std::vector<int> dl(t.default_left.begin(), t.default_left.end());
    trees.push_back({{"feature", t.feature},
                     {"threshold", t.threshold},
                     {"default_left", dl},
                     {"left", t.left},
                     {"right", t.right},
                     {"value", t.value},
                     {"gain", t.gain},
                     {"cover", t.cover}});
  }
  return {{"format", "toxblend-gbm"},
          {"version", 1},
          {"config", to_json(m.config)},
          {"base_score", m.base_score},
          {"feature_count", m.feature_count},
          {"task_feature", m.task_feature},
          {"monotone", m.monotone},
          {"feature_names", m.feature_names},
          {"train_log", m.train_log},
          {"valid_log", m.valid_log},
          {"trees", trees}};
}

BoostedModel gbm_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "toxblend-gbm") throw DataError("not a toxblend gbm model");
  if (j.at("version").get<int>() != 1) throw DataError("unsupported gbm model version");
  BoostedModel m;
  m.config = gbm_config_from_json(j.at("config"));
  m.base_score = j.at("base_score").get<double>();
  m.feature_count = j.at("feature_count").get<int>();
  m.task_feature = j.at("task_feature").get<int>();
  m.monotone = j.at("monotone").get<std::vector<int>>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.train_log = j.at("train_log").get<std::vector<double>>();
  m.valid_log = j.at("valid_log").get<std::vector<double>>();
  for (const auto& jt : j.at("trees")) {
    Tree t;
    t.feature = jt.at("feature").get<std::vector<int>>();
    t.threshold = jt.at("threshold").get<std::vector<double>>();
    for (int v : jt.at("default_left").get<std::vector<int>>()) t.default_left.push_back(v != 0);
    t.left = jt.at("left").get<std::vector<int>>();
    t.right = jt.at("right").get<std::vector<int>>();
    t.value = jt.at("value").get<std::vector<double>>();
    t.gain = jt.at("gain").get<std::vector<double>>();
    t.cover = jt.at("cover").get<std::vector<double>>();
    const auto sz = t.feature.size();
    if (t.threshold.size() != sz || t.default_left.size() != sz || t.left.size() != sz || t.right.size() != sz ||
        t.value.size() != sz || sz == 0) {
      throw DataError("malformed tree in gbm model");
    }
    for (std::size_t i = 0; i < sz; ++i) {
      if (t.feature[i] < 0) continue;
      if (t.feature[i] >= m.feature_count || t.left[i] <= static_cast<int>(i) || t.right[i] <= static_cast<int>(i) ||
          t.left[i] >= static_cast<int>(sz) || t.right[i] >= static_cast<int>(sz)) {
        throw DataError("malformed tree in gbm model");
      }
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

void save_gbm(const BoostedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << to_json(m).dump(1) << "\n";
}

BoostedModel load_gbm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return gbm_from_json(nlohmann::json::parse(in));
}

}  // namespace toxblend::gbm
