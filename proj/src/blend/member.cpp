#include "toxblend/blend/member.hpp"

#include <cmath>
#include <limits>

#include "toxblend/eval/auc.hpp"
#include "toxblend/nn/blocks.hpp"

namespace toxblend::blend {

std::string_view kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Gbm: return "gbm";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Gcn: return "gcn";
  }
  return "?";
}

ModelKind parse_kind(std::string_view name) {
  if (name == "gbm") return ModelKind::Gbm;
  if (name == "mlp") return ModelKind::Mlp;
  if (name == "gcn") return ModelKind::Gcn;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::string MemberRecipe::name() const {
  if (kind == ModelKind::Gcn) return "gcn-graph";
  return std::string(kind_name(kind)) + "-" + std::string(featurize::family_name(family));
}

nlohmann::json to_json(const MemberRecipe& r) {
  nlohmann::json j = {{"kind", std::string(kind_name(r.kind))}};
  if (r.kind != ModelKind::Gcn) j["family"] = std::string(featurize::family_name(r.family));
  switch (r.kind) {
    case ModelKind::Gbm:
      j["gbm"] = gbm::to_json(r.gbm);
      j["eta_grid"] = r.eta_grid;
      break;
    case ModelKind::Mlp: {
      j["mlp"] = nn::to_json(r.mlp);
      nlohmann::json grid = nlohmann::json::array();
      for (const auto& [l, w] : r.architecture_grid) grid.push_back({l, w});
      j["architecture_grid"] = grid;
      break;
    }
    case ModelKind::Gcn:
      j["gcn"] = nn::to_json(r.gcn);
      break;
  }
  return j;
}

MemberRecipe recipe_from_json(const nlohmann::json& j) {
  MemberRecipe r;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") r.kind = parse_kind(v.get<std::string>());
    else if (key == "family") r.family = featurize::parse_family(v.get<std::string>());
    else if (key == "gbm") r.gbm = gbm::gbm_config_from_json(v);
    else if (key == "eta_grid") r.eta_grid = v.get<std::vector<double>>();
    else if (key == "mlp") r.mlp = nn::mlp_config_from_json(v);
    else if (key == "architecture_grid") {
      for (const auto& e : v) r.architecture_grid.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    } else if (key == "gcn") r.gcn = nn::gcn_config_from_json(v);
    else throw ConfigError("unknown member key '" + key + "'");
  }
  if (r.kind == ModelKind::Mlp && r.family == featurize::Family::Fingerprint && !j.contains("mlp")) {
    r.mlp.dropout = nn::kSparseDropout;
  }
  return r;
}

MemberRecipe recipe_from_name(std::string_view name) {
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) throw ConfigError("member name must be <kind>-<family>: " + std::string(name));
  nlohmann::json j = {{"kind", std::string(name.substr(0, dash))}};
  const auto family = name.substr(dash + 1);
  if (family != "graph") j["family"] = std::string(family);
  auto r = recipe_from_json(j);
  if ((r.kind == ModelKind::Gcn) != (family == "graph")) {
    throw ConfigError("gcn members take the graph family and only gcn does: " + std::string(name));
  }
  return r;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const auto n = static_cast<double>(std::max<Eigen::Index>(x.rows(), 1));
  s.mean = x.colwise().sum().transpose() / n;
  s.scale = Vector::Ones(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.mean[c]).square().sum() / n;
    if (var > 0.0) s.scale[c] = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DataError("standardizer width differs from input");
  Matrix out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

double mean_target_auc(const LabelMatrix& y, const Matrix& scores) {
  std::vector<std::optional<double>> aucs;
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    std::vector<Label> labels(static_cast<std::size_t>(y.rows()));
    std::vector<double> s(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      labels[static_cast<std::size_t>(i)] = y(i, t);
      s[static_cast<std::size_t>(i)] = scores(i, t);
    }
    aucs.push_back(eval::roc_auc(labels, s));
  }
  return eval::mean_auc(aucs).mean;
}

namespace {

const Matrix& require_features(const MemberInputs& in, const MemberRecipe& r) {
  if (in.features == nullptr) throw DataError("member " + r.name() + " needs a feature matrix");
  return *in.features;
}

Matrix reshape_stacked(const Vector& p, Eigen::Index rows, Eigen::Index targets) {
  Matrix out(rows, targets);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index t = 0; t < targets; ++t) out(i, t) = p[i * targets + t];
  }
  return out;
}

bool better(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  return std::isnan(incumbent) || candidate > incumbent;
}

}  // namespace

Matrix predict_member(const TrainedMember& m, const MemberInputs& in) {
  switch (m.recipe.kind) {
    case ModelKind::Gbm: {
      const Matrix& x = require_features(in, m.recipe);
      const auto rows = gbm::stack_all(x, m.targets);
      return reshape_stacked(gbm::predict_gbm(std::get<gbm::BoostedModel>(m.model), rows.x), x.rows(), m.targets);
    }
    case ModelKind::Mlp: {
      const Matrix& x = require_features(in, m.recipe);
      const auto& model = std::get<nn::MlpModel>(m.model);
      return m.standardizer ? nn::predict_mlp(model, m.standardizer->apply(x)) : nn::predict_mlp(model, x);
    }
    case ModelKind::Gcn:
      return nn::predict_gcn(std::get<nn::GcnModel>(m.model), in.graphs);
  }
  throw Error("unknown model kind");
}

TrainedMember train_member(const MemberRecipe& recipe, const MemberInputs& train, const LabelMatrix& y_train,
                           const MemberInputs& valid, const LabelMatrix& y_valid, std::uint64_t seed) {
  TrainedMember best;
  best.recipe = recipe;
  best.targets = static_cast<int>(y_train.cols());
  best.selection_auc = std::numeric_limits<double>::quiet_NaN();
  bool have = false;
  auto consider = [&](TrainedMember candidate) {
    candidate.selection_auc = mean_target_auc(y_valid, predict_member(candidate, valid));
    if (!have || better(candidate.selection_auc, best.selection_auc)) {
      best = std::move(candidate);
      have = true;
    }
  };
  switch (recipe.kind) {
    case ModelKind::Gbm: {
      const auto tr = gbm::stack_tasks(require_features(train, recipe), y_train);
      const auto va = gbm::stack_tasks(require_features(valid, recipe), y_valid);
      std::vector<double> etas = recipe.eta_grid.empty() ? std::vector<double>{recipe.gbm.eta} : recipe.eta_grid;
      for (double eta : etas) {
        auto cfg = recipe.gbm;
        cfg.eta = eta;
        TrainedMember c{recipe, best.targets, gbm::train_gbm(tr, cfg, {}, &va), std::nullopt, 0.0};
        c.recipe.gbm.eta = eta;
        consider(std::move(c));
      }
      break;
    }
    case ModelKind::Mlp: {
      const Matrix& xt = require_features(train, recipe);
      std::optional<Standardizer> st;
      if (recipe.family != featurize::Family::Fingerprint) st = Standardizer::fit(xt);
      const Matrix x_tr = st ? st->apply(xt) : xt;
      const Matrix x_va = st ? st->apply(require_features(valid, recipe)) : require_features(valid, recipe);
      auto grid = recipe.architecture_grid;
      if (grid.empty()) grid.emplace_back(recipe.mlp.layers, recipe.mlp.width);
      for (const auto& [layers, width] : grid) {
        auto cfg = recipe.mlp;
        cfg.layers = layers;
        cfg.width = width;
        cfg.seed = seed;
        TrainedMember c{recipe, best.targets, nn::train_mlp(x_tr, y_train, x_va, y_valid, cfg), st, 0.0};
        c.recipe.mlp = cfg;
        consider(std::move(c));
      }
      break;
    }
    case ModelKind::Gcn: {
      auto cfg = recipe.gcn;
      cfg.seed = seed;
      TrainedMember c{recipe, best.targets, nn::train_gcn(train.graphs, y_train, valid.graphs, y_valid, cfg),
                      std::nullopt, 0.0};
      c.recipe.gcn = cfg;
      consider(std::move(c));
      break;
    }
  }
  return best;
}

nlohmann::json to_json(const TrainedMember& m) {
  nlohmann::json j = {{"format", "toxblend-member"},
                      {"version", 1},
                      {"recipe", to_json(m.recipe)},
                      {"targets", m.targets},
                      {"selection_auc", std::isnan(m.selection_auc) ? nlohmann::json() : nlohmann::json(m.selection_auc)}};
  std::visit([&](const auto& model) { j["model"] = to_json(model); }, m.model);
  if (m.standardizer) {
    j["standardizer"] = {{"mean", nn::vector_to_json(m.standardizer->mean)},
                         {"scale", nn::vector_to_json(m.standardizer->scale)}};
  }
  return j;
}

TrainedMember member_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "toxblend-member") throw DataError("not a toxblend member file");
  if (j.at("version").get<int>() != 1) throw DataError("unsupported member version");
  TrainedMember m;
  m.recipe = recipe_from_json(j.at("recipe"));
  m.targets = j.at("targets").get<int>();
  m.selection_auc = j.at("selection_auc").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                    : j.at("selection_auc").get<double>();
  switch (m.recipe.kind) {
    case ModelKind::Gbm: m.model = gbm::gbm_from_json(j.at("model")); break;
    case ModelKind::Mlp: m.model = nn::mlp_from_json(j.at("model")); break;
    case ModelKind::Gcn: m.model = nn::gcn_from_json(j.at("model")); break;
  }
  if (j.contains("standardizer")) {
    m.standardizer = Standardizer{nn::vector_from_json(j["standardizer"].at("mean")),
                                  nn::vector_from_json(j["standardizer"].at("scale"))};
  }
  return m;
}

}  // namespace toxblend::blend
