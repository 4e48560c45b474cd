#include "toxblend/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "toxblend/checksum.hpp"

namespace toxblend::cli {

using nlohmann::json;

json default_config() {
  return json::parse(R"({
    "dataset": {"format": "csv", "path": "", "name": "dataset", "smiles_column": "smiles", "id_column": "",
                "targets": [], "synthetic": {"molecules": 2000, "missing_rate": 0.1, "label_noise": 0.02, "seed": 0}},
    "features": ["pld", "fingerprint", "ngram"],
    "ngram": {"n_max": 4, "min_count": 5},
    "split": {"strategies": ["random"], "fractions": {"train": 0.8, "valid": 0.1, "test": 0.1}},
    "seeds": [0],
    "members": ["mlp-pld", "mlp-fingerprint", "mlp-ngram", "gbm-pld", "gbm-fingerprint", "gbm-ngram", "gcn-graph"],
    "blend": {"enabled": true, "holdout": 0.2, "gbm": {}},
    "reliability": {"knn_k": 5, "thresholds": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], "complexity_buckets": 4},
    "importance": {"member": "gbm-pld", "k": [0, 5, 10], "folds": 5, "features": []},
    "output": "out"
  })");
}

namespace {

// Objects below these paths are free-form and validated by their own parsers.
bool opaque(const std::string& path) { return path == "blend.gbm"; }

void unknown_keys(const json& user, const json& defaults, const std::string& prefix, std::vector<std::string>& problems) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) {
      problems.push_back("unknown key '" + path + "'");
      continue;
    }
    const auto& d = defaults.at(it.key());
    if (d.is_object() && !opaque(path)) {
      if (!it.value().is_object()) {
        problems.push_back("'" + path + "' must be an object");
      } else {
        unknown_keys(it.value(), d, path, problems);
      }
    }
  }
}

void apply_override(json& cfg, const std::string& text, std::vector<std::string>& problems) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    problems.push_back("override must be key=value: '" + text + "'");
    return;
  }
  const std::string key = text.substr(0, eq), raw = text.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &cfg;
  std::istringstream parts(key);
  std::vector<std::string> path;
  for (std::string p; std::getline(parts, p, '.');) path.push_back(p);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object() || !node->contains(path[i])) {
      problems.push_back("override of unknown key '" + key + "'");
      return;
    }
    node = &(*node)[path[i]];
  }
  if (!node->is_object() || (!node->contains(path.back()) && !opaque(key.substr(0, key.rfind('.'))))) {
    problems.push_back("override of unknown key '" + key + "'");
    return;
  }
  if (node->contains(path.back()) && (*node)[path.back()].is_object()) {
    problems.push_back("override of non-scalar key '" + key + "'");
    return;
  }
  (*node)[path.back()] = value;
}

template <typename F>
void guarded(const std::string& what, std::vector<std::string>& problems, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    problems.push_back(what + ": " + e.what());
  } catch (const json::exception& e) {
    problems.push_back(what + ": wrong type (" + std::string(e.what()) + ")");
  }
}

}  // namespace

RunConfig resolve_config(const json& user, const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
  std::vector<std::string> problems;
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  const json defaults = default_config();
  unknown_keys(user, defaults, "", problems);
  json cfg = defaults;
  cfg.merge_patch(user);
  for (const auto& o : overrides) apply_override(cfg, o, problems);
  if (seed) cfg["seeds"] = json::array({*seed});

  RunConfig rc;
  guarded("dataset", problems, [&] {
    const auto& d = cfg.at("dataset");
    rc.dataset.format = d.at("format").get<std::string>();
    rc.dataset.path = d.at("path").get<std::string>();
    rc.dataset.name = d.at("name").get<std::string>();
    rc.dataset.layout.smiles_column = d.at("smiles_column").get<std::string>();
    rc.dataset.layout.id_column = d.at("id_column").get<std::string>();
    rc.dataset.layout.target_columns = d.at("targets").get<std::vector<std::string>>();
    const auto& s = d.at("synthetic");
    rc.dataset.synthetic.molecules = s.at("molecules").get<int>();
    rc.dataset.synthetic.missing_rate = s.at("missing_rate").get<double>();
    rc.dataset.synthetic.label_noise = s.at("label_noise").get<double>();
    rc.dataset.synthetic.seed = s.at("seed").get<std::uint64_t>();
    if (rc.dataset.format != "csv" && rc.dataset.format != "table" && rc.dataset.format != "synthetic") {
      throw ConfigError("format must be csv, table or synthetic");
    }
    if (rc.dataset.format == "synthetic") {
      if (rc.dataset.synthetic.molecules < 10) throw ConfigError("synthetic.molecules must be at least 10");
    } else if (rc.dataset.path.empty()) {
      throw ConfigError("path is required");
    } else if (!std::filesystem::exists(rc.dataset.path)) {
      throw ConfigError("path does not exist: " + rc.dataset.path);
    }
  });
  guarded("features", problems, [&] {
    for (const auto& f : cfg.at("features")) rc.features.push_back(featurize::parse_family(f.get<std::string>()));
  });
  guarded("ngram", problems, [&] {
    rc.ngram.n_max = cfg.at("ngram").at("n_max").get<int>();
    rc.ngram.min_count = cfg.at("ngram").at("min_count").get<int>();
    if (rc.ngram.n_max < 1 || rc.ngram.min_count < 1) throw ConfigError("n_max and min_count must be positive");
  });
  guarded("split", problems, [&] {
    for (const auto& s : cfg.at("split").at("strategies")) rc.strategies.push_back(dataset::parse_strategy(s.get<std::string>()));
    if (rc.strategies.empty()) throw ConfigError("strategies must not be empty");
    const auto& f = cfg.at("split").at("fractions");
    rc.fractions = {f.at("train").get<double>(), f.at("valid").get<double>(), f.at("test").get<double>()};
    rc.fractions.validate();
  });
  guarded("seeds", problems, [&] {
    rc.seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    if (rc.seeds.empty()) throw ConfigError("seeds must not be empty");
  });
  guarded("members", problems, [&] {
    const auto& ms = cfg.at("members");
    if (!ms.is_array() || ms.empty()) throw ConfigError("at least one member is required");
    for (const auto& m : ms) {
      guarded("member " + m.dump(), problems, [&] {
        rc.members.push_back(m.is_string() ? blend::recipe_from_name(m.get<std::string>()) : blend::recipe_from_json(m));
      });
    }
  });
  guarded("blend", problems, [&] {
    const auto& b = cfg.at("blend");
    rc.blend = b.at("enabled").get<bool>();
    rc.blend_config = blend::blend_config_from_json({{"holdout", b.at("holdout")}, {"gbm", b.at("gbm")}});
    if (!(rc.blend_config.holdout > 0.0 && rc.blend_config.holdout < 1.0)) throw ConfigError("holdout must lie in (0, 1)");
    rc.blend_config.gbm.validate();
  });
  guarded("reliability", problems, [&] {
    const auto& r = cfg.at("reliability");
    rc.knn_k = r.at("knn_k").get<int>();
    rc.thresholds = r.at("thresholds").get<std::vector<double>>();
    rc.complexity_buckets = r.at("complexity_buckets").get<int>();
    if (rc.knn_k < 1) throw ConfigError("knn_k must be at least 1");
    if (rc.complexity_buckets < 1) throw ConfigError("complexity_buckets must be at least 1");
    for (double t : rc.thresholds) {
      if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in [0, 1]");
    }
  });
  guarded("importance", problems, [&] {
    const auto& i = cfg.at("importance");
    rc.importance.member = i.at("member").get<std::string>();
    rc.importance.k = i.at("k").get<std::vector<int>>();
    rc.importance.folds = i.at("folds").get<int>();
    rc.importance.features = i.at("features").get<std::vector<std::string>>();
    const auto recipe = blend::recipe_from_name(rc.importance.member);
    if (recipe.kind == blend::ModelKind::Gcn) throw ConfigError("importance needs a member with a feature matrix");
    if (rc.importance.folds < 1) throw ConfigError("folds must be at least 1");
    for (int k : rc.importance.k) {
      if (k < 0) throw ConfigError("k must be non-negative");
    }
  });
  guarded("output", problems, [&] {
    rc.output = cfg.at("output").get<std::string>();
    if (rc.output.empty()) throw ConfigError("output must not be empty");
  });
  if (problems.empty() && !rc.strategies.empty()) {
    guarded("evaluation", problems, [&] { rc.cv_options(rc.strategies.front()).validate(); });
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  rc.effective = cfg;
  return rc;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path);
  json user;
  try {
    user = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("configuration " + path + " is not valid JSON: " + e.what());
  }
  return resolve_config(user, overrides, seed);
}

std::string RunConfig::checksum() const {
  json j = effective;
  j.erase("output");
  return sha256_hex(j.dump());
}

eval::CvOptions RunConfig::cv_options(dataset::SplitStrategy strategy) const {
  eval::CvOptions o;
  o.strategy = strategy;
  o.seeds = seeds;
  o.fractions = fractions;
  o.members = members;
  o.blend = blend;
  o.blend_config = blend_config;
  o.ngram = ngram;
  o.knn_k = knn_k;
  o.reliability_thresholds = thresholds;
  o.complexity_buckets = complexity_buckets;
  return o;
}

dataset::AssayTable load_dataset(const DatasetConfig& d) {
  if (d.format == "synthetic") return dataset::synthetic_table(d.synthetic);
  if (d.format == "table") return dataset::load_table(d.path);
  return dataset::load_csv(d.path, d.layout);
}

}  // namespace toxblend::cli
