#include "toxblend/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "toxblend/blend/bundle.hpp"
#include "toxblend/chem/smiles.hpp"
#include "toxblend/eval/auc.hpp"
#include "toxblend/eval/report.hpp"
#include "toxblend/log.hpp"
#include "toxblend/service/service.hpp"

namespace toxblend::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using dataset::Fold;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
  if (!out) throw DataError("write failed: " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json wrap(const RunConfig& c, const std::string& kind, json payload) {
  return {{"config_checksum", c.checksum()}, {"artifact", kind}, {"payload", std::move(payload)}};
}

json unwrap(const fs::path& p, const std::string& kind, const std::string& checksum) {
  const auto j = json::parse(read_text(p));
  if (j.value("artifact", "") != kind) throw DataError(p.string() + " is not a " + kind + " artifact");
  if (j.at("config_checksum").get<std::string>() != checksum) {
    throw DataError("mixed configuration checksums: " + p.string() + " was produced by a different configuration");
  }
  return j.at("payload");
}

std::string header_checksum(const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line) && line.starts_with("# ");) {
    if (line.starts_with("# config_checksum\t")) return line.substr(18);
  }
  return "";
}

std::string fmt_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

dataset::SplitStrategy first_strategy(const RunConfig& c) { return c.strategies.front(); }
std::uint64_t first_seed(const RunConfig& c) { return c.seeds.front(); }

dataset::SplitAssignment split_for(const RunConfig& c, const dataset::AssayTable& t, dataset::SplitStrategy s,
                                   std::uint64_t seed) {
  const auto path = split_path(c, s, seed);
  if (fs::exists(path)) return read_split(path, t, c.checksum());
  return dataset::make_split(t, s, c.fractions, seed);
}

std::vector<chem::MolecularGraph> take_graphs(const dataset::AssayTable& t, const std::vector<int>& rows) {
  std::vector<chem::MolecularGraph> out;
  for (int r : rows) out.push_back(t.graphs()[static_cast<std::size_t>(r)]);
  return out;
}

std::vector<std::string> take_smiles(const dataset::AssayTable& t, const std::vector<int>& rows) {
  std::vector<std::string> out;
  for (int r : rows) out.push_back(t.molecules()[static_cast<std::size_t>(r)].smiles);
  return out;
}

const char* final_model(const RunConfig& c) { return c.blend ? eval::kBlendModel : eval::kAverageModel; }

}  // namespace

std::string split_path(const RunConfig& c, dataset::SplitStrategy s, std::uint64_t seed) {
  return (fs::path(c.output) / "splits" / (std::string(dataset::strategy_name(s)) + "-seed" + std::to_string(seed) + ".tsv"))
      .string();
}

std::string report_path(const RunConfig& c, dataset::SplitStrategy s) {
  return (fs::path(c.output) / "reports" / (std::string(dataset::strategy_name(s)) + ".tsv")).string();
}

void write_split(const std::string& path, const dataset::AssayTable& t, const dataset::SplitAssignment& s,
                 const std::string& checksum) {
  std::ostringstream out;
  out << "# config_checksum\t" << checksum << "\n# strategy\t" << dataset::strategy_name(s.strategy) << "\n# seed\t"
      << s.seed << "\nid\tfold\n";
  for (int i = 0; i < t.molecule_count(); ++i) {
    out << t.molecules()[static_cast<std::size_t>(i)].id << "\t" << dataset::fold_name(s.folds[static_cast<std::size_t>(i)])
        << "\n";
  }
  write_text(path, out.str());
}

dataset::SplitAssignment read_split(const std::string& path, const dataset::AssayTable& t, const std::string& checksum) {
  const auto text = read_text(path);
  if (header_checksum(text) != checksum) {
    throw DataError("mixed configuration checksums: " + path + " was produced by a different configuration");
  }
  dataset::SplitAssignment s;
  std::istringstream in(text);
  std::string line;
  int row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.starts_with("# ")) {
      const auto tab = line.find('\t');
      const auto key = line.substr(2, tab - 2), value = line.substr(tab + 1);
      if (key == "strategy") s.strategy = dataset::parse_strategy(value);
      if (key == "seed") s.seed = std::stoull(value);
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || row >= t.molecule_count()) throw DataError("malformed split file " + path);
    if (line.substr(0, tab) != t.molecules()[static_cast<std::size_t>(row)].id) {
      throw DataError("split file " + path + " does not match the dataset at row " + std::to_string(row + 1));
    }
    const auto fold = line.substr(tab + 1);
    s.folds.push_back(fold == "train" ? Fold::Train : fold == "valid" ? Fold::Valid
                      : fold == "test" ? Fold::Test
                                       : throw DataError("unknown fold '" + fold + "' in " + path));
    ++row;
  }
  if (row != t.molecule_count()) throw DataError("split file " + path + " covers " + std::to_string(row) + " molecules");
  return s;
}

void cmd_featurize(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  const auto split = split_for(c, table, first_strategy(c), first_seed(c));
  const auto smiles = table.smiles();
  const auto featurizers = blend::build_featurizers(take_smiles(table, split.indices(Fold::Train)), c.ngram);
  const fs::path dir = fs::path(c.output) / "features";
  write_text(dir / "featurizers.json", wrap(c, "featurizers", blend::to_json(featurizers)).dump(1) + "\n");
  blend::FeatureCache cache(featurizers, table.graphs(), smiles);
  for (const auto family : c.features) {
    const Matrix& x = cache.matrix(family);
    std::ostringstream out;
    out << "# config_checksum\t" << c.checksum() << "\n# family\t" << featurize::family_name(family) << "\nid";
    for (const auto& n : blend::feature_names(featurizers, family)) out << "\t" << n;
    out << "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out << table.molecules()[static_cast<std::size_t>(i)].id;
      for (Eigen::Index j = 0; j < x.cols(); ++j) out << "\t" << fmt_value(x(i, j));
      out << "\n";
    }
    write_text(dir / (std::string(featurize::family_name(family)) + ".tsv"), out.str());
  }
}

void cmd_split(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  for (const auto s : c.strategies) {
    for (const auto seed : c.cv_options(s).effective_seeds()) {
      write_split(split_path(c, s, seed), table, dataset::make_split(table, s, c.fractions, seed), c.checksum());
    }
  }
}

void cmd_train(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  const auto seed = first_seed(c);
  const auto split = split_for(c, table, first_strategy(c), seed);
  auto options = c.cv_options(first_strategy(c));
  options.blend = false;
  const auto run = eval::run_seed(table, options, seed, &split);
  const fs::path dir = fs::path(c.output) / "models";
  write_text(dir / "featurizers.json", wrap(c, "featurizers", blend::to_json(run.featurizers)).dump(1) + "\n");
  json manifest = json::array();
  for (std::size_t i = 0; i < run.members.size(); ++i) {
    const auto file = "member-" + std::to_string(i) + "-" + run.members[i].recipe.name() + ".json";
    write_text(dir / file, wrap(c, "member", blend::to_json(run.members[i])).dump() + "\n");
    manifest.push_back(file);
  }
  json m = {{"strategy", dataset::strategy_name(first_strategy(c))}, {"seed", seed}, {"members", manifest}};
  write_text(dir / "manifest.json", wrap(c, "models", m).dump(1) + "\n");
}

void cmd_blend(const RunConfig& c) {
  const fs::path models = fs::path(c.output) / "models";
  if (!fs::exists(models / "manifest.json")) throw DataError("no trained models in " + models.string() + "; run train first");
  const auto sum = c.checksum();
  const auto manifest = unwrap(models / "manifest.json", "models", sum);
  const auto featurizers = blend::featurizers_from_json(unwrap(models / "featurizers.json", "featurizers", sum));
  std::vector<blend::TrainedMember> members;
  for (const auto& f : manifest.at("members")) {
    members.push_back(blend::member_from_json(unwrap(models / f.get<std::string>(), "member", sum)));
  }

  const auto table = load_dataset(c.dataset);
  const auto seed = manifest.at("seed").get<std::uint64_t>();
  const auto strategy = dataset::parse_strategy(manifest.at("strategy").get<std::string>());
  const auto split = split_for(c, table, strategy, seed);
  const auto tr = split.indices(Fold::Train), va = split.indices(Fold::Valid), te = split.indices(Fold::Test);
  blend::FeatureCache cache(featurizers, table.graphs(), table.smiles());
  const auto gva = take_graphs(table, va), gte = take_graphs(table, te);
  const auto yva = blend::take_rows(table.labels(), va), yte = blend::take_rows(table.labels(), te);
  std::vector<Matrix> valid, test;
  for (const auto& m : members) {
    std::optional<Matrix> xva, xte;
    if (m.recipe.kind != blend::ModelKind::Gcn) {
      xva = blend::take_rows(cache.matrix(m.recipe.family), va);
      xte = blend::take_rows(cache.matrix(m.recipe.family), te);
    }
    valid.push_back(blend::predict_member(m, {xva ? &*xva : nullptr, gva}));
    test.push_back(blend::predict_member(m, {xte ? &*xte : nullptr, gte}));
  }

  blend::Bundle b;
  b.featurizers = featurizers;
  b.members = members;
  b.config_checksum = sum;
  b.knn_k = c.knn_k;
  Matrix final_test = blend::prediction_average(test);
  if (c.blend) {
    auto cfg = c.blend_config;
    cfg.seed = derive_seed(seed, 2);
    std::vector<std::string> names;
    for (const auto& m : members) names.push_back(m.recipe.name());
    b.blend = blend::train_blend(valid, yva, names, cfg);
    final_test = blend::predict_blend(*b.blend, test);
  }
  for (int r : tr) b.reference.push_back(cache.fingerprints()[static_cast<std::size_t>(r)]);
  b.reliability_threshold = blend::reliability_threshold(b.reference, b.knn_k);

  // Per-target AUCs come from the evaluation report when one exists for
  // this configuration; otherwise from this split's test fold.
  std::string report_text;
  const auto rp = report_path(c, strategy);
  if (fs::exists(rp) && header_checksum(read_text(rp)) == sum) {
    report_text = read_text(rp);
  } else {
    eval::EvalReport rep;
    rep.dataset = c.dataset.name;
    rep.strategy = strategy;
    rep.seeds = {seed};
    rep.config_checksum = sum;
    for (const auto& t : table.targets()) rep.targets.push_back(t.name);
    for (Eigen::Index t = 0; t < yte.cols(); ++t) {
      std::vector<Label> l(yte.col(t).begin(), yte.col(t).end());
      std::vector<double> s(final_test.col(t).begin(), final_test.col(t).end());
      rep.rows.push_back({seed, "test", final_model(c), rep.targets[static_cast<std::size_t>(t)], eval::roc_auc(l, s)});
    }
    report_text = eval::format_report(rep);
  }
  const auto aucs = eval::parse_target_aucs(report_text, final_model(c));
  for (const auto& t : table.targets()) {
    blend::TargetInfo info{t.name, t.family, std::nullopt};
    if (const auto it = aucs.find(t.name); it != aucs.end() && it->second != "NA") info.cv_auc = it->second;
    b.targets.push_back(info);
  }
  b.eval_report = report_text;
  const auto out = fs::path(c.output) / "bundle";
  fs::remove_all(out);
  blend::save_bundle(b, out.string());
}

void cmd_evaluate(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  std::vector<eval::EvalReport> reports;
  for (const auto s : c.strategies) {
    const auto options = c.cv_options(s);
    std::map<std::uint64_t, dataset::SplitAssignment> splits;
    for (const auto seed : options.effective_seeds()) {
      const auto path = split_path(c, s, seed);
      if (fs::exists(path)) splits.emplace(seed, read_split(path, table, c.checksum()));
    }
    auto rep = eval::run_cv(table, options, c.dataset.name, &splits);
    rep.config_checksum = c.checksum();
    write_text(report_path(c, s), eval::format_report(rep));
    reports.push_back(std::move(rep));
  }
  write_text(fs::path(c.output) / "reports" / "table.tsv",
             "# config_checksum\t" + c.checksum() + "\n" + eval::format_table(reports));
}

void cmd_importance(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  const auto seed = first_seed(c);
  const auto split = split_for(c, table, first_strategy(c), seed);
  const auto tr = split.indices(Fold::Train), va = split.indices(Fold::Valid), te = split.indices(Fold::Test);
  const auto featurizers = blend::build_featurizers(take_smiles(table, tr), c.ngram);
  blend::FeatureCache cache(featurizers, table.graphs(), table.smiles());

  auto recipe = blend::recipe_from_name(c.importance.member);
  for (const auto& m : c.members) {
    if (m.name() == c.importance.member) recipe = m;
  }
  const Matrix& x = cache.matrix(recipe.family);
  const Matrix xtr = blend::take_rows(x, tr), xva = blend::take_rows(x, va), xte = blend::take_rows(x, te);
  const auto gtr = take_graphs(table, tr), gva = take_graphs(table, va);
  const auto member = blend::train_member(recipe, {&xtr, gtr}, blend::take_rows(table.labels(), tr), {&xva, gva},
                                          blend::take_rows(table.labels(), va), derive_seed(seed, 1, 0));
  const eval::ScoreFn model = [&member](const Matrix& q) { return blend::predict_member(member, {&q, {}}); };

  const auto names = blend::feature_names(featurizers, recipe.family);
  std::vector<int> features;
  for (const auto& want : c.importance.features) {
    const auto it = std::find(names.begin(), names.end(), want);
    if (it == names.end()) throw ConfigError("importance feature '" + want + "' is not a " +
                                             std::string(featurize::family_name(recipe.family)) + " feature");
    features.push_back(static_cast<int>(it - names.begin()));
  }
  eval::EvalReport rep;
  rep.dataset = c.dataset.name;
  rep.strategy = first_strategy(c);
  rep.seeds = {seed};
  rep.config_checksum = c.checksum();
  const auto yte = blend::take_rows(table.labels(), te);
  for (int k : c.importance.k) {
    for (auto& imp : eval::importance_table(model, xte, yte, xtr, k, c.importance.folds, derive_seed(seed, 3), features)) {
      rep.importance.push_back({recipe.name(), names[static_cast<std::size_t>(imp.feature)], k, std::move(imp)});
    }
  }
  write_text(fs::path(c.output) / "importance.tsv", eval::format_report(rep));
}

void cmd_reliability(const RunConfig& c) {
  const auto table = load_dataset(c.dataset);
  const auto seed = first_seed(c);
  const auto split = split_for(c, table, first_strategy(c), seed);
  const auto options = c.cv_options(first_strategy(c));
  const auto run = eval::run_seed(table, options, seed, &split);
  const auto yte = blend::take_rows(table.labels(), run.split.indices(Fold::Test));
  const Matrix& scores = run.blend ? run.blend_test : run.average_test;
  eval::EvalReport rep;
  rep.dataset = c.dataset.name;
  rep.strategy = first_strategy(c);
  rep.seeds = {seed};
  rep.config_checksum = c.checksum();
  for (const auto& p : eval::reliability_curve(scores, yte, run.test_distances, c.thresholds)) {
    rep.reliability.push_back({seed, final_model(c), p});
  }
  for (const auto& p : eval::complexity_curve(scores, yte, run.test_complexity, c.complexity_buckets)) {
    rep.complexity.push_back({seed, final_model(c), p});
  }
  write_text(fs::path(c.output) / "reliability.tsv", eval::format_report(rep));
}

bool cmd_predict(const std::string& bundle_dir, const std::vector<std::string>& smiles,
                 const std::vector<std::string>& targets, std::ostream& out, std::ostream& err) {
  const auto b = blend::load_bundle(bundle_dir);
  std::vector<int> filter;
  for (const auto& name : targets) {
    int found = -1;
    for (std::size_t i = 0; i < b.targets.size(); ++i) {
      if (b.targets[i].name == name) found = static_cast<int>(i);
    }
    if (found < 0) throw DataError("unknown target '" + name + "'");
    filter.push_back(found);
  }
  const auto preds = blend::predict_bundle(b, smiles, filter);
  bool ok = true;
  out << "input\tcanonical\ttarget\tfamily\tscore\tcv_auc\tdistance\treliable\n";
  for (const auto& m : preds) {
    if (m.error) {
      err << "error: cannot parse SMILES '" << m.input << "': " << *m.error << "\n";
      ok = false;
      continue;
    }
    for (const auto& p : m.targets) {
      out << m.input << "\t" << m.canonical << "\t" << p.target << "\t" << p.family << "\t" << service::json_number(p.score)
          << "\t" << p.cv_auc.value_or("NA") << "\t" << service::json_number(p.distance) << "\t"
          << (p.reliable ? "yes" : "no") << "\n";
    }
  }
  return ok;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"toxblend: toxicity virtual screening with blended multi-task models"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  auto config_command = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
    sub->add_option("--set", overrides, "override a scalar key: a.b.c=value (repeatable)");
    sub->add_option("--seed", seed, "use this single seed for every random choice");
    return sub;
  };
  auto* featurize = config_command("featurize", "write feature matrices and frozen featurizers");
  auto* split = config_command("split", "write split assignments");
  auto* train = config_command("train", "train the ensemble members");
  auto* blend = config_command("blend", "train the blender and package a prediction bundle");
  auto* evaluate = config_command("evaluate", "cross-validate every member, averaging and the blend");
  auto* importance = config_command("importance", "permutation importance of one member's features");
  auto* reliability = config_command("reliability", "AUC against training-set distance and molecule complexity");

  auto* predict = app.add_subcommand("predict", "score SMILES with a bundle");
  std::string bundle;
  std::vector<std::string> smiles, targets;
  std::string input;
  predict->add_option("--bundle", bundle, "bundle directory")->required();
  predict->add_option("smiles", smiles, "SMILES strings");
  predict->add_option("--input", input, "file with one SMILES per line");
  predict->add_option("--targets", targets, "restrict to these targets");

  auto* serve = app.add_subcommand("serve", "run the HTTP prediction service");
  std::string serve_bundle, bind = "127.0.0.1:8080";
  if (const char* e = std::getenv("TOXBLEND_BUNDLE")) serve_bundle = e;
  if (const char* e = std::getenv("TOXBLEND_BIND")) bind = e;
  serve->add_option("--bundle", serve_bundle, "bundle directory (env TOXBLEND_BUNDLE)");
  serve->add_option("--bind", bind, "host:port (env TOXBLEND_BIND)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (predict->parsed()) {
      if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw DataError("cannot open " + input);
        for (std::string line; std::getline(in, line);) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (!line.empty()) smiles.push_back(line);
        }
      }
      if (smiles.empty()) throw ConfigError("no SMILES given");
      return cmd_predict(bundle, smiles, targets, std::cout, std::cerr) ? 0 : 2;
    }
    if (serve->parsed()) {
      if (serve_bundle.empty()) throw ConfigError("serve needs --bundle or TOXBLEND_BUNDLE");
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw ConfigError("bind address must be host:port");
      int port = 0;
      try {
        port = std::stoi(bind.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad port in bind address " + bind);
      }
      service::PredictionService svc(serve_bundle);
      service::HttpServer server(svc);
      const int bound = server.bind(bind.substr(0, colon), port);
      log::info("serving " + serve_bundle + " on " + bind.substr(0, colon) + ":" + std::to_string(bound));
      server.listen();
      return 0;
    }
    const auto config = load_config(config_path, overrides, seed);
    if (featurize->parsed()) cmd_featurize(config);
    if (split->parsed()) cmd_split(config);
    if (train->parsed()) cmd_train(config);
    if (blend->parsed()) cmd_blend(config);
    if (evaluate->parsed()) cmd_evaluate(config);
    if (importance->parsed()) cmd_importance(config);
    if (reliability->parsed()) cmd_reliability(config);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace toxblend::cli
