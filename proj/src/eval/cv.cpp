#include "toxblend/eval/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "toxblend/eval/auc.hpp"
#include "toxblend/log.hpp"

namespace toxblend::eval {

using dataset::Fold;

void CvOptions::validate() const {
  std::vector<std::string> problems;
  try {
    fractions.validate();
  } catch (const ConfigError& e) {
    problems.emplace_back(e.what());
  }
  if (fractions.valid <= 0.0) problems.emplace_back("validation fraction must be positive");
  if (fractions.test <= 0.0) problems.emplace_back("test fraction must be positive");
  if (seeds.empty()) problems.emplace_back("seeds must not be empty");
  if (members.empty()) problems.emplace_back("at least one member recipe is required");
  std::set<std::string> names;
  for (const auto& m : members) {
    if (!names.insert(m.name()).second) problems.push_back("duplicate member " + m.name());
  }
  if (knn_k < 1) problems.emplace_back("knn_k must be at least 1");
  if (complexity_buckets < 1) problems.emplace_back("complexity_buckets must be at least 1");
  if (!(blend_config.holdout > 0.0 && blend_config.holdout < 1.0)) problems.emplace_back("blend holdout must lie in (0, 1)");
  if (!problems.empty()) {
    std::string msg = "invalid evaluation options:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

std::vector<std::uint64_t> CvOptions::effective_seeds() const {
  if (strategy == dataset::SplitStrategy::Index) return {seeds.empty() ? 0 : seeds.front()};
  return seeds;
}

void FoldAudit::record(const std::string& artifact, const dataset::SplitAssignment& split, std::span<const int> rows) {
  std::set<Fold> folds;
  for (int r : rows) folds.insert(split.folds.at(static_cast<std::size_t>(r)));
  entries.push_back({artifact, std::vector<Fold>(folds.begin(), folds.end())});
}

void FoldAudit::check() const {
  for (const auto& e : entries) {
    if (std::find(e.folds.begin(), e.folds.end(), Fold::Test) != e.folds.end()) {
      throw Error("anti-leakage audit: " + e.artifact + " consumed the test fold");
    }
  }
}

namespace {

std::vector<chem::MolecularGraph> take_graphs(const dataset::AssayTable& t, const std::vector<int>& rows) {
  std::vector<chem::MolecularGraph> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(t.graphs()[static_cast<std::size_t>(r)]);
  return out;
}

std::vector<std::optional<double>> per_target(const LabelMatrix& y, const Matrix& s) {
  std::vector<std::optional<double>> out;
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    std::vector<Label> l(y.col(t).begin(), y.col(t).end());
    std::vector<double> v(s.col(t).begin(), s.col(t).end());
    out.push_back(roc_auc(l, v));
  }
  return out;
}

}  // namespace

SeedRun run_seed(const dataset::AssayTable& table, const CvOptions& options, std::uint64_t seed,
                 const dataset::SplitAssignment* split) {
  options.validate();
  SeedRun run;
  run.seed = seed;
  if (split != nullptr) {
    if (static_cast<int>(split->folds.size()) != table.molecule_count()) throw DataError("split does not match the dataset");
    run.split = *split;
  } else {
    run.split = dataset::make_split(table, options.strategy, options.fractions, seed);
  }
  const auto tr = run.split.indices(Fold::Train), va = run.split.indices(Fold::Valid), te = run.split.indices(Fold::Test);
  if (tr.empty() || va.empty() || te.empty()) throw DataError("a fold is empty; the dataset is too small for the split");

  const auto smiles = table.smiles();
  std::vector<std::string> train_smiles;
  for (int r : tr) train_smiles.push_back(smiles[static_cast<std::size_t>(r)]);
  run.featurizers = blend::build_featurizers(train_smiles, options.ngram);
  run.audit.record("featurizers", run.split, tr);

  blend::FeatureCache cache(run.featurizers, table.graphs(), smiles);
  const auto gtr = take_graphs(table, tr), gva = take_graphs(table, va), gte = take_graphs(table, te);
  const auto ytr = blend::take_rows(table.labels(), tr), yva = blend::take_rows(table.labels(), va);
  std::vector<int> fit_rows = tr;
  fit_rows.insert(fit_rows.end(), va.begin(), va.end());

  for (std::size_t i = 0; i < options.members.size(); ++i) {
    const auto& recipe = options.members[i];
    std::optional<Matrix> xtr, xva, xte;
    if (recipe.kind != blend::ModelKind::Gcn) {
      const Matrix& x = cache.matrix(recipe.family);
      xtr = blend::take_rows(x, tr);
      xva = blend::take_rows(x, va);
      xte = blend::take_rows(x, te);
    }
    const blend::MemberInputs in_tr{xtr ? &*xtr : nullptr, gtr}, in_va{xva ? &*xva : nullptr, gva},
        in_te{xte ? &*xte : nullptr, gte};
    log::info("seed " + std::to_string(seed) + ": training " + recipe.name());
    run.members.push_back(blend::train_member(recipe, in_tr, ytr, in_va, yva, derive_seed(seed, 1, i)));
    run.audit.record(recipe.name(), run.split, fit_rows);
    run.valid_scores.push_back(blend::predict_member(run.members.back(), in_va));
    run.test_scores.push_back(blend::predict_member(run.members.back(), in_te));
  }
  run.average_test = blend::prediction_average(run.test_scores);
  if (options.blend) {
    auto cfg = options.blend_config;
    cfg.seed = derive_seed(seed, 2);
    std::vector<std::string> names;
    for (const auto& m : run.members) names.push_back(m.recipe.name());
    run.blend = blend::train_blend(run.valid_scores, yva, names, cfg);
    run.audit.record("blend", run.split, va);
    run.blend_test = blend::predict_blend(*run.blend, run.test_scores);
  }
  const auto& fps = cache.fingerprints();
  std::vector<featurize::BitVector> test_fps;
  for (int r : tr) run.train_fingerprints.push_back(fps[static_cast<std::size_t>(r)]);
  for (int r : te) {
    test_fps.push_back(fps[static_cast<std::size_t>(r)]);
    run.test_complexity.push_back(static_cast<double>(test_fps.back().count()));
  }
  run.test_distances = knn_distances(test_fps, run.train_fingerprints, options.knn_k);
  run.audit.check();
  return run;
}

EvalReport run_cv(const dataset::AssayTable& table, const CvOptions& options, const std::string& dataset_name,
                  const std::map<std::uint64_t, dataset::SplitAssignment>* splits) {
  options.validate();
  EvalReport rep;
  rep.dataset = dataset_name;
  rep.strategy = options.strategy;
  rep.seeds = options.effective_seeds();
  for (const auto& t : table.targets()) rep.targets.push_back(t.name);
  for (const auto& m : options.members) rep.correlation_members.push_back(m.name());
  const auto nm = static_cast<Eigen::Index>(options.members.size());
  Matrix corr_sum = Matrix::Zero(nm, nm);
  Matrix corr_n = Matrix::Zero(nm, nm);

  for (const auto seed : rep.seeds) {
    const dataset::SplitAssignment* given = nullptr;
    if (splits != nullptr) {
      const auto it = splits->find(seed);
      if (it != splits->end()) given = &it->second;
    }
    const auto run = run_seed(table, options, seed, given);
    const auto yva = blend::take_rows(table.labels(), run.split.indices(Fold::Valid));
    const auto te = run.split.indices(Fold::Test);
    const auto yte = blend::take_rows(table.labels(), te);
    auto add = [&](const std::string& fold, const std::string& model, const LabelMatrix& y, const Matrix& s) {
      const auto aucs = per_target(y, s);
      for (std::size_t t = 0; t < aucs.size(); ++t) rep.rows.push_back({seed, fold, model, rep.targets[t], aucs[t]});
    };
    for (std::size_t i = 0; i < run.members.size(); ++i) add("valid", run.members[i].recipe.name(), yva, run.valid_scores[i]);
    add("valid", kAverageModel, yva, blend::prediction_average(run.valid_scores));
    for (std::size_t i = 0; i < run.members.size(); ++i) add("test", run.members[i].recipe.name(), yte, run.test_scores[i]);
    add("test", kAverageModel, yte, run.average_test);
    if (run.blend) add("test", kBlendModel, yte, run.blend_test);

    const auto corr = blend::correlation_matrix(run.test_scores, yte);
    for (Eigen::Index a = 0; a < nm; ++a) {
      for (Eigen::Index b = 0; b < nm; ++b) {
        if (!std::isnan(corr.rho(a, b))) {
          corr_sum(a, b) += corr.rho(a, b);
          corr_n(a, b) += 1.0;
        }
      }
    }
    const std::string final_model = run.blend ? kBlendModel : kAverageModel;
    const Matrix& final_scores = run.blend ? run.blend_test : run.average_test;
    for (const auto& p : reliability_curve(final_scores, yte, run.test_distances, options.reliability_thresholds)) {
      rep.reliability.push_back({seed, final_model, p});
    }
    for (const auto& p : complexity_curve(final_scores, yte, run.test_complexity, options.complexity_buckets)) {
      rep.complexity.push_back({seed, final_model, p});
    }
  }
  rep.correlation = Matrix(nm, nm);
  for (Eigen::Index a = 0; a < nm; ++a) {
    for (Eigen::Index b = 0; b < nm; ++b) {
      rep.correlation(a, b) = corr_n(a, b) > 0 ? corr_sum(a, b) / corr_n(a, b) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

std::vector<ModelSummary> EvalReport::summary() const {
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (r.fold == "test" && std::find(order.begin(), order.end(), r.model) == order.end()) order.push_back(r.model);
  }
  std::vector<ModelSummary> out;
  for (const auto& model : order) {
    ModelSummary s;
    s.model = model;
    for (const auto seed : seeds) {
      std::vector<std::optional<double>> aucs;
      for (const auto& r : rows) {
        if (r.fold == "test" && r.model == model && r.seed == seed) aucs.push_back(r.auc);
      }
      if (aucs.empty()) continue;
      const auto m = mean_auc(aucs);
      s.skipped += m.skipped;
      if (m.used > 0) s.seed_means.push_back(m.mean);
    }
    if (s.seed_means.empty()) {
      s.mean = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : s.seed_means) sum += v;
      s.mean = sum / static_cast<double>(s.seed_means.size());
      if (s.seed_means.size() > 1) {
        double ss = 0.0;
        for (double v : s.seed_means) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.seed_means.size() - 1));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<double> EvalReport::target_auc(const std::string& model, const std::string& target) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.fold == "test" && r.model == model && r.target == target && r.auc) {
      sum += *r.auc;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace toxblend::eval
