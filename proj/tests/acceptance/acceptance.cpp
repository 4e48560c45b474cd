// Acceptance suite: one PASS/FAIL/SKIP line per criterion; exit 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"
#include "toxblend/blend/member.hpp"
#include "toxblend/chem/canonical.hpp"
#include "toxblend/chem/scaffold.hpp"
#include "toxblend/chem/smiles.hpp"
#include "toxblend/cli/commands.hpp"
#include "toxblend/cli/config.hpp"
#include "toxblend/dataset/split.hpp"
#include "toxblend/eval/auc.hpp"
#include "toxblend/eval/curves.hpp"
#include "toxblend/eval/importance.hpp"
#include "toxblend/eval/variability.hpp"
#include "toxblend/log.hpp"
#include "toxblend/nn/gcn.hpp"
#include "toxblend/nn/mlp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace toxblend {
namespace {

// Tolerances and sizes.
constexpr double kAucTolerance = 1e-12;
constexpr int kAucInstances = 1000;
constexpr double kGradTolerance = 1e-4;
constexpr int kGradDraws = 100;
constexpr int kGbmInstances = 200;
constexpr int kMonotoneProbes = 10000;
constexpr int kScaffoldSeeds = 10;
constexpr double kFractionTolerance = 0.02;
constexpr double kMemberFloor = 0.90;
constexpr double kBlendSlack = 0.01;
constexpr double kTox21Floor = 0.75;
constexpr int kImportanceFolds = 5;
constexpr int kImportanceMinFirst = 4;
constexpr int kVariabilityTrials = 100000;
constexpr double kVariabilityTolerance = 0.005;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::Pass : Status::Fail, detail}; }

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Outcome auc_oracle() {
  Rng rng(101);
  double worst = 0.0;
  int compared = 0;
  for (int inst = 0; inst < kAucInstances; ++inst) {
    const int n = 2 + static_cast<int>(rng.below(49));
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<double> scores(static_cast<std::size_t>(n));
    const int levels = 1 + static_cast<int>(rng.below(10));  // few levels: many ties
    for (int i = 0; i < n; ++i) {
      labels[static_cast<std::size_t>(i)] = rng.bernoulli(0.4) ? 1 : 0;
      scores[static_cast<std::size_t>(i)] =
          rng.bernoulli(0.5) ? static_cast<double>(rng.below(static_cast<std::uint64_t>(levels))) : rng.uniform();
    }
    labels[0] = 1;
    labels[1] = 0;
    const auto got = eval::roc_auc(std::span<const int>(labels), scores);
    if (!got) return {Status::Fail, "undefined AUC on instance " + std::to_string(inst)};
    worst = std::max(worst, std::abs(*got - oracle::pair_auc(labels, scores)));
    ++compared;
  }
  return verdict(worst <= kAucTolerance, std::to_string(compared) + " instances, max |diff| " + sci(worst));
}

LabelMatrix random_labels(Rng& rng, Eigen::Index n, Eigen::Index t) {
  LabelMatrix y(n, t);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y.data()[i] = rng.bernoulli(0.3) ? Label::Missing : (rng.bernoulli(0.5) ? Label::Active : Label::Inactive);
  }
  y(0, 0) = Label::Active;
  return y;
}

Outcome gradient_checks() {
  Rng rng(202);
  double mlp_worst = 0.0, gcn_worst = 0.0;
  for (int draw = 0; draw < kGradDraws; ++draw) {
    auto p = nn::init_network(5, 3, 2, 8, rng);
    Vector flat(p.parameter_count());
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = 0.5 * rng.normal();
    p.assign(flat);
    Matrix x(6, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const auto y = random_labels(rng, 6, 3);
    nn::NetworkParams grad;
    nn::loss_and_gradient(p, x, y, nullptr, &grad);
    auto f = [&](const Vector& v) {
      auto q = p;
      q.assign(v);
      return nn::loss_and_gradient(q, x, y, nullptr, nullptr);
    };
    mlp_worst = std::max(mlp_worst, oracle::relative_error(grad.flatten(), oracle::numeric_gradient(f, p.flatten())));
  }
  const std::vector<chem::MolecularGraph> graphs{chem::parse_smiles("CC(=O)N"), chem::parse_smiles("c1ccccc1O"),
                                                 chem::parse_smiles("ClCCS")};
  nn::GcnConfig gc;
  gc.hidden = 8;
  gc.fingerprint = 8;
  gc.rounds = 2;
  for (int draw = 0; draw < kGradDraws; ++draw) {
    auto p = nn::init_gcn(2, gc, rng);
    Vector flat(p.parameter_count());
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = 0.5 * rng.normal();
    p.assign(flat);
    const auto y = random_labels(rng, 3, 2);
    nn::GcnParams grad;
    nn::gcn_loss_and_gradient(p, graphs, y, &grad);
    auto f = [&](const Vector& v) {
      auto q = p;
      q.assign(v);
      return nn::gcn_loss_and_gradient(q, graphs, y, nullptr);
    };
    gcn_worst = std::max(gcn_worst, oracle::relative_error(grad.flatten(), oracle::numeric_gradient(f, p.flatten())));
  }
  return verdict(mlp_worst < kGradTolerance && gcn_worst < kGradTolerance,
                 std::to_string(kGradDraws) + " draws each, max relative error mlp " + sci(mlp_worst) + ", gcn " +
                     sci(gcn_worst));
}

Outcome gbm_split_search() {
  Rng rng(303);
  int trees_compared = 0;
  for (int inst = 0; inst < kGbmInstances; ++inst) {
    const int n = 4 + static_cast<int>(rng.below(47));
    const int features = 1 + static_cast<int>(rng.below(5));
    const bool discrete = rng.bernoulli(0.5);
    gbm::StackedRows data;
    data.x.resize(n, features);
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int f = 0; f < features; ++f) {
        data.x(i, f) = discrete ? static_cast<double>(rng.below(6)) - 2.0 : (rng.bernoulli(0.3) ? 0.0 : rng.normal());
      }
      data.y[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    }
    data.y[0] = 1.0;
    data.y[1] = 0.0;
    gbm::GbmConfig c;
    c.max_depth = 1 + static_cast<int>(rng.below(3));
    c.max_rounds = 1 + static_cast<int>(rng.below(3));
    c.eta = 0.3;
    c.lambda = rng.bernoulli(0.5) ? 1.0 : 0.0;
    c.min_child_hessian = rng.bernoulli(0.5) ? 0.0 : 0.5;
    std::vector<int> mono;
    if (rng.bernoulli(0.5)) {
      for (int f = 0; f < features; ++f) mono.push_back(static_cast<int>(rng.below(3)) - 1);
    }
    const auto m = gbm::train_gbm(data, c, mono);
    oracle::BruteForceGbm brute(data.x, c, mono);
    const auto trees = brute.boost(data.y, c.max_rounds);
    if (m.trees.size() != trees.size()) return {Status::Fail, "tree count differs on instance " + std::to_string(inst)};
    for (std::size_t t = 0; t < trees.size(); ++t) {
      if (!oracle::same_tree(m.trees[t], 0, *trees[t], 1e-9)) {
        return {Status::Fail, "instance " + std::to_string(inst) + " tree " + std::to_string(t) + " differs"};
      }
      ++trees_compared;
    }
  }
  return {Status::Pass, std::to_string(kGbmInstances) + " instances, " + std::to_string(trees_compared) +
                            " trees identical"};
}

json synthetic_config(int molecules, const fs::path& output) {
  json j = {{"dataset", {{"format", "synthetic"}, {"name", "synthetic"}, {"synthetic", {{"molecules", molecules}, {"seed", 1}}}}},
            {"seeds", {1, 2, 3}},
            {"members", {"gbm-pld", "gbm-fingerprint", "gbm-ngram", "mlp-fingerprint"}},
            {"output", output.string()}};
  return j;
}

Outcome monotone_blend() {
  const auto rc = cli::resolve_config(synthetic_config(800, fs::temp_directory_path() / "toxblend_acc_mono"));
  const auto table = cli::load_dataset(rc.dataset);
  const auto run = eval::run_seed(table, rc.cv_options(dataset::SplitStrategy::Random), 1);
  if (!run.blend) return {Status::Fail, "no blend trained"};
  const auto& model = *run.blend;
  const int members = static_cast<int>(model.members.size());
  const int targets = model.targets;
  Rng rng(404);
  int violations = 0, probes = 0;
  for (int f = 0; f < members; ++f) {
    for (int probe = 0; probe < kMonotoneProbes; ++probe) {
      std::vector<Matrix> lo(static_cast<std::size_t>(members), Matrix(1, targets));
      for (auto& m : lo) {
        for (int t = 0; t < targets; ++t) m(0, t) = rng.uniform();
      }
      auto hi = lo;
      const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(targets)));
      auto& cell = hi[static_cast<std::size_t>(f)](0, t);
      cell = rng.uniform(cell, 1.0);
      if (blend::predict_blend(model, hi)(0, t) < blend::predict_blend(model, lo)(0, t)) ++violations;
      ++probes;
    }
  }
  return verdict(violations == 0, std::to_string(probes) + " probes over " + std::to_string(members) +
                                      " member features, " + std::to_string(violations) + " violations");
}

std::optional<fs::path> tox21_path() {
  if (const char* env = std::getenv("TOXBLEND_TOX21")) {
    if (fs::exists(env)) return fs::path(env);
  }
  const fs::path bundled = fs::path(TOXBLEND_TEST_DATA_DIR) / "tox21.csv";
  if (fs::exists(bundled)) return bundled;
  return std::nullopt;
}

dataset::AssayTable load_tox21(const fs::path& p) {
  dataset::CsvLayout layout;
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  if (header.find("mol_id") != std::string::npos) layout.id_column = "mol_id";
  return dataset::load_csv(p.string(), layout);
}

Outcome scaffold_leakage() {
  const auto tox = tox21_path();
  std::string source = tox ? tox->filename().string() : "fixture500.csv";
  dataset::AssayTable t;
  if (tox) {
    t = load_tox21(*tox);
  } else {
    dataset::CsvLayout layout;
    layout.id_column = "mol_id";
    t = dataset::load_csv((fs::path(TOXBLEND_TEST_DATA_DIR) / "fixture500.csv").string(), layout);
  }
  std::vector<std::string> keys;
  for (const auto& g : t.graphs()) keys.push_back(chem::canonical_key(chem::murcko_scaffold(g)).value);
  const auto groups = std::set<std::string>(keys.begin(), keys.end()).size();
  const double n = static_cast<double>(t.molecule_count());
  int leaks = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < kScaffoldSeeds; ++seed) {
    const auto s = dataset::split_scaffold(t, {}, seed);
    std::map<std::string, dataset::Fold> where;
    std::set<std::string> leaked;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto [it, fresh] = where.emplace(keys[i], s.folds[i]);
      if (!fresh && it->second != s.folds[i]) leaked.insert(keys[i]);
    }
    leaks += static_cast<int>(leaked.size());
    const auto c = s.counts();
    const double target[3] = {0.8, 0.1, 0.1};
    for (int f = 0; f < 3; ++f) worst = std::max(worst, std::abs(c[static_cast<std::size_t>(f)] / n - target[f]));
  }
  const bool fractions_apply = groups >= 50;
  const bool ok = leaks == 0 && (!fractions_apply || worst <= kFractionTolerance);
  return verdict(ok, source + ", " + std::to_string(groups) + " scaffold groups, " + std::to_string(kScaffoldSeeds) +
                         " seeds, " + std::to_string(leaks) + " leaking scaffolds, max fraction deviation " +
                         fmt(worst) + (fractions_apply ? "" : " (fractions not checked)"));
}

Outcome synthetic_end_to_end() {
  const auto rc = cli::resolve_config(synthetic_config(2000, fs::temp_directory_path() / "toxblend_acc_e2e"));
  const auto table = cli::load_dataset(rc.dataset);
  const auto report = eval::run_cv(table, rc.cv_options(dataset::SplitStrategy::Random), rc.dataset.name);
  std::map<std::string, double> mean;
  for (const auto& s : report.summary()) mean[s.model] = s.mean;
  bool ok = true;
  double best = 0.0;
  std::ostringstream d;
  d << "mean test AUC over 3 seeds:";
  for (const auto& m : {"gbm-pld", "gbm-fingerprint", "gbm-ngram", "mlp-fingerprint"}) {
    if (!mean.count(m)) return {Status::Fail, std::string("missing member ") + m};
    ok = ok && mean[m] >= kMemberFloor;
    best = std::max(best, mean[m]);
    d << " " << m << " " << fmt(mean[m]);
  }
  if (!mean.count(eval::kBlendModel) || !mean.count(eval::kAverageModel)) return {Status::Fail, "missing blend rows"};
  ok = ok && mean[eval::kBlendModel] >= best - kBlendSlack;
  d << ", " << eval::kAverageModel << " " << fmt(mean[eval::kAverageModel]) << ", blend "
    << fmt(mean[eval::kBlendModel]) << " (needs >= " << fmt(best - kBlendSlack) << ")";
  return verdict(ok, d.str());
}

Outcome tox21_smoke() {
  const auto tox = tox21_path();
  if (!tox) return {Status::Skip, "no Tox21 CSV (set TOXBLEND_TOX21 or add tests/data/tox21.csv)"};
  const auto table = load_tox21(*tox);
  eval::CvOptions o;
  o.strategy = dataset::SplitStrategy::Random;
  o.seeds = {0};
  o.members = {blend::recipe_from_name("gbm-fingerprint")};
  o.blend = false;
  const auto run = eval::run_seed(table, o, 0);
  const auto test = run.split.indices(dataset::Fold::Test);
  const auto y = blend::take_rows(table.labels(), test);
  const double auc = blend::mean_target_auc(y, run.test_scores[0]);
  return verdict(auc >= kTox21Floor, tox->filename().string() + ", " + std::to_string(table.molecule_count()) +
                                         " molecules, gbm-fingerprint mean test AUC " + fmt(auc));
}

// Single task: feature 3 decides the label; the rest are a constant column
// and four clusters of correlated noise.
Outcome permutation_importance() {
  Rng rng(505);
  auto cluster = [](int j) { return j < 3 ? (j - 1) / 7 : (j - 2) / 7; };
  auto make = [&](int n, Matrix& x, LabelMatrix& y) {
    x.resize(n, 30);
    y.resize(n, 1);
    for (int i = 0; i < n; ++i) {
      double latent[4];
      for (double& l : latent) l = rng.normal();
      for (int j = 1; j < 30; ++j) {
        if (j != 3) x(i, j) = latent[cluster(j)] + 0.3 * rng.normal();
      }
      x(i, 0) = 1.0;
      x(i, 3) = rng.normal();
      const bool label = x(i, 3) > 0.0 ? !rng.bernoulli(0.05) : rng.bernoulli(0.05);
      y(i, 0) = label ? Label::Active : Label::Inactive;
    }
  };
  Matrix train, test;
  LabelMatrix ytrain, ytest;
  make(800, train, ytrain);
  make(400, test, ytest);
  gbm::GbmConfig cfg;
  cfg.max_rounds = 60;
  cfg.eta = 0.3;
  cfg.max_depth = 3;
  auto model = std::make_shared<gbm::BoostedModel>(gbm::train_gbm(gbm::stack_tasks(train, ytrain), cfg, {}, nullptr));
  eval::ScoreFn score = [model](const Matrix& q) {
    const Vector p = gbm::predict_gbm(*model, gbm::stack_all(q, 1).x);
    return Matrix(Eigen::Map<const Matrix>(p.data(), q.rows(), 1));
  };
  bool ok = true;
  std::ostringstream d;
  for (int k : {0, 5}) {
    const auto table = eval::importance_table(score, test, ytest, train, k, kImportanceFolds, 606);
    int first = 0;
    for (int fold = 0; fold < kImportanceFolds; ++fold) first += eval::rank_in_fold(table, 3, fold) == 0 ? 1 : 0;
    ok = ok && first >= kImportanceMinFirst;
    d << (k == 0 ? "" : ", ") << "k=" << k << " planted feature first in " << first << "/" << kImportanceFolds
      << " folds";
  }
  return verdict(ok, d.str());
}

// Labels of test molecules are flipped with probability growing linearly
// from 0 at the nearest to 0.5 at the farthest Jaccard distance.
Outcome reliability_trend() {
  auto rc = cli::resolve_config(synthetic_config(2000, fs::temp_directory_path() / "toxblend_acc_rel"));
  auto o = rc.cv_options(dataset::SplitStrategy::Random);
  o.members = {blend::recipe_from_name("gbm-fingerprint")};
  o.blend = false;
  const auto table = cli::load_dataset(rc.dataset);
  const auto run = eval::run_seed(table, o, 1);
  const auto test = run.split.indices(dataset::Fold::Test);
  LabelMatrix y = blend::take_rows(table.labels(), test);
  const auto& d = run.test_distances;
  const double lo = *std::min_element(d.begin(), d.end()), hi = *std::max_element(d.begin(), d.end());
  Rng rng(707);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double p = hi > lo ? 0.5 * (d[static_cast<std::size_t>(i)] - lo) / (hi - lo) : 0.0;
    for (Eigen::Index t = 0; t < y.cols(); ++t) {
      if (y(i, t) != Label::Missing && rng.bernoulli(p)) y(i, t) = y(i, t) == Label::Active ? Label::Inactive : Label::Active;
    }
  }
  std::vector<double> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) { return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))]; };
  const std::vector<double> thresholds{0.0, quantile(0.5), quantile(0.8)};
  const auto curve = eval::reliability_curve(run.test_scores[0], y, d, thresholds);
  if (!curve.front().auc || !curve.back().auc) return {Status::Fail, "undefined AUC in a bucket"};
  std::ostringstream s;
  s << "AUC at distance >= " << fmt(thresholds[0], 3) << ": " << fmt(*curve.front().auc) << " (" << curve.front().count
    << " molecules), >= " << fmt(thresholds[1], 3) << ": " << (curve[1].auc ? fmt(*curve[1].auc) : "NA") << ", >= "
    << fmt(thresholds[2], 3) << ": " << fmt(*curve.back().auc) << " (" << curve.back().count << " molecules)";
  return verdict(*curve.back().auc <= *curve.front().auc, s.str());
}

Outcome variability() {
  Rng rng(808);
  double worst = 0.0;
  int compared = 0;
  for (int instance = 0; instance < 10; ++instance) {
    eval::RepeatMeasurements r;
    r.targets = {"t"};
    r.outcomes.resize(1);
    const int pairs = 4 + static_cast<int>(rng.below(7));
    for (int i = 0; i < pairs; ++i) {
      std::vector<int> reps(2 + rng.below(2));
      const int v = rng.bernoulli(0.5) ? 1 : 0;
      for (auto& x : reps) x = v;
      if (rng.bernoulli(0.3)) reps.back() = 1 - v;
      r.outcomes[0].push_back(reps);
    }
    const auto exact = oracle::variability_exact(r.outcomes[0]);
    const auto mc = eval::variability_auc(r, kVariabilityTrials, 900 + static_cast<std::uint64_t>(instance));
    if (exact.has_value() != mc.per_target[0].has_value()) return {Status::Fail, "definedness differs"};
    if (exact) {
      worst = std::max(worst, std::abs(*exact - *mc.per_target[0]));
      ++compared;
    }
  }
  eval::RepeatMeasurements homo{{"a"}, {{{1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0}}}};
  const double h = eval::variability_auc(homo, kVariabilityTrials, 1).mean;
  eval::RepeatMeasurements contra;
  contra.targets = {"a"};
  contra.outcomes.resize(1);
  for (int i = 0; i < 200; ++i) contra.outcomes[0].push_back({0, 1});
  const double c = eval::variability_auc(contra, kVariabilityTrials, 2).mean;
  const bool ok = compared > 0 && worst <= kVariabilityTolerance && h == 1.0 &&
                  std::abs(c - 0.5) <= kVariabilityTolerance;
  return verdict(ok, std::to_string(compared) + " instances, max |MC - exact| " + fmt(worst) + ", homogeneous " +
                         fmt(h) + ", contradictory " + fmt(c));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  std::vector<std::string> reports;
  for (const char* dir : {"toxblend_acc_det_a", "toxblend_acc_det_b"}) {
    const auto out = fs::temp_directory_path() / dir;
    fs::remove_all(out);
    json j = synthetic_config(400, out);
    j["members"] = {"gbm-pld", "gbm-fingerprint", "mlp-fingerprint"};
    j["seeds"] = {4, 5};
    cli::cmd_evaluate(cli::resolve_config(j));
    reports.push_back(slurp(cli::report_path(cli::resolve_config(j), dataset::SplitStrategy::Random)));
  }
  return verdict(!reports[0].empty() && reports[0] == reports[1],
                 "two evaluate runs, reports of " + std::to_string(reports[0].size()) + " bytes " +
                     (reports[0] == reports[1] ? "identical" : "differ"));
}

}  // namespace
}  // namespace toxblend

int main() {
  using namespace toxblend;
  log::set_sink([](log::Level level, std::string_view message) {
    if (level == log::Level::Warning) std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
  });
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"auc-oracle", auc_oracle},
      {"gradient-check", gradient_checks},
      {"gbm-split-search", gbm_split_search},
      {"monotone-blend", monotone_blend},
      {"scaffold-leakage", scaffold_leakage},
      {"synthetic-end-to-end", synthetic_end_to_end},
      {"tox21-smoke", tox21_smoke},
      {"permutation-importance", permutation_importance},
      {"reliability-trend", reliability_trend},
      {"variability", variability},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failures;
    std::printf("%s %s: %s [%.1fs]\n", tag, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
