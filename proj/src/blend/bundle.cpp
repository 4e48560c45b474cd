#include "toxblend/blend/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toxblend/checksum.hpp"
#include "toxblend/chem/smiles.hpp"
#include "toxblend/chem/writer.hpp"
#include "toxblend/featurize/similarity.hpp"

namespace toxblend::blend {

namespace fs = std::filesystem;

double reliability_threshold(std::span<const featurize::BitVector> train, int k, double q) {
  if (train.size() < 2) throw DataError("reliability threshold needs at least two reference molecules");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile must lie in [0, 1]");
  std::vector<double> d;
  d.reserve(train.size());
  const int kk = std::min<int>(k, static_cast<int>(train.size()) - 1);
  for (std::size_t i = 0; i < train.size(); ++i) d.push_back(featurize::jaccard_knn_distance_excluding(train, i, kk));
  std::sort(d.begin(), d.end());
  const double pos = q * static_cast<double>(d.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, d.size() - 1);
  return d[lo] + (pos - static_cast<double>(lo)) * (d[hi] - d[lo]);
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
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

nlohmann::json file_entry(const fs::path& dir, const std::string& name, const std::string& text) {
  write_text(dir / name, text);
  return {{"file", name}, {"sha256", sha256_hex(text)}};
}

std::string verified(const fs::path& dir, const nlohmann::json& entry) {
  const auto name = entry.at("file").get<std::string>();
  if (name.find('/') != std::string::npos || name.find("..") != std::string::npos) {
    throw DataError("bundle file name escapes the bundle: " + name);
  }
  const std::string text = read_text(dir / name);
  if (sha256_hex(text) != entry.at("sha256").get<std::string>()) throw DataError("checksum mismatch for " + name);
  return text;
}

}  // namespace

void save_bundle(const Bundle& b, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  nlohmann::json manifest = {{"format", "toxblend-bundle"}, {"version", 1}, {"config_checksum", b.config_checksum},
                             {"knn_k", b.knn_k},           {"reliability_threshold", b.reliability_threshold}};
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : b.targets) {
    targets.push_back({{"name", t.name}, {"family", t.family},
                       {"cv_auc", t.cv_auc ? nlohmann::json(*t.cv_auc) : nlohmann::json()}});
  }
  manifest["targets"] = targets;
  manifest["featurizers"] = file_entry(root, "featurizers.json", to_json(b.featurizers).dump(1) + "\n");
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i = 0; i < b.members.size(); ++i) {
    const auto name = b.members[i].recipe.name();
    auto entry = file_entry(root, "member-" + std::to_string(i) + "-" + name + ".json", to_json(b.members[i]).dump() + "\n");
    entry["name"] = name;
    members.push_back(entry);
  }
  manifest["members"] = members;
  manifest["blend"] = b.blend ? file_entry(root, "blend.json", to_json(*b.blend).dump(1) + "\n") : nlohmann::json();
  std::string ref;
  for (const auto& fp : b.reference) ref += fp.to_string() + "\n";
  manifest["reference"] = file_entry(root, "reference_fingerprints.txt", ref);
  manifest["eval_report"] = file_entry(root, "eval_report.tsv", b.eval_report);
  const std::string text = manifest.dump(1) + "\n";
  write_text(root / "manifest.json", text);
  write_text(root / "manifest.sha256", sha256_hex(text) + "\n");
}

std::string bundle_checksum(const std::string& dir) {
  const fs::path root(dir);
  const std::string text = read_text(root / "manifest.json");
  std::string recorded = read_text(root / "manifest.sha256");
  while (!recorded.empty() && std::isspace(static_cast<unsigned char>(recorded.back()))) recorded.pop_back();
  const auto actual = sha256_hex(text);
  if (recorded != actual) throw DataError("manifest checksum mismatch in " + dir);
  return actual;
}

Bundle load_bundle(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw DataError("bundle directory not found: " + dir);
  bundle_checksum(dir);
  const auto manifest = nlohmann::json::parse(read_text(root / "manifest.json"));
  if (manifest.value("format", "") != "toxblend-bundle") throw DataError("not a toxblend bundle");
  if (manifest.at("version").get<int>() != 1) throw DataError("unsupported bundle version");
  Bundle b;
  b.config_checksum = manifest.at("config_checksum").get<std::string>();
  b.knn_k = manifest.at("knn_k").get<int>();
  b.reliability_threshold = manifest.at("reliability_threshold").get<double>();
  for (const auto& t : manifest.at("targets")) {
    TargetInfo info{t.at("name").get<std::string>(), t.at("family").get<std::string>(), std::nullopt};
    if (!t.at("cv_auc").is_null()) info.cv_auc = t.at("cv_auc").get<std::string>();
    b.targets.push_back(std::move(info));
  }
  b.featurizers = featurizers_from_json(nlohmann::json::parse(verified(root, manifest.at("featurizers"))));
  for (const auto& m : manifest.at("members")) {
    b.members.push_back(member_from_json(nlohmann::json::parse(verified(root, m))));
    if (b.members.back().recipe.name() != m.at("name").get<std::string>()) throw DataError("member manifest mismatch");
    if (b.members.back().targets != static_cast<int>(b.targets.size())) throw DataError("member target count mismatch");
  }
  if (b.members.empty()) throw DataError("bundle has no members");
  if (!manifest.at("blend").is_null()) {
    b.blend = blend_from_json(nlohmann::json::parse(verified(root, manifest.at("blend"))));
    std::vector<std::string> names;
    for (const auto& m : b.members) names.push_back(m.recipe.name());
    if (b.blend->members != names) throw DataError("blend member order differs from the bundle manifest");
  }
  std::istringstream ref(verified(root, manifest.at("reference")));
  for (std::string line; std::getline(ref, line);) {
    if (!line.empty()) b.reference.push_back(featurize::BitVector::from_string(line));
  }
  b.eval_report = verified(root, manifest.at("eval_report"));
  return b;
}

std::vector<Matrix> member_scores(const Bundle& b, FeatureCache& cache) {
  std::vector<Matrix> out;
  for (const auto& m : b.members) {
    MemberInputs in;
    if (m.recipe.kind != ModelKind::Gcn) in.features = &cache.matrix(m.recipe.family);
    in.graphs = cache.graphs();
    out.push_back(predict_member(m, in));
  }
  return out;
}

std::vector<MoleculePrediction> predict_bundle(const Bundle& b, std::span<const std::string> smiles,
                                               std::span<const int> target_filter) {
  std::vector<int> targets(target_filter.begin(), target_filter.end());
  if (targets.empty()) {
    for (std::size_t t = 0; t < b.targets.size(); ++t) targets.push_back(static_cast<int>(t));
  }
  for (int t : targets) {
    if (t < 0 || t >= static_cast<int>(b.targets.size())) throw DataError("target index out of range");
  }
  std::vector<MoleculePrediction> out(smiles.size());
  std::vector<chem::MolecularGraph> graphs;
  std::vector<std::string> valid_smiles;
  std::vector<std::size_t> slot;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    out[i].input = smiles[i];
    try {
      auto g = chem::parse_molecule(smiles[i]);
      out[i].canonical = chem::canonical_smiles(g);
      graphs.push_back(std::move(g));
      valid_smiles.push_back(smiles[i]);
      slot.push_back(i);
    } catch (const chem::ParseError& e) {
      out[i].error = e.reason();
    }
  }
  if (graphs.empty()) return out;
  FeatureCache cache(b.featurizers, graphs, valid_smiles);
  const auto scores = member_scores(b, cache);
  const Matrix final_scores = b.blend ? predict_blend(*b.blend, scores) : prediction_average(scores);
  const auto& fps = cache.fingerprints();
  for (std::size_t r = 0; r < slot.size(); ++r) {
    const double d = b.reference.empty()
                         ? 1.0
                         : featurize::jaccard_knn_distance(fps[r], b.reference,
                                                           std::min<int>(b.knn_k, static_cast<int>(b.reference.size())));
    auto& mp = out[slot[r]];
    for (int t : targets) {
      const auto& info = b.targets[static_cast<std::size_t>(t)];
      mp.targets.push_back({info.name, info.family, final_scores(static_cast<Eigen::Index>(r), t), info.cv_auc, d,
                            d <= b.reliability_threshold});
    }
  }
  return out;
}

}  // namespace toxblend::blend
