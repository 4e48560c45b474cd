#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/blend/featurizers.hpp"
#include "toxblend/gbm/gbm.hpp"
#include "toxblend/nn/gcn.hpp"
#include "toxblend/nn/mlp.hpp"

namespace toxblend::blend {

enum class ModelKind { Gbm, Mlp, Gcn };

std::string_view kind_name(ModelKind k);
ModelKind parse_kind(std::string_view name);

/// How one ensemble member is trained. The gcn reads graphs and ignores the
/// family. Grids hold the candidates tried on the validation fold.
struct MemberRecipe {
  ModelKind kind = ModelKind::Gbm;
  featurize::Family family = featurize::Family::Fingerprint;
  gbm::GbmConfig gbm;
  std::vector<double> eta_grid;                      // empty: gbm.eta only
  nn::MlpConfig mlp;
  std::vector<std::pair<int, int>> architecture_grid;  // (layers, width); empty: mlp's own
  nn::GcnConfig gcn;

  /// "gbm-fingerprint", "mlp-pld", "gcn-graph".
  std::string name() const;
};

nlohmann::json to_json(const MemberRecipe& r);
MemberRecipe recipe_from_json(const nlohmann::json& j);
/// Recipe from a "<kind>-<family>" name with default hyperparameters.
MemberRecipe recipe_from_name(std::string_view name);

/// Per-column affine scaling fitted on training rows (used for mlp inputs).
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

struct TrainedMember {
  MemberRecipe recipe;
  int targets = 0;
  std::variant<gbm::BoostedModel, nn::MlpModel, nn::GcnModel> model;
  std::optional<Standardizer> standardizer;
  double selection_auc = 0.0;  // validation mean AUC of the chosen candidate
};

/// Inputs for one set of molecules: the family matrix (ignored by gcn) and graphs.
struct MemberInputs {
  const Matrix* features = nullptr;
  std::span<const chem::MolecularGraph> graphs;
};

TrainedMember train_member(const MemberRecipe& recipe, const MemberInputs& train, const LabelMatrix& y_train,
                           const MemberInputs& valid, const LabelMatrix& y_valid, std::uint64_t seed);

/// Molecules x targets probabilities.
Matrix predict_member(const TrainedMember& m, const MemberInputs& in);

nlohmann::json to_json(const TrainedMember& m);
TrainedMember member_from_json(const nlohmann::json& j);

/// Unweighted mean over targets of the defined per-target AUCs; NaN if none.
double mean_target_auc(const LabelMatrix& y, const Matrix& scores);

}  // namespace toxblend::blend
