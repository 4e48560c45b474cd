#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/chem/graph.hpp"
#include "toxblend/common.hpp"
#include "toxblend/nn/adam.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::nn {

/// Element one-hot over a fixed palette plus "other", degree 0..5, aromatic
/// flag, attached hydrogens 0..4. Degree and H counts saturate at the top bin.
inline constexpr int kAtomFeatureWidth = 25;
Matrix atom_features(const chem::MolecularGraph& g);

struct GcnConfig {
  int rounds = 2;
  int hidden = 64;
  int fingerprint = 128;
  int batch_size = 64;
  AdamConfig adam;
  int max_epochs = 100;
  int patience = 25;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const GcnConfig& c);
GcnConfig gcn_config_from_json(const nlohmann::json& j);

/// Round r maps h^r (width conv[r].rows()) to h^{r+1}; readout[r] projects
/// h^{r+1} to fingerprint logits; head maps the fingerprint to targets.
struct GcnParams {
  std::vector<Matrix> conv;
  std::vector<Vector> conv_bias;
  std::vector<Matrix> readout;
  Matrix head;
  Vector head_bias;

  int rounds() const { return static_cast<int>(conv.size()); }
  int targets() const { return static_cast<int>(head.cols()); }
  void validate() const;

  Eigen::Index parameter_count() const;
  Vector flatten() const;
  void assign(const Vector& flat);
};

GcnParams init_gcn(int targets, const GcnConfig& config, Rng& rng);

struct GcnPass {
  Matrix features;
  std::vector<Matrix> aggregated;  // (A + I) h^r
  std::vector<Matrix> pre;         // before ReLU
  std::vector<Matrix> hidden;      // h^{r+1}
  std::vector<Matrix> softmax;     // per round readout
  Vector fingerprint;
  Vector probs;
};

GcnPass gcn_forward_pass(const GcnParams& p, const chem::MolecularGraph& g);
Vector gcn_forward(const GcnParams& p, const chem::MolecularGraph& g);
/// Parameter gradient given d loss / d probs for one graph.
GcnParams gcn_backward(const GcnParams& p, const chem::MolecularGraph& g, const GcnPass& pass, const Vector& dprobs);

/// masked_bce over a batch of graphs (rows of y) and its parameter gradient.
double gcn_loss_and_gradient(const GcnParams& p, std::span<const chem::MolecularGraph> graphs, const LabelMatrix& y,
                             GcnParams* grad);

struct GcnModel {
  GcnConfig config;
  GcnParams params;
  std::vector<double> train_log;
  std::vector<double> valid_log;  // index 0: initial parameters
  int best_epoch = 0;
};

GcnModel train_gcn(std::span<const chem::MolecularGraph> train, const LabelMatrix& y_train,
                   std::span<const chem::MolecularGraph> valid, const LabelMatrix& y_valid, const GcnConfig& config);

Matrix predict_gcn(const GcnModel& m, std::span<const chem::MolecularGraph> graphs);

nlohmann::json to_json(const GcnModel& m);
GcnModel gcn_from_json(const nlohmann::json& j);
void save_gcn(const GcnModel& m, const std::string& path);
GcnModel load_gcn(const std::string& path);

}  // namespace toxblend::nn
