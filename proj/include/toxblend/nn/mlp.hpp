#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/common.hpp"
#include "toxblend/nn/adam.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::nn {

inline constexpr double kProbEpsilon = 1e-7;
inline constexpr std::array<int, 2> kLayerGrid = {2, 3};
inline constexpr std::array<int, 3> kWidthGrid = {256, 516, 1024};
inline constexpr double kDenseDropout = 0.5;
inline constexpr double kSparseDropout = 0.1;

struct LossValue {
  double value = 0.0;
  Matrix grad;  // d loss / d yhat, zero at masked entries
};

/// Mean binary cross-entropy over the non-missing entries of y (rows are
/// molecules, columns targets). yhat is clamped to [eps, 1 - eps].
LossValue masked_bce(const LabelMatrix& y, const Matrix& yhat);

struct MlpConfig {
  int layers = 2;  // hidden layers
  int width = 256;
  double dropout = kDenseDropout;
  int batch_size = 512;
  AdamConfig adam;
  int max_epochs = 200;
  int patience = 25;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const MlpConfig& c);
MlpConfig mlp_config_from_json(const nlohmann::json& j);

/// Dense layers; weights[l] is (inputs x outputs). The last layer has one
/// unit per target.
struct NetworkParams {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  int input_dim() const { return static_cast<int>(weights.front().rows()); }
  int output_dim() const { return static_cast<int>(weights.back().cols()); }
  int hidden_layers() const { return static_cast<int>(weights.size()) - 1; }
  void validate() const;

  Eigen::Index parameter_count() const;
  Vector flatten() const;
  void assign(const Vector& flat);
};

/// He-uniform weights, zero biases.
NetworkParams init_network(int inputs, int outputs, int layers, int width, Rng& rng);

/// One matrix per hidden layer; entries 0 or 1/(1 - rate).
using DropoutMasks = std::vector<Matrix>;
DropoutMasks sample_dropout(const NetworkParams& p, Eigen::Index rows, double rate, Rng& rng);

struct ForwardPass {
  std::vector<Matrix> pre;     // hidden pre-activations
  std::vector<Matrix> inputs;  // input of each layer (after ReLU and dropout)
  Matrix probs;
};

ForwardPass forward_pass(const NetworkParams& p, const Matrix& x, const DropoutMasks* masks = nullptr);
Matrix forward(const NetworkParams& p, const Matrix& x, const DropoutMasks* masks = nullptr);

/// Gradient of a loss with respect to every parameter, given d loss / d probs.
NetworkParams backward(const NetworkParams& p, const ForwardPass& pass, const Matrix& dprobs,
                       const DropoutMasks* masks = nullptr);

/// masked_bce(y, forward(p, x)) and its parameter gradient.
double loss_and_gradient(const NetworkParams& p, const Matrix& x, const LabelMatrix& y, const DropoutMasks* masks,
                         NetworkParams* grad);

struct MlpModel {
  MlpConfig config;
  NetworkParams params;
  std::vector<double> train_log;  // mean batch loss per epoch
  std::vector<double> valid_log;  // index 0: initial parameters
  int best_epoch = 0;
};

MlpModel train_mlp(const Matrix& x_train, const LabelMatrix& y_train, const Matrix& x_valid,
                   const LabelMatrix& y_valid, const MlpConfig& config);

Matrix predict_mlp(const MlpModel& m, const Matrix& x);

nlohmann::json params_to_json(const NetworkParams& p);
NetworkParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);
void save_mlp(const MlpModel& m, const std::string& path);
MlpModel load_mlp(const std::string& path);

}  // namespace toxblend::nn
