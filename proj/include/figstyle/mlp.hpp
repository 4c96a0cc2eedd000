#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

// Single-hidden-layer ReLU classifier trained with softmax cross-entropy and Adam.
namespace figstyle::mlp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Also used for gradients and Adam moment estimates.
struct Params {
  MatrixXd w1;  // input_dim x hidden
  VectorXd b1;  // hidden
  MatrixXd w2;  // hidden x classes
  VectorXd b2;  // classes

  static Params zeros_like(const Params& p);
  bool all_finite() const;
};

struct AdamConfig {
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  AdamConfig adam;
  int max_epochs = 1000;
  bool early_stopping = true;
  double validation_fraction = 0.1;
  int patience = 10;
  double tolerance = 1e-4;
  std::size_t batch_size = 200;  // effective size is min(batch_size, n_train)
  std::size_t hidden_units = 1024;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
};

struct TrainReport {
  int epochs_run = 0;
  int best_epoch = 0;  // 1-based; 0 when no epoch ran
  double best_validation_score = 0.0;
  bool stopped_early = false;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::vector<double> loss_curve;        // mean training loss per epoch
  std::vector<double> validation_curve;  // validation accuracy per epoch
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static TrainReport from_json(const nlohmann::json& j);
};

struct MlpModel {
  Params params;
  std::vector<std::string> class_index;  // sorted labels
  std::string feature_spec;
  TrainReport train_report;

  Eigen::Index input_dim() const { return params.w1.rows(); }
  Eigen::Index hidden() const { return params.w1.cols(); }
  Eigen::Index classes() const { return params.w2.cols(); }
};

// Glorot-style uniform initialization, bound sqrt(6 / (fan_in + fan_out)), for
// weights and biases alike.
Params init_params(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes,
                   std::uint64_t seed);

struct ForwardPass {
  MatrixXd hidden;  // relu(X W1 + b1)
  MatrixXd probs;   // softmax(H W2 + b2), one row per sample
};

ForwardPass forward(const Params& p, const MatrixXd& X);

struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy
  Params grads;
};

LossAndGrads loss_and_grads(const Params& p, const MatrixXd& X, const MatrixXd& y_onehot);

struct AdamState {
  Params m;
  Params v;

  static AdamState zeros_like(const Params& p);
};

// Bias-corrected Adam update of one parameter block at step t (t >= 1).
template <typename Block>
void adam_update(Block& w, const Block& g, Block& m, Block& v, long t, const AdamConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  w.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
}

void adam_step(Params& params, const Params& grads, AdamState& state, long t,
               const AdamConfig& cfg);

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

TrainResult train(const MatrixXd& X, std::span<const std::string> y, const TrainConfig& config,
                  std::string feature_spec = {});

struct Prediction {
  std::vector<std::string> labels;
  std::vector<std::size_t> indices;
  MatrixXd probs;
};

// Argmax per row; ties go to the lower class index. Throws DataError on width mismatch.
Prediction predict(const MlpModel& model, const MatrixXd& X);

double accuracy(const MlpModel& model, const MatrixXd& X, std::span<const std::size_t> y);

nlohmann::json to_json(const MlpModel& model);
MlpModel model_from_json(const nlohmann::json& j);

}  // namespace figstyle::mlp
