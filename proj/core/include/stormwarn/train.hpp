#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stormwarn/ensemble.hpp"

namespace stormwarn {

struct TrainConfig {
  int epochs = 100;
  int hidden_units = 8;
  double learning_rate = 0.001;
  int batch_size = 72;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  void validate() const;
};

// features: one row per sample.
struct SplitData {
  Eigen::MatrixXd features;
  std::vector<std::uint8_t> labels;
  void validate() const;
};

// One hidden tanh layer, sigmoid output.
struct ToyClassifierParams {
  Eigen::MatrixXd W1;  // (hidden, features)
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // (hidden)
  double b2 = 0.0;
};

std::vector<double> toy_classifier_probs(const ToyClassifierParams& params,
                                         const Eigen::MatrixXd& features);

struct TrainResult {
  RunSplits probs;  // per-epoch probabilities on train/validation/test
  std::vector<ToyClassifierParams> snapshots;  // one per epoch
  std::vector<double> epoch_loss;              // training loss per epoch
};

// Mini-batch Adam on the class-balanced cross-entropy. Weights are computed
// per batch; single-class batches fall back to the split-level weights.
// Fixed seed gives bit-identical trajectories.
TrainResult train_toy_classifier(const SplitData& train,
                                 const SplitData& validation,
                                 const SplitData& test, const TrainConfig& cfg);

}  // namespace stormwarn
