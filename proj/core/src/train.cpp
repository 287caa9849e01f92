#include "stormwarn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stormwarn/errors.hpp"
#include "stormwarn/loss.hpp"
#include "stormwarn/rng.hpp"

namespace stormwarn {

void TrainConfig::validate() const {
  if (epochs < 1) throw InputError("epoch count must be at least 1");
  if (hidden_units < 1) throw InputError("hidden layer needs at least one unit");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (batch_size < 1) throw InputError("batch size must be at least 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw InputError("Adam decay rates must lie in [0,1)");
  if (!(adam_epsilon > 0.0)) throw InputError("Adam epsilon must be positive");
}

void SplitData::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw AlignmentError("feature rows and labels differ in count");
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Adam first/second moments for one parameter block.
struct Moments {
  Eigen::ArrayXXd m;
  Eigen::ArrayXXd v;
  Moments(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::ArrayXXd::Zero(rows, cols)),
        v(Eigen::ArrayXXd::Zero(rows, cols)) {}
};

template <typename ParamT, typename GradT>
void adam_update(ParamT& param, const GradT& grad, Moments& mom,
                 const TrainConfig& cfg, long step) {
  mom.m = cfg.adam_beta1 * mom.m + (1.0 - cfg.adam_beta1) * grad.array();
  mom.v =
      cfg.adam_beta2 * mom.v + (1.0 - cfg.adam_beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
  param.array() -= cfg.learning_rate * (mom.m / bc1) /
                   ((mom.v / bc2).sqrt() + cfg.adam_epsilon);
}

}  // namespace

std::vector<double> toy_classifier_probs(const ToyClassifierParams& params,
                                         const Eigen::MatrixXd& features) {
  if (features.cols() != params.W1.cols())
    throw AlignmentError("feature width does not match the first layer");
  std::vector<double> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Eigen::VectorXd a =
        (params.W1 * features.row(i).transpose() + params.b1)
            .array()
            .tanh()
            .matrix();
    out[static_cast<std::size_t>(i)] = sigmoid(params.w2.dot(a) + params.b2);
  }
  return out;
}

TrainResult train_toy_classifier(const SplitData& train,
                                 const SplitData& validation,
                                 const SplitData& test, const TrainConfig& cfg) {
  cfg.validate();
  train.validate();
  validation.validate();
  test.validate();
  if (train.features.rows() == 0) throw InputError("training split is empty");
  if (validation.features.cols() != train.features.cols() ||
      test.features.cols() != train.features.cols())
    throw AlignmentError("splits disagree on the feature width");
  const LossWeights split_weights = class_weights(train.labels);

  const Eigen::Index d = train.features.cols();
  const Eigen::Index h = cfg.hidden_units;
  const std::size_t n = train.labels.size();

  // Scaled uniform init, limit sqrt(6/(fan_in+fan_out)); biases start at 0.
  Rng init_rng(child_seed(cfg.seed, "toy-classifier-init"));
  ToyClassifierParams p;
  p.W1 = Eigen::MatrixXd::Zero(h, d);
  p.b1 = Eigen::VectorXd::Zero(h);
  p.w2 = Eigen::VectorXd::Zero(h);
  const double lim1 = std::sqrt(6.0 / static_cast<double>(d + h));
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      p.W1(r, c) = (2.0 * init_rng.uniform01() - 1.0) * lim1;
  const double lim2 = std::sqrt(6.0 / static_cast<double>(h + 1));
  for (Eigen::Index r = 0; r < h; ++r)
    p.w2(r) = (2.0 * init_rng.uniform01() - 1.0) * lim2;

  Moments mW1(h, d), mb1(h, 1), mw2(h, 1), mb2(1, 1);
  long step = 0;

  Rng shuffle_rng(child_seed(cfg.seed, "toy-classifier-shuffle"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.probs.train.probs.reserve(static_cast<std::size_t>(cfg.epochs));
  result.probs.validation.probs.reserve(static_cast<std::size_t>(cfg.epochs));
  result.probs.test.probs.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<double> batch_probs;
  std::vector<std::uint8_t> batch_labels;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n;
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(n, begin + static_cast<std::size_t>(cfg.batch_size));
      const std::size_t b = end - begin;

      batch_labels.resize(b);
      for (std::size_t i = 0; i < b; ++i)
        batch_labels[i] = train.labels[order[begin + i]];
      LossWeights w;
      try {
        w = class_weights(batch_labels);
      } catch (const InputError&) {
        w = split_weights;  // single-class batch
      }

      Eigen::MatrixXd X(b, d);
      for (std::size_t i = 0; i < b; ++i)
        X.row(static_cast<Eigen::Index>(i)) =
            train.features.row(static_cast<Eigen::Index>(order[begin + i]));
      const Eigen::MatrixXd A = ((X * p.W1.transpose()).rowwise() +
                                 p.b1.transpose())
                                    .array()
                                    .tanh()
                                    .matrix();  // (b, h)
      Eigen::VectorXd z2 = A * p.w2;
      z2.array() += p.b2;
      batch_probs.resize(b);
      for (std::size_t i = 0; i < b; ++i)
        batch_probs[i] = sigmoid(z2(static_cast<Eigen::Index>(i)));
      epoch_loss += class_balanced_ce(batch_probs, batch_labels, w);

      // dLoss/dz2 composed through the sigmoid analytically.
      Eigen::VectorXd dz2(static_cast<Eigen::Index>(b));
      for (std::size_t i = 0; i < b; ++i) {
        const double y = batch_labels[i] ? 1.0 : 0.0;
        const double prob = batch_probs[i];
        dz2(static_cast<Eigen::Index>(i)) =
            -w.beta1 * y * (1.0 - prob) + w.beta0 * (1.0 - y) * prob;
      }
      const Eigen::VectorXd dw2 = A.transpose() * dz2;
      const double db2 = dz2.sum();
      const Eigen::MatrixXd dA = dz2 * p.w2.transpose();  // (b, h)
      const Eigen::MatrixXd dZ1 =
          (dA.array() * (1.0 - A.array().square())).matrix();
      const Eigen::MatrixXd dW1 = dZ1.transpose() * X;  // (h, d)
      const Eigen::VectorXd db1 = dZ1.colwise().sum();

      ++step;
      adam_update(p.W1, dW1, mW1, cfg, step);
      adam_update(p.b1, db1, mb1, cfg, step);
      adam_update(p.w2, dw2, mw2, cfg, step);
      mb2.m(0, 0) = cfg.adam_beta1 * mb2.m(0, 0) + (1.0 - cfg.adam_beta1) * db2;
      mb2.v(0, 0) =
          cfg.adam_beta2 * mb2.v(0, 0) + (1.0 - cfg.adam_beta2) * db2 * db2;
      const double bc1 =
          1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double bc2 =
          1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      p.b2 -= cfg.learning_rate * (mb2.m(0, 0) / bc1) /
              (std::sqrt(mb2.v(0, 0) / bc2) + cfg.adam_epsilon);
    }
    if (!std::isfinite(epoch_loss))
      throw InputError("training diverged at epoch " + std::to_string(epoch + 1));

    result.epoch_loss.push_back(epoch_loss);
    result.snapshots.push_back(p);
    result.probs.train.probs.push_back(toy_classifier_probs(p, train.features));
    result.probs.validation.probs.push_back(
        toy_classifier_probs(p, validation.features));
    result.probs.test.probs.push_back(toy_classifier_probs(p, test.features));
  }
  return result;
}

}  // namespace stormwarn
