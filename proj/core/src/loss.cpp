#include "stormwarn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "stormwarn/errors.hpp"

namespace stormwarn {

void LossWeights::validate() const {
  if (!(beta0 > 0.0) || !(beta1 > 0.0))
    throw InputError("loss weights must be positive");
}

namespace {

LossWeights weights_from_counts(std::size_t positives, std::size_t negatives) {
  if (positives == 0 || negatives == 0)
    throw InputError("class weights need at least one sample of each class");
  return {1.0 / static_cast<double>(negatives),
          1.0 / static_cast<double>(positives)};
}

}  // namespace

LossWeights class_weights(std::span<const std::uint8_t> labels) {
  std::size_t pos = 0;
  for (auto y : labels) pos += y != 0;
  return weights_from_counts(pos, labels.size() - pos);
}

LossWeights class_weights(const LabelSeries& labels) {
  return weights_from_counts(labels.positives(), labels.negatives());
}

double class_balanced_ce(std::span<const double> probs,
                         std::span<const std::uint8_t> labels,
                         const LossWeights& weights) {
  if (probs.size() != labels.size())
    throw AlignmentError("probabilities and labels have different lengths");
  weights.validate();
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p =
        std::clamp(probs[i], kProbClipEpsilon, 1.0 - kProbClipEpsilon);
    if (labels[i])
      loss -= weights.beta1 * std::log(p);
    else
      loss -= weights.beta0 * std::log(1.0 - p);
  }
  return loss;
}

std::vector<double> class_balanced_ce_grad(std::span<const double> probs,
                                           std::span<const std::uint8_t> labels,
                                           const LossWeights& weights) {
  if (probs.size() != labels.size())
    throw AlignmentError("probabilities and labels have different lengths");
  weights.validate();
  std::vector<double> grad(probs.size(), 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < kProbClipEpsilon || probs[i] > 1.0 - kProbClipEpsilon)
      continue;  // flat under the clip
    if (labels[i])
      grad[i] = -weights.beta1 / probs[i];
    else
      grad[i] = weights.beta0 / (1.0 - probs[i]);
  }
  return grad;
}

}  // namespace stormwarn
