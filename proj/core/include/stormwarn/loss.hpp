#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stormwarn/series.hpp"

namespace stormwarn {

inline constexpr double kProbClipEpsilon = 1e-7;

struct LossWeights {
  double beta0 = 1.0;
  double beta1 = 1.0;
  void validate() const;
};

// beta1 = 1/#positives, beta0 = 1/#negatives. A single-class input is an
// error; batch-level callers fall back to split-level counts.
LossWeights class_weights(std::span<const std::uint8_t> labels);
LossWeights class_weights(const LabelSeries& labels);  // unmasked samples only

// -sum[beta1*y*log p + beta0*(1-y)*log(1-p)] with p clipped away from 0 and 1.
double class_balanced_ce(std::span<const double> probs,
                         std::span<const std::uint8_t> labels,
                         const LossWeights& weights);

// dLoss/dp per sample; zero where the clip is active.
std::vector<double> class_balanced_ce_grad(std::span<const double> probs,
                                           std::span<const std::uint8_t> labels,
                                           const LossWeights& weights);

}  // namespace stormwarn
