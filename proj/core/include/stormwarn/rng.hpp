#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace stormwarn {

// splitmix64 generator. Bit-reproducible across platforms, unlike the
// standard-library distributions, which the determinism contracts forbid.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Uniform integer in [0, n), rejection-sampled.
  std::uint64_t bounded(std::uint64_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates with explicit bounded draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent child seed from (seed, stream name). All generators
// in the project draw from streams created this way.
std::uint64_t child_seed(std::uint64_t seed, std::string_view stream);

}  // namespace stormwarn
