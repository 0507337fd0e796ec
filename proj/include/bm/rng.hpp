#pragma once

#include <cstdint>

namespace bm {

// Deterministic RNG used throughout the library. All experiment results are
// reproducible from a single seed; sub-streams are derived with derive_seed so
// that unrelated consumers (weight init, per-iteration variational inits, data
// generation) do not share a stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Box-Muller; the spare draw is cached.
  double gaussian(double mean, double stddev);

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 mix of (seed, stream, index); cheap and collision-resistant
// enough for a handful of named streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index = 0);

}  // namespace bm
