#pragma once

#include <cstdint>
#include <random>

#include "pqec/channel.hpp"
#include "pqec/matcore.hpp"

namespace pqec {

// Identical (seed, stream) pairs reproduce bit-identical sequences; parallel
// work derives disjoint streams from the same seed.
struct RngSeed {
  uint64_t seed = 0;
  uint64_t stream = 0;
};

class Rng {
 public:
  explicit Rng(RngSeed s);
  Rng(uint64_t seed, uint64_t stream = 0) : Rng(RngSeed{seed, stream}) {}

  uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  // Standard normal via Box-Muller on the raw engine output, so sequences do
  // not depend on the standard library's distribution internals.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Complex Ginibre matrix: independent N(0, 1/2) real and imaginary parts per
// entry (unit total complex variance). Draw order is row-major, real first.
ComplexMatrix ginibre(int rows, int cols, Rng& rng);

// Random channel of Choi rank r: Kraus {G_i Q^{-1/2}} with Q = sum G_i+ G_i.
// Resamples once if Q is numerically singular, then gives up.
Subchannel random_channel(int dim, int rank, Rng& rng);

// Random Schur channel: r diagonal vectors with unit per-column norm.
Subchannel random_schur_channel(int dim, int rank, Rng& rng);

// Normalized Ginibre column.
ComplexMatrix random_pure_state(int dim, Rng& rng);

// Ginibre followed by Gram-Schmidt orthonormalization.
ComplexMatrix random_unitary(int dim, Rng& rng);

// Random isometry of shape rows x cols (orthonormal columns).
ComplexMatrix random_isometry(int rows, int cols, Rng& rng);

// Counter-based uniform in [0, 1): depends only on (seed, shot, draw), so
// Monte-Carlo shards merge identically regardless of the shard layout.
double shot_uniform(RngSeed seed, uint64_t shot, uint32_t draw);

}  // namespace pqec
