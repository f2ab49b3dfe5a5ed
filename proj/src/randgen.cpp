#include "pqec/randgen.hpp"

#include <cmath>
#include <stdexcept>

namespace pqec {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double u64_to_unit(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace

Rng::Rng(RngSeed s) {
  uint64_t key = s.seed;
  uint64_t a = splitmix64(key);
  key ^= 0xD2B74407B1CE6E93ull + s.stream;
  uint64_t b = splitmix64(key);
  uint64_t c = splitmix64(key);
  std::seed_seq seq{static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                    static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32),
                    static_cast<uint32_t>(c), static_cast<uint32_t>(c >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return u64_to_unit(engine_()); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted away from 0 so log stays finite.
  double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  const double s = std::sqrt(0.5);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = rng.normal() * s;
      double im = rng.normal() * s;
      g(i, j) = Complex(re, im);
    }
  return g;
}

Subchannel random_channel(int dim, int rank, Rng& rng) {
  if (rank < 1 || rank > dim * dim)
    throw std::invalid_argument("random_channel: rank must be in [1, dim^2]");
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<ComplexMatrix> g;
    g.reserve(rank);
    for (int i = 0; i < rank; ++i) g.push_back(ginibre(dim, dim, rng));
    ComplexMatrix q(dim, dim);
    for (const auto& gi : g) q = q + gi.adjoint() * gi;
    Eigh e = eigh(q, 1e-8);
    if (e.eigenvalues.back() <= 1e-12 * e.eigenvalues.front()) continue;
    std::vector<Complex> inv_sqrt(e.eigenvalues.size());
    for (size_t k = 0; k < e.eigenvalues.size(); ++k)
      inv_sqrt[k] = 1.0 / std::sqrt(e.eigenvalues[k]);
    ComplexMatrix q_inv_half =
        e.vectors * ComplexMatrix::diagonal(inv_sqrt) * e.vectors.adjoint();
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(rank);
    for (const auto& gi : g) kraus.push_back(gi * q_inv_half);
    return Subchannel::make(std::move(kraus), 1e-7);
  }
  throw std::runtime_error("random_channel: normalization stayed singular after resampling");
}

Subchannel random_schur_channel(int dim, int rank, Rng& rng) {
  if (rank < 1 || rank > dim)
    throw std::invalid_argument("random_schur_channel: rank must be in [1, dim]");
  ComplexMatrix coeff = ginibre(rank, dim, rng);
  std::vector<std::vector<Complex>> diagonals(rank, std::vector<Complex>(dim));
  for (int j = 0; j < dim; ++j) {
    double w = 0.0;
    for (int i = 0; i < rank; ++i) w += std::norm(coeff(i, j));
    double inv = 1.0 / std::sqrt(w);
    for (int i = 0; i < rank; ++i) diagonals[i][j] = coeff(i, j) * inv;
  }
  return schur_channel(diagonals);
}

ComplexMatrix random_pure_state(int dim, Rng& rng) {
  ComplexMatrix v = ginibre(dim, 1, rng);
  double n = v.frobenius_norm();
  return v * Complex(1.0 / n, 0.0);
}

ComplexMatrix random_isometry(int rows, int cols, Rng& rng) {
  if (cols > rows) throw std::invalid_argument("random_isometry: cols must not exceed rows");
  ComplexMatrix g = ginibre(rows, cols, rng);
  // Modified Gram-Schmidt; Ginibre columns are a.s. independent.
  ComplexMatrix out(rows, cols);
  std::vector<ComplexMatrix> basis;
  for (int j = 0; j < cols; ++j) {
    ComplexMatrix v = g.column(j);
    for (const auto& b : basis) v = v - b * inner(b, v);
    double n = v.frobenius_norm();
    if (n < 1e-12) throw std::runtime_error("random_isometry: degenerate sample");
    v = v * Complex(1.0 / n, 0.0);
    out.set_block(0, j, v);
    basis.push_back(v);
  }
  return out;
}

ComplexMatrix random_unitary(int dim, Rng& rng) { return random_isometry(dim, dim, rng); }

double shot_uniform(RngSeed seed, uint64_t shot, uint32_t draw) {
  uint64_t key = seed.seed;
  key ^= 0x9E3779B97F4A7C15ull * (seed.stream + 0x632BE59BD9B4E019ull);
  key ^= (shot + 1) * 0xFF51AFD7ED558CCDull;
  key ^= (static_cast<uint64_t>(draw) + 1) * 0xC4CEB9FE1A85EC53ull;
  splitmix64(key);
  return u64_to_unit(splitmix64(key));
}

}  // namespace pqec
