#pragma once

#include <vector>

#include "pqec/matcore.hpp"

namespace pqec {

// Relative eigenvalue threshold below which Choi eigenvalues count as zero.
inline constexpr double kChoiRankTol = 1e-9;

// Completely positive trace-non-increasing map, stored as a Kraus list of
// out_dim x in_dim operators. Immutable after construction.
class Subchannel {
 public:
  // Validates sum K+K <= 1 within tol and consistent shapes.
  static Subchannel make(std::vector<ComplexMatrix> kraus, double tol = kDefaultTol);
  // Skips the trace-non-increasing check; for solver intermediates.
  static Subchannel make_unchecked(std::vector<ComplexMatrix> kraus);

  static Subchannel identity(int d);
  // Kraus |i><i|: kills all off-diagonal entries.
  static Subchannel dephasing(int d);
  // Y -> tr(Y) * I/d.
  static Subchannel depolarizing(int d);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  bool is_channel() const { return is_channel_; }
  bool is_trace_preserving(double tol = kDefaultTol) const;
  bool is_trace_nonincreasing(double tol = kDefaultTol) const;

  // Sum_i K_i X K_i+.
  ComplexMatrix apply(const ComplexMatrix& x) const;
  // Sum_i K_i+ K_i.
  ComplexMatrix kraus_sum() const;

 private:
  Subchannel(std::vector<ComplexMatrix> kraus, int in_dim, int out_dim, bool is_channel)
      : kraus_(std::move(kraus)), in_dim_(in_dim), out_dim_(out_dim), is_channel_(is_channel) {}

  std::vector<ComplexMatrix> kraus_;
  int in_dim_;
  int out_dim_;
  bool is_channel_;
};

struct ChoiOperator {
  ComplexMatrix matrix;  // (out_dim*in_dim) square
  int in_dim = 0;
  int out_dim = 0;
};

// Composition psi after phi; Kraus list {L_j K_i}.
Subchannel compose(const Subchannel& psi, const Subchannel& phi);
Subchannel tensor(const Subchannel& a, const Subchannel& b);

ChoiOperator choi(const Subchannel& phi);
// Applies a map through its Choi operator: tr_2(J (1 (x) X^T)).
ComplexMatrix apply_choi(const ChoiOperator& j, const ComplexMatrix& x);

// Kraus operators from the Choi eigendecomposition: mutually orthogonal under
// the Hilbert-Schmidt inner product, ordered by descending eigenvalue.
Subchannel canonical_kraus(const ChoiOperator& j, double tol = kChoiRankTol);
Subchannel canonicalize(const Subchannel& phi, double tol = kChoiRankTol);

int choi_rank(const Subchannel& phi, double tol = kChoiRankTol);

// Stinespring dilation A of shape (out_dim * r) x in_dim with r the Choi
// rank; phi(X) = tr_2(A X A+) with the environment as the second factor.
ComplexMatrix stinespring(const Subchannel& phi, double tol = kChoiRankTol);

// Channel with Kraus diag(d_i). Entrywise column normalization must be = 1
// (channel) or <= 1 (subchannel) within tolerance.
Subchannel schur_channel(const std::vector<std::vector<Complex>>& diagonals,
                         double tol = kDefaultTol);

bool is_schur(const Subchannel& phi, double tol = kDefaultTol);

}  // namespace pqec
