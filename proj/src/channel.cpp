#include "pqec/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pqec {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool compute_is_channel(const std::vector<ComplexMatrix>& kraus, int in_dim, double tol) {
  ComplexMatrix s(in_dim, in_dim);
  for (const auto& k : kraus) s = s + k.adjoint() * k;
  return approx_equal(s, ComplexMatrix::identity(in_dim), tol);
}

}  // namespace

Subchannel Subchannel::make(std::vector<ComplexMatrix> kraus, double tol) {
  require(!kraus.empty(), "subchannel needs at least one Kraus operator");
  const int out_dim = kraus.front().rows();
  const int in_dim = kraus.front().cols();
  for (const auto& k : kraus) {
    require(k.rows() == out_dim && k.cols() == in_dim, "inconsistent Kraus shapes");
    require(k.is_finite(), "non-finite Kraus entries");
  }
  ComplexMatrix s(in_dim, in_dim);
  for (const auto& k : kraus) s = s + k.adjoint() * k;
  Eigh e = eigh(s, 1e-6);
  double lmax = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  if (lmax > 1.0 + std::max(tol, 1e4 * tol * lmax))
    throw std::invalid_argument("subchannel is trace increasing (max eigenvalue " +
                                std::to_string(lmax) + ")");
  bool chan = approx_equal(s, ComplexMatrix::identity(in_dim), tol);
  return Subchannel(std::move(kraus), in_dim, out_dim, chan);
}

Subchannel Subchannel::make_unchecked(std::vector<ComplexMatrix> kraus) {
  require(!kraus.empty(), "subchannel needs at least one Kraus operator");
  const int out_dim = kraus.front().rows();
  const int in_dim = kraus.front().cols();
  bool chan = compute_is_channel(kraus, in_dim, kDefaultTol);
  return Subchannel(std::move(kraus), in_dim, out_dim, chan);
}

Subchannel Subchannel::identity(int d) { return make({ComplexMatrix::identity(d)}); }

Subchannel Subchannel::dephasing(int d) {
  std::vector<ComplexMatrix> ks;
  for (int i = 0; i < d; ++i) ks.push_back(ComplexMatrix::basis_matrix(d, d, i, i));
  return make(std::move(ks));
}

Subchannel Subchannel::depolarizing(int d) {
  std::vector<ComplexMatrix> ks;
  const Complex w(1.0 / std::sqrt(static_cast<double>(d)), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ks.push_back(ComplexMatrix::basis_matrix(d, d, i, j) * w);
  return make(std::move(ks));
}

bool Subchannel::is_trace_preserving(double tol) const {
  return approx_equal(kraus_sum(), ComplexMatrix::identity(in_dim_), tol);
}

bool Subchannel::is_trace_nonincreasing(double tol) const {
  Eigh e = eigh(kraus_sum(), 1e-6);
  return e.eigenvalues.empty() || e.eigenvalues.front() <= 1.0 + tol;
}

ComplexMatrix Subchannel::apply(const ComplexMatrix& x) const {
  require(x.rows() == in_dim_ && x.cols() == in_dim_, "apply: dimension mismatch");
  ComplexMatrix out(out_dim_, out_dim_);
  for (const auto& k : kraus_) out = out + k * x * k.adjoint();
  return out;
}

ComplexMatrix Subchannel::kraus_sum() const {
  ComplexMatrix s(in_dim_, in_dim_);
  for (const auto& k : kraus_) s = s + k.adjoint() * k;
  return s;
}

Subchannel compose(const Subchannel& psi, const Subchannel& phi) {
  require(phi.out_dim() == psi.in_dim(), "compose: dimension mismatch");
  std::vector<ComplexMatrix> ks;
  ks.reserve(psi.kraus().size() * phi.kraus().size());
  for (const auto& l : psi.kraus())
    for (const auto& k : phi.kraus()) ks.push_back(l * k);
  return Subchannel::make_unchecked(std::move(ks));
}

Subchannel tensor(const Subchannel& a, const Subchannel& b) {
  std::vector<ComplexMatrix> ks;
  ks.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) ks.push_back(kron(ka, kb));
  return Subchannel::make_unchecked(std::move(ks));
}

ChoiOperator choi(const Subchannel& phi) {
  const int n = phi.out_dim() * phi.in_dim();
  ComplexMatrix j(n, n);
  for (const auto& k : phi.kraus()) {
    ComplexMatrix v = vectorize(k);
    j = j + v * v.adjoint();
  }
  return ChoiOperator{std::move(j), phi.in_dim(), phi.out_dim()};
}

ComplexMatrix apply_choi(const ChoiOperator& j, const ComplexMatrix& x) {
  require(x.rows() == j.in_dim && x.cols() == j.in_dim, "apply_choi: dimension mismatch");
  ComplexMatrix lifted = j.matrix * kron(ComplexMatrix::identity(j.out_dim), x.transpose());
  return partial_trace(lifted, 2, j.out_dim, j.in_dim);
}

Subchannel canonical_kraus(const ChoiOperator& j, double tol) {
  require(j.matrix.rows() == j.in_dim * j.out_dim, "Choi matrix has inconsistent dimensions");
  Eigh e = eigh(j.matrix, 1e-7);
  double lmax = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  if (!e.eigenvalues.empty() && e.eigenvalues.back() < -std::max(tol * lmax, tol))
    throw std::invalid_argument("canonical_kraus: Choi operator not PSD (min eigenvalue " +
                                std::to_string(e.eigenvalues.back()) + ")");
  std::vector<ComplexMatrix> ks;
  for (size_t m = 0; m < e.eigenvalues.size(); ++m) {
    double lam = e.eigenvalues[m];
    if (lam <= tol * std::max(lmax, 0.0)) break;
    ComplexMatrix k = unvectorize(e.vectors.column(static_cast<int>(m)), j.out_dim, j.in_dim);
    ks.push_back(k * Complex(std::sqrt(lam), 0.0));
  }
  if (ks.empty()) ks.push_back(ComplexMatrix::zero(j.out_dim, j.in_dim));
  return Subchannel::make_unchecked(std::move(ks));
}

Subchannel canonicalize(const Subchannel& phi, double tol) {
  return canonical_kraus(choi(phi), tol);
}

int choi_rank(const Subchannel& phi, double tol) {
  Eigh e = eigh(choi(phi).matrix, 1e-7);
  double lmax = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  if (lmax <= 0.0) return 0;
  int r = 0;
  for (double lam : e.eigenvalues)
    if (lam > tol * lmax) ++r;
  return r;
}

ComplexMatrix stinespring(const Subchannel& phi, double tol) {
  Subchannel canon = canonicalize(phi, tol);
  const int r = static_cast<int>(canon.kraus().size());
  ComplexMatrix a(phi.out_dim() * r, phi.in_dim());
  for (int i = 0; i < r; ++i) {
    const ComplexMatrix& k = canon.kraus()[i];
    for (int y = 0; y < phi.out_dim(); ++y)
      for (int x = 0; x < phi.in_dim(); ++x) a(y * r + i, x) = k(y, x);
  }
  return a;
}

Subchannel schur_channel(const std::vector<std::vector<Complex>>& diagonals, double tol) {
  require(!diagonals.empty(), "schur_channel needs at least one diagonal");
  const size_t s = diagonals.front().size();
  require(s > 0, "empty diagonal");
  bool all_one = true;
  for (size_t j = 0; j < s; ++j) {
    double w = 0.0;
    for (const auto& d : diagonals) {
      require(d.size() == s, "inconsistent diagonal lengths");
      w += std::norm(d[j]);
    }
    if (std::abs(w - 1.0) > 1e3 * tol) all_one = false;
    if (w > 1.0 + 1e3 * tol)
      throw std::invalid_argument("schur_channel: column normalization " + std::to_string(w) +
                                  " exceeds 1 at position " + std::to_string(j));
  }
  (void)all_one;
  std::vector<ComplexMatrix> ks;
  ks.reserve(diagonals.size());
  for (const auto& d : diagonals) ks.push_back(ComplexMatrix::diagonal(d));
  return Subchannel::make(std::move(ks), tol);
}

bool is_schur(const Subchannel& phi, double tol) {
  if (phi.in_dim() != phi.out_dim()) return false;
  for (const auto& k : phi.kraus()) {
    double off = 0.0;
    for (int i = 0; i < k.rows(); ++i)
      for (int j = 0; j < k.cols(); ++j)
        if (i != j) off += std::norm(k(i, j));
    if (std::sqrt(off) > tol * std::max(1.0, k.frobenius_norm())) return false;
  }
  return true;
}

}  // namespace pqec
