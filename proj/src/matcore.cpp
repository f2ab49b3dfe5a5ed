#include "pqec/matcore.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pqec {

namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Rotates the phase of column j so its largest-magnitude entry is real
// positive; ties go to the lowest index. Keeps decomposition bases
// reproducible across degenerate spectra.
void fix_column_phase(Eigen::MatrixXcd& m, int j) {
  int best = 0;
  double best_mag = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double mag = std::abs(m(i, j));
    if (mag > best_mag + 1e-14) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag < 1e-300) return;
  Complex phase = m(best, j) / best_mag;
  m.col(j) *= std::conj(phase);
}

bool column_less(const Eigen::MatrixXcd& m, int a, int b) {
  for (int i = 0; i < m.rows(); ++i) {
    const Complex &x = m(i, a), &y = m(i, b);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  require(rows > 0 && cols > 0, "matrix dimensions must be positive");
  data_.assign(static_cast<size_t>(rows) * cols, Complex(0.0, 0.0));
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(rows > 0 && cols > 0, "matrix dimensions must be positive");
  require(data_.size() == static_cast<size_t>(rows) * cols,
          "entry count does not match rows*cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = static_cast<int>(rows.size());
  require(rows_ > 0, "matrix dimensions must be positive");
  cols_ = static_cast<int>(rows.begin()->size());
  require(cols_ > 0, "matrix dimensions must be positive");
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    require(static_cast<int>(r.size()) == cols_, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(int d) {
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(int rows, int cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::basis_vector(int d, int i) {
  ComplexMatrix v(d, 1);
  v(i, 0) = 1.0;
  return v;
}

ComplexMatrix ComplexMatrix::basis_matrix(int rows, int cols, int i, int j) {
  ComplexMatrix m(rows, cols);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
  ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& other) const {
  require(rows_ == other.rows_ && cols_ == other.cols_, "shape mismatch in +");
  ComplexMatrix out = *this;
  for (size_t k = 0; k < data_.size(); ++k) out.data_[k] += other.data_[k];
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
  require(rows_ == other.rows_ && cols_ == other.cols_, "shape mismatch in -");
  ComplexMatrix out = *this;
  for (size_t k = 0; k < data_.size(); ++k) out.data_[k] -= other.data_[k];
  return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
  require(cols_ == other.rows_, "shape mismatch in *");
  ComplexMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const Complex a = (*this)(i, k);
      if (a == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

ComplexMatrix ComplexMatrix::operator*(Complex scalar) const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z *= scalar;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

Complex ComplexMatrix::trace() const {
  require(is_square(), "trace of a non-square matrix");
  Complex t(0.0, 0.0);
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::operator_norm() const {
  Eigen::JacobiSVD<Eigen::MatrixXcd> s(to_eigen(*this));
  return s.singularValues().size() ? s.singularValues()(0) : 0.0;
}

double ComplexMatrix::trace_norm() const {
  Eigen::JacobiSVD<Eigen::MatrixXcd> s(to_eigen(*this));
  return s.singularValues().sum();
}

bool ComplexMatrix::is_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!is_square()) return false;
  double dev = (*this - adjoint()).frobenius_norm();
  return dev <= tol * std::max(1.0, frobenius_norm());
}

ComplexMatrix ComplexMatrix::block(int i, int j, int nrows, int ncols) const {
  require(i >= 0 && j >= 0 && i + nrows <= rows_ && j + ncols <= cols_, "block out of range");
  ComplexMatrix out(nrows, ncols);
  for (int a = 0; a < nrows; ++a)
    for (int b = 0; b < ncols; ++b) out(a, b) = (*this)(i + a, j + b);
  return out;
}

void ComplexMatrix::set_block(int i, int j, const ComplexMatrix& b) {
  require(i >= 0 && j >= 0 && i + b.rows() <= rows_ && j + b.cols() <= cols_,
          "block out of range");
  for (int a = 0; a < b.rows(); ++a)
    for (int c = 0; c < b.cols(); ++c) (*this)(i + a, j + c) = b(a, c);
}

std::string ComplexMatrix::to_string(int precision) const {
  std::ostringstream os;
  os.precision(precision);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      const Complex& z = (*this)(i, j);
      os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
      if (j + 1 < cols_) os << " ";
    }
    os << "\n";
  }
  return os.str();
}

Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == 1 && b.cols() == 1 && a.rows() == b.rows(), "inner expects equal vectors");
  Complex s(0.0, 0.0);
  for (int i = 0; i < a.rows(); ++i) s += std::conj(a(i, 0)) * b(i, 0);
  return s;
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).frobenius_norm() <= tol * std::max(1.0, std::max(a.frobenius_norm(), b.frobenius_norm()));
}

ComplexMatrix vectorize(const ComplexMatrix& m) {
  ComplexMatrix v(m.rows() * m.cols(), 1);
  int k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v(k++, 0) = m(i, j);
  return v;
}

ComplexMatrix unvectorize(const ComplexMatrix& v, int rows, int cols) {
  require(v.cols() == 1 && v.rows() == rows * cols, "unvectorize size mismatch");
  ComplexMatrix m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v(k++, 0);
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const Complex z = a(i, j);
      if (z == Complex(0.0, 0.0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = z * b(k, l);
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int subsystem, int d1, int d2) {
  require(subsystem == 1 || subsystem == 2, "subsystem must be 1 or 2");
  require(m.is_square() && m.rows() == d1 * d2, "partial_trace dimension mismatch");
  if (subsystem == 1) {
    ComplexMatrix out(d2, d2);
    for (int i = 0; i < d2; ++i)
      for (int j = 0; j < d2; ++j)
        for (int a = 0; a < d1; ++a) out(i, j) += m(a * d2 + i, a * d2 + j);
    return out;
  }
  ComplexMatrix out(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int b = 0; b < d2; ++b) out(i, j) += m(i * d2 + b, j * d2 + b);
  return out;
}

Svd svd(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> s(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXcd u = s.matrixU();
  Eigen::MatrixXcd v = s.matrixV();
  const auto& sv = s.singularValues();
  // A joint phase on (u_k, v_k) leaves m invariant; pin it to u's side.
  for (int k = 0; k < sv.size(); ++k) {
    int best = 0;
    double best_mag = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      double mag = std::abs(u(i, k));
      if (mag > best_mag + 1e-14) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag < 1e-300) continue;
    Complex phase = u(best, k) / best_mag;
    u.col(k) *= std::conj(phase);
    v.col(k) *= std::conj(phase);
  }
  for (int k = sv.size(); k < u.cols(); ++k) fix_column_phase(u, k);
  for (int k = sv.size(); k < v.cols(); ++k) fix_column_phase(v, k);
  Svd out;
  out.u = from_eigen(u);
  out.v = from_eigen(v);
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

Eigh eigh(const ComplexMatrix& m, double hermiticity_tol) {
  require(m.is_hermitian(hermiticity_tol), "eigh expects a Hermitian matrix");
  // Work on the Hermitian part so round-off in the input cannot leak in.
  Eigen::MatrixXcd e = to_eigen(m);
  e = (e + e.adjoint().eval()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e);
  require(solver.info() == Eigen::Success, "eigendecomposition failed");
  const int n = m.rows();
  Eigen::MatrixXcd vecs = solver.eigenvectors();
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = solver.eigenvalues()(i);
  for (int j = 0; j < n; ++j) fix_column_phase(vecs, j);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals[a] != vals[b]) return vals[a] > vals[b];
    return column_less(vecs, a, b);
  });

  Eigh out;
  out.eigenvalues.resize(n);
  Eigen::MatrixXcd sorted(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = vals[order[j]];
    sorted.col(j) = vecs.col(order[j]);
  }
  out.vectors = from_eigen(sorted);
  return out;
}

int matrix_rank(const ComplexMatrix& m, double cutoff) {
  Svd s = svd(m);
  if (s.singular_values.empty()) return 0;
  double smax = s.singular_values.front();
  if (smax <= 0.0) return 0;
  int r = 0;
  for (double sv : s.singular_values)
    if (sv > cutoff * smax) ++r;
  return r;
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double cutoff) {
  Svd s = svd(m);
  double smax = s.singular_values.empty() ? 0.0 : s.singular_values.front();
  ComplexMatrix sigma_plus(m.cols(), m.rows());
  for (size_t k = 0; k < s.singular_values.size(); ++k) {
    double sv = s.singular_values[k];
    if (smax > 0.0 && sv > cutoff * smax)
      sigma_plus(static_cast<int>(k), static_cast<int>(k)) = 1.0 / sv;
  }
  return s.v * sigma_plus * s.u.adjoint();
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& p, double tol) {
  Eigh e = eigh(p, tol);
  double scale = std::max(1.0, e.eigenvalues.empty() ? 1.0 : std::abs(e.eigenvalues.front()));
  std::vector<Complex> roots(e.eigenvalues.size());
  for (size_t i = 0; i < e.eigenvalues.size(); ++i) {
    double v = e.eigenvalues[i];
    if (v < -tol * scale)
      throw std::invalid_argument("matrix_sqrt: eigenvalue " + std::to_string(v) +
                                  " below the PSD tolerance");
    roots[i] = std::sqrt(std::max(v, 0.0));
  }
  return e.vectors * ComplexMatrix::diagonal(roots) * e.vectors.adjoint();
}

std::vector<ComplexMatrix> null_space(const ComplexMatrix& l, double tol) {
  Svd s = svd(l);
  double scale = l.frobenius_norm();
  std::vector<ComplexMatrix> basis;
  int nsv = static_cast<int>(s.singular_values.size());
  for (int k = 0; k < l.cols(); ++k) {
    double sv = k < nsv ? s.singular_values[k] : 0.0;
    if (sv <= tol * std::max(scale, 1e-300)) basis.push_back(s.v.column(k));
  }
  if (scale == 0.0) {
    // L = 0: the whole domain is the null space.
    basis.clear();
    for (int k = 0; k < l.cols(); ++k) basis.push_back(ComplexMatrix::basis_vector(l.cols(), k));
  }
  return basis;
}

ComplexMatrix unitary_completion(int dim,
                                 const std::vector<std::pair<int, ComplexMatrix>>& columns,
                                 double tol) {
  require(static_cast<int>(columns.size()) <= dim, "too many prescribed columns");
  for (const auto& [slot, v] : columns) {
    require(slot >= 0 && slot < dim, "column slot out of range");
    require(v.rows() == dim && v.cols() == 1, "prescribed column has wrong shape");
  }
  for (size_t a = 0; a < columns.size(); ++a)
    for (size_t b = 0; b < columns.size(); ++b) {
      Complex g = inner(columns[a].second, columns[b].second);
      Complex want = a == b ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      if (std::abs(g - want) > std::sqrt(static_cast<double>(dim)) * 1e3 * tol)
        throw std::invalid_argument("unitary_completion: prescribed columns not orthonormal");
    }

  ComplexMatrix u(dim, dim);
  std::vector<bool> used_slot(dim, false);
  std::vector<ComplexMatrix> accepted;
  for (const auto& [slot, v] : columns) {
    require(!used_slot[slot], "duplicate column slot");
    used_slot[slot] = true;
    u.set_block(0, slot, v);
    accepted.push_back(v);
  }

  // Fill free slots: per slot, orthogonalize the canonical basis against the
  // accepted columns and keep the seed with the largest residual.
  for (int slot = 0; slot < dim; ++slot) {
    if (used_slot[slot]) continue;
    ComplexMatrix best(dim, 1);
    double best_norm = -1.0;
    for (int seed = 0; seed < dim; ++seed) {
      ComplexMatrix cand = ComplexMatrix::basis_vector(dim, seed);
      for (const auto& a : accepted) cand = cand - a * inner(a, cand);
      double n = cand.frobenius_norm();
      if (n > best_norm + 1e-12) {
        best_norm = n;
        best = cand;
      }
    }
    require(best_norm > 1e-8, "unitary_completion: degenerate span");
    best = best * Complex(1.0 / best_norm, 0.0);
    u.set_block(0, slot, best);
    accepted.push_back(best);
    used_slot[slot] = true;
  }
  return u;
}

ComplexMatrix unitary_completion(const ComplexMatrix& v, double tol) {
  std::vector<std::pair<int, ComplexMatrix>> cols;
  for (int j = 0; j < v.cols(); ++j) cols.emplace_back(j, v.column(j));
  return unitary_completion(v.rows(), cols, tol);
}

ComplexMatrix unitary_dilation(const ComplexMatrix& c, double tol) {
  require(c.is_square(), "unitary_dilation expects a square contraction");
  Svd s = svd(c);
  if (!s.singular_values.empty() && s.singular_values.front() > 1.0 + tol)
    throw std::invalid_argument("unitary_dilation: operator norm exceeds 1");
  const int n = c.rows();
  // All four blocks share one SVD so the unitarity cancellations are exact.
  std::vector<Complex> clipped(n), defect(n);
  for (int k = 0; k < n; ++k) {
    double sv = std::min(s.singular_values[k], 1.0);
    clipped[k] = sv;
    defect[k] = std::sqrt(std::max(0.0, 1.0 - sv * sv));
  }
  ComplexMatrix sigma = ComplexMatrix::diagonal(clipped);
  ComplexMatrix comp = ComplexMatrix::diagonal(defect);
  ComplexMatrix cc = s.u * sigma * s.v.adjoint();
  ComplexMatrix out(2 * n, 2 * n);
  out.set_block(0, 0, cc);
  out.set_block(0, n, s.u * comp * s.u.adjoint());
  out.set_block(n, 0, s.v * comp * s.v.adjoint());
  out.set_block(n, n, -cc.adjoint());
  return out;
}

}  // namespace pqec
