#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace pqec {

using Complex = std::complex<double>;

// Default relative tolerance for equality / proportionality checks.
inline constexpr double kDefaultTol = 1e-9;
// Relative singular-value cutoff for rank decisions and pseudo-inverses.
inline constexpr double kRankCutoff = 1e-7;

// Dense complex matrix, row-major storage. Column vectors are n x 1.
// All values are immutable in practice: operations return new matrices.
class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(int rows, int cols);
  ComplexMatrix(int rows, int cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(int d);
  static ComplexMatrix zero(int rows, int cols);
  // Computational basis column vector |i> in C^d.
  static ComplexMatrix basis_vector(int d, int i);
  // Matrix unit |i><j| of shape rows x cols.
  static ComplexMatrix basis_matrix(int rows, int cols, int i, int j);
  static ComplexMatrix diagonal(const std::vector<Complex>& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }
  const std::vector<Complex>& data() const { return data_; }

  ComplexMatrix operator+(const ComplexMatrix& other) const;
  ComplexMatrix operator-(const ComplexMatrix& other) const;
  ComplexMatrix operator*(const ComplexMatrix& other) const;
  ComplexMatrix operator*(Complex scalar) const;
  ComplexMatrix operator-() const { return *this * Complex(-1.0, 0.0); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  Complex trace() const;
  double frobenius_norm() const;
  // Largest singular value.
  double operator_norm() const;
  // Sum of singular values.
  double trace_norm() const;

  bool is_finite() const;
  bool is_hermitian(double tol = kDefaultTol) const;
  bool is_square() const { return rows_ == cols_; }

  // Extracts the block with upper-left corner (i, j).
  ComplexMatrix block(int i, int j, int nrows, int ncols) const;
  ComplexMatrix column(int j) const { return block(0, j, rows_, 1); }
  ComplexMatrix row(int i) const { return block(i, 0, 1, cols_); }
  void set_block(int i, int j, const ComplexMatrix& b);

  std::string to_string(int precision = 4) const;

 private:
  int rows_;
  int cols_;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator*(Complex scalar, const ComplexMatrix& m) { return m * scalar; }
inline ComplexMatrix operator*(double scalar, const ComplexMatrix& m) {
  return m * Complex(scalar, 0.0);
}

// <a|b> for column vectors (conjugate-linear in the first argument).
Complex inner(const ComplexMatrix& a, const ComplexMatrix& b);

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol = kDefaultTol);

// |M> : row-major flattening of M into a column vector of length rows*cols.
// The inverse is unvectorize(v, rows, cols).
ComplexMatrix vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexMatrix& v, int rows, int cols);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Partial trace of a (d1*d2)x(d1*d2) matrix over subsystem 1 or 2.
// Tracing subsystem 1 yields a d2 x d2 matrix, subsystem 2 a d1 x d1 one.
ComplexMatrix partial_trace(const ComplexMatrix& m, int subsystem, int d1, int d2);

// Moore-Penrose pseudo-inverse; singular values below cutoff * sigma_max are
// treated as zero.
ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double cutoff = kRankCutoff);

// Hermitian PSD square root. Eigenvalues in [-tol*scale, 0) are clamped to
// zero; anything below that is an error.
ComplexMatrix matrix_sqrt(const ComplexMatrix& p, double tol = kDefaultTol);

// Orthonormal basis of {v : ||Lv|| <= tol*||L||_F}, one column vector each.
std::vector<ComplexMatrix> null_space(const ComplexMatrix& l, double tol = kDefaultTol);

// Full SVD m = u * diag(s) * v.adjoint(), singular values descending.
// Singular vector phases are canonicalized for reproducibility.
struct Svd {
  ComplexMatrix u;
  std::vector<double> singular_values;
  ComplexMatrix v;
};
Svd svd(const ComplexMatrix& m);

// Hermitian eigendecomposition m = vectors * diag(values) * vectors.adjoint().
// Eigenvalues descending; degenerate spaces get a deterministic basis
// (eigenvector phases fixed, ties broken lexicographically).
struct Eigh {
  std::vector<double> eigenvalues;
  ComplexMatrix vectors;
};
Eigh eigh(const ComplexMatrix& m, double hermiticity_tol = kDefaultTol);

int matrix_rank(const ComplexMatrix& m, double cutoff = kRankCutoff);

// Unitary with prescribed orthonormal columns in the given slots; the free
// slots are filled from a deterministic seed basis.
ComplexMatrix unitary_completion(int dim,
                                 const std::vector<std::pair<int, ComplexMatrix>>& columns,
                                 double tol = kDefaultTol);
// Convenience: the k columns of v occupy slots 0..k-1.
ComplexMatrix unitary_completion(const ComplexMatrix& v, double tol = kDefaultTol);

// Block unitary [[C, (1-CC+)^1/2], [(1-C+C)^1/2, -C+]] for a contraction C;
// the upper-left block recovers C (singular values clipped to <= 1 first).
ComplexMatrix unitary_dilation(const ComplexMatrix& c, double tol = kDefaultTol);

}  // namespace pqec
