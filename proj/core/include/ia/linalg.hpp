#pragma once

#include <complex>
#include <vector>

namespace ia::lin {

using cplx = std::complex<double>;

/**
 * Dense complex matrix, column-major storage.
 *
 * Sized for desk-scale problems (dimensions in the tens); all routines in
 * this module are deterministic dense algorithms, so repeated runs on the
 * same input produce bit-identical output.
 */
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(j) * rows_ + i]; }
  const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(j) * rows_ + i]; }

  /// Reshape and zero-fill. Keeps the existing heap allocation when possible.
  void resize(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    a_.assign(static_cast<size_t>(rows) * cols, cplx{});
  }

  void set_zero() { std::fill(a_.begin(), a_.end(), cplx{}); }

  Matrix adjoint() const;
  double frobenius_norm() const;
  double max_abs() const;

  const std::vector<cplx>& data() const { return a_; }
  std::vector<cplx>& data() { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

using Vector = std::vector<cplx>;

double norm(const Vector& x);
/// Conjugate inner product x^H y.
cplx dot(const Vector& x, const Vector& y);
void normalize(Vector& x);

Vector matvec(const Matrix& a, const Vector& x);
void matvec_into(const Matrix& a, const Vector& x, Vector& out);
/// a^H x without forming the adjoint.
Vector adjoint_matvec(const Matrix& a, const Vector& x);

Matrix multiply(const Matrix& a, const Matrix& b);
/// a += w * b (same shape).
void add_scaled(Matrix& a, const Matrix& b, cplx w);
/// a += w * x x^H (rank-one Hermitian update).
void add_outer(Matrix& a, const Vector& x, double w);

/**
 * Hermitian eigendecomposition by cyclic complex Jacobi rotations.
 *
 * Reusable object: compute() overwrites internal workspace buffers, so a
 * caller iterating over many small problems pays no per-call allocation
 * after warm-up. Eigenvalues come out in ascending order with a stable
 * tie-break on the original diagonal position, eigenvectors as matching
 * unitary columns.
 */
class HermitianEig {
 public:
  /// Throws EigenFailure if the off-diagonal mass has not vanished after
  /// max_sweeps cyclic sweeps (does not happen for finite input).
  void compute(const Matrix& h, int max_sweeps = 100);

  const std::vector<double>& values() const { return vals_; }
  const Matrix& vectors() const { return v_; }

 private:
  Matrix a_, v_;
  std::vector<double> vals_;
  std::vector<int> order_;
};

/// Singular values in descending order, via one-sided (Hestenes) Jacobi.
/// Works on the adjoint when rows < cols; small singular values keep high
/// relative accuracy, which the rank threshold below depends on.
std::vector<double> singular_values(const Matrix& a, int max_sweeps = 60);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const Matrix& a, double rel_tol = 1e-8);

/// Modified Gram-Schmidt basis of span{vs}, skipping directions whose
/// residual falls below tol relative to the input norm.
std::vector<Vector> orthonormal_basis(const std::vector<Vector>& vs, double tol = 1e-12);

/// Component of x orthogonal to the span of an orthonormal set.
Vector project_out(const Vector& x, const std::vector<Vector>& onb);

}  // namespace ia::lin
