#include "ia/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ia/errors.hpp"

namespace ia::lin {

Matrix Matrix::adjoint() const {
  Matrix r(cols_, rows_);
  for (int j = 0; j < cols_; ++j)
    for (int i = 0; i < rows_; ++i) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

double norm(const Vector& x) {
  double s = 0.0;
  for (const cplx& z : x) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(const Vector& x, const Vector& y) {
  cplx s{};
  for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void normalize(Vector& x) {
  double n = norm(x);
  if (n > 0.0) {
    for (cplx& z : x) z /= n;
  }
}

Vector matvec(const Matrix& a, const Vector& x) {
  Vector out;
  matvec_into(a, x, out);
  return out;
}

void matvec_into(const Matrix& a, const Vector& x, Vector& out) {
  out.assign(a.rows(), cplx{});
  for (int j = 0; j < a.cols(); ++j) {
    cplx xj = x[j];
    if (xj == cplx{}) continue;
    for (int i = 0; i < a.rows(); ++i) out[i] += a(i, j) * xj;
  }
}

Vector adjoint_matvec(const Matrix& a, const Vector& x) {
  Vector out(a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    cplx s{};
    for (int i = 0; i < a.rows(); ++i) s += std::conj(a(i, j)) * x[i];
    out[j] = s;
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows(), b.cols());
  for (int j = 0; j < b.cols(); ++j)
    for (int k = 0; k < a.cols(); ++k) {
      cplx bkj = b(k, j);
      if (bkj == cplx{}) continue;
      for (int i = 0; i < a.rows(); ++i) r(i, j) += a(i, k) * bkj;
    }
  return r;
}

void add_scaled(Matrix& a, const Matrix& b, cplx w) {
  for (size_t i = 0; i < a.data().size(); ++i) a.data()[i] += w * b.data()[i];
}

void add_outer(Matrix& a, const Vector& x, double w) {
  int n = a.rows();
  for (int j = 0; j < n; ++j) {
    cplx xcj = w * std::conj(x[j]);
    for (int i = 0; i < n; ++i) a(i, j) += x[i] * xcj;
  }
}

namespace {

double off_diag_norm(const Matrix& a) {
  double s = 0.0;
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

void HermitianEig::compute(const Matrix& h, int max_sweeps) {
  if (h.rows() != h.cols()) throw DimensionMismatch("HermitianEig: matrix not square");
  int n = h.rows();
  a_ = h;
  v_ = Matrix::identity(n);
  vals_.assign(n, 0.0);
  if (n == 0) return;

  const double scale = a_.frobenius_norm();
  const double stop = 1e-14 * (scale + 1.0);

  bool converged = off_diag_norm(a_) <= stop;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx beta = a_(p, q);
        double r = std::abs(beta);
        if (r <= 1e-300) {
          a_(p, q) = a_(q, p) = 0.0;
          continue;
        }
        double alpha = a_(p, p).real();
        double gamma = a_(q, q).real();
        // Phase factor turning the (p,q) pivot real, then a real Jacobi
        // rotation annihilating it. Combined unitary: U(p,p)=c,
        // U(p,q)=s*e^{i phi}, U(q,p)=-s*e^{-i phi}, U(q,q)=c.
        cplx phase = beta / r;  // e^{i phi}
        double zeta = (gamma - alpha) / (2.0 * r);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        cplx sp = s * phase;             // s * e^{i phi}
        cplx spc = s * std::conj(phase); // s * e^{-i phi}

        // Columns: col_p <- c*col_p - s e^{-i phi} col_q ; col_q <- s e^{i phi} col_p + c*col_q.
        for (int i = 0; i < n; ++i) {
          cplx aip = a_(i, p), aiq = a_(i, q);
          a_(i, p) = c * aip - spc * aiq;
          a_(i, q) = sp * aip + c * aiq;
        }
        // Rows: row_p <- c*row_p - s e^{i phi} row_q ; row_q <- s e^{-i phi} row_p + c*row_q.
        for (int j = 0; j < n; ++j) {
          cplx apj = a_(p, j), aqj = a_(q, j);
          a_(p, j) = c * apj - sp * aqj;
          a_(q, j) = spc * apj + c * aqj;
        }
        a_(p, p) = alpha - t * r;
        a_(q, q) = gamma + t * r;
        a_(p, q) = a_(q, p) = 0.0;

        for (int i = 0; i < n; ++i) {
          cplx vip = v_(i, p), viq = v_(i, q);
          v_(i, p) = c * vip - spc * viq;
          v_(i, q) = sp * vip + c * viq;
        }
      }
    }
    converged = off_diag_norm(a_) <= stop;
  }
  if (!converged) throw EigenFailure("HermitianEig: Jacobi sweeps did not converge");

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int i, int j) { return a_(i, i).real() < a_(j, j).real(); });

  Matrix sorted(n, n);
  for (int j = 0; j < n; ++j) {
    vals_[j] = a_(order_[j], order_[j]).real();
    for (int i = 0; i < n; ++i) sorted(i, j) = v_(i, order_[j]);
  }
  v_ = std::move(sorted);
}

std::vector<double> singular_values(const Matrix& a, int max_sweeps) {
  if (a.rows() == 0 || a.cols() == 0) return {};
  Matrix g = (a.rows() >= a.cols()) ? a : a.adjoint();
  int m = g.rows(), n = g.cols();

  bool changed = true;
  int sweep = 0;
  for (; sweep < max_sweeps && changed; ++sweep) {
    changed = false;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double aa = 0.0, bb = 0.0;
        cplx cc{};
        for (int r = 0; r < m; ++r) {
          aa += std::norm(g(r, i));
          bb += std::norm(g(r, j));
          cc += std::conj(g(r, i)) * g(r, j);
        }
        double cmag = std::abs(cc);
        if (cmag <= 1e-14 * std::sqrt(aa * bb) || cmag <= 1e-300) continue;
        changed = true;
        cplx phase = cc / cmag;  // e^{i phi}; scaling col_j by e^{-i phi} makes the cross term real
        double zeta = (bb - aa) / (2.0 * cmag);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        cplx pc = std::conj(phase);
        for (int r = 0; r < m; ++r) {
          cplx gi = g(r, i);
          cplx gj = g(r, j) * pc;
          g(r, i) = c * gi - s * gj;
          g(r, j) = s * gi + c * gj;
        }
      }
    }
  }
  if (changed) throw EigenFailure("singular_values: one-sided Jacobi did not converge");

  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += std::norm(g(r, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

int numerical_rank(const Matrix& a, double rel_tol) {
  std::vector<double> sv = singular_values(a);
  if (sv.empty() || sv[0] == 0.0) return 0;
  double cut = rel_tol * sv[0];
  int rank = 0;
  for (double s : sv)
    if (s > cut) ++rank;
  return rank;
}

std::vector<Vector> orthonormal_basis(const std::vector<Vector>& vs, double tol) {
  std::vector<Vector> basis;
  for (const Vector& v : vs) {
    double vn = norm(v);
    if (vn <= 0.0) continue;
    Vector w = v;
    // Two projection passes (classical re-orthogonalization).
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : basis) {
        cplx c = dot(q, w);
        for (size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
      }
    }
    double wn = norm(w);
    if (wn > tol * vn) {
      for (cplx& z : w) z /= wn;
      basis.push_back(std::move(w));
    }
  }
  return basis;
}

Vector project_out(const Vector& x, const std::vector<Vector>& onb) {
  Vector w = x;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& q : onb) {
      cplx c = dot(q, w);
      for (size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
    }
  }
  return w;
}

}  // namespace ia::lin
