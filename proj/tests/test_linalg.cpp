#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>

#include "ia/linalg.hpp"
#include "ia/rng.hpp"

using namespace ia;
using namespace ia::lin;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = rng.cgaussian();
  return m;
}

Matrix random_hermitian(int n, Rng& rng) {
  Matrix a = random_matrix(n, n, rng);
  Matrix h(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return h;
}

double residual_eig(const Matrix& h, const HermitianEig& eig) {
  // max_ij |H V - V diag(w)|
  const Matrix& v = eig.vectors();
  double worst = 0.0;
  for (int j = 0; j < h.cols(); ++j) {
    for (int i = 0; i < h.rows(); ++i) {
      cplx hv{};
      for (int l = 0; l < h.cols(); ++l) hv += h(i, l) * v(l, j);
      worst = std::max(worst, std::abs(hv - eig.values()[j] * v(i, j)));
    }
  }
  return worst;
}

double off_identity(const Matrix& v) {
  double worst = 0.0;
  for (int j = 0; j < v.cols(); ++j) {
    for (int i = 0; i < v.cols(); ++i) {
      cplx g{};
      for (int l = 0; l < v.rows(); ++l) g += std::conj(v(l, i)) * v(l, j);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("matrix basics") {
  Matrix m(2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  for (const auto& z : m.data()) CHECK(z == cplx{});

  m(0, 1) = {1.0, -2.0};
  Matrix ad = m.adjoint();
  CHECK(ad.rows() == 3);
  CHECK(ad.cols() == 2);
  CHECK(ad(1, 0) == cplx(1.0, 2.0));

  CHECK(m.frobenius_norm() == doctest::Approx(std::sqrt(5.0)));
  CHECK(m.max_abs() == doctest::Approx(std::sqrt(5.0)));

  m.resize(2, 2);
  for (const auto& z : m.data()) CHECK(z == cplx{});
}

TEST_CASE("vector ops") {
  Vector x = {cplx(3.0, 0.0), cplx(0.0, 4.0)};
  CHECK(norm(x) == doctest::Approx(5.0));
  Vector y = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
  // x^H y = 3 + conj(4i)*i = 3 + 4
  CHECK(dot(x, y).real() == doctest::Approx(7.0));
  CHECK(dot(x, y).imag() == doctest::Approx(0.0));
  normalize(x);
  CHECK(norm(x) == doctest::Approx(1.0));
}

TEST_CASE("matvec and multiply agree with hand expansion") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = cplx(0.0, 1.0);
  a(1, 0) = 2.0;
  a(1, 1) = -1.0;
  Vector x = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
  Vector y = matvec(a, x);
  CHECK(y[0] == cplx(1.0, 1.0));
  CHECK(y[1] == cplx(1.0, 0.0));

  Vector z = adjoint_matvec(a, x);
  CHECK(z[0] == cplx(3.0, 0.0));
  CHECK(z[1] == cplx(-1.0, -1.0));

  Matrix b = Matrix::identity(2);
  b(0, 1) = 5.0;
  Matrix c = multiply(a, b);
  CHECK(c(0, 0) == cplx(1.0, 0.0));
  CHECK(c(0, 1) == cplx(5.0, 1.0));
  CHECK(c(1, 1) == cplx(9.0, 0.0));
}

TEST_CASE("rank-one updates") {
  Matrix q(2, 2);
  Vector x = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
  add_outer(q, x, 2.0);
  CHECK(q(0, 0) == cplx(2.0, 0.0));
  CHECK(q(1, 1) == cplx(2.0, 0.0));
  CHECK(q(0, 1) == cplx(0.0, -2.0));
  CHECK(q(1, 0) == cplx(0.0, 2.0));

  Matrix r(2, 2);
  add_scaled(r, q, cplx(0.5, 0.0));
  CHECK(r(0, 1) == cplx(0.0, -1.0));
}

TEST_CASE("eig of a known 2x2 Hermitian matrix") {
  // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
  Matrix h(2, 2);
  h(0, 0) = 2.0;
  h(0, 1) = cplx(0.0, 1.0);
  h(1, 0) = cplx(0.0, -1.0);
  h(1, 1) = 2.0;
  HermitianEig eig;
  eig.compute(h);
  REQUIRE(eig.values().size() == 2);
  CHECK(eig.values()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.values()[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(residual_eig(h, eig) < 1e-12);
  CHECK(off_identity(eig.vectors()) < 1e-12);
}

TEST_CASE("eig orders a diagonal matrix ascending") {
  Matrix h(3, 3);
  h(0, 0) = 5.0;
  h(1, 1) = -1.0;
  h(2, 2) = 2.0;
  HermitianEig eig;
  eig.compute(h);
  CHECK(eig.values()[0] == doctest::Approx(-1.0));
  CHECK(eig.values()[1] == doctest::Approx(2.0));
  CHECK(eig.values()[2] == doctest::Approx(5.0));
  // Eigenvector of the smallest eigenvalue is the matching unit axis.
  CHECK(std::abs(eig.vectors()(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("eig on random Hermitian matrices") {
  Rng rng(31);
  for (int n : {1, 2, 3, 5, 8, 12}) {
    Matrix h = random_hermitian(n, rng);
    HermitianEig eig;
    eig.compute(h);
    double scale = std::max(1.0, h.frobenius_norm());
    CHECK(residual_eig(h, eig) < 1e-12 * scale);
    CHECK(off_identity(eig.vectors()) < 1e-12);
    for (size_t i = 1; i < eig.values().size(); ++i)
      CHECK(eig.values()[i - 1] <= eig.values()[i]);
  }
}

TEST_CASE("eig is bitwise deterministic") {
  Rng rng(7);
  Matrix h = random_hermitian(6, rng);
  HermitianEig e1, e2;
  e1.compute(h);
  e2.compute(h);
  REQUIRE(e1.values() == e2.values());
  CHECK(std::memcmp(e1.vectors().data().data(), e2.vectors().data().data(),
                    e1.vectors().data().size() * sizeof(cplx)) == 0);
}

TEST_CASE("singular values of simple matrices") {
  Matrix a(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 4.0;
  auto sv = singular_values(a);
  REQUIRE(sv.size() == 2);
  CHECK(sv[0] == doctest::Approx(4.0));
  CHECK(sv[1] == doctest::Approx(3.0));

  Matrix b(2, 2);
  b(0, 1) = 2.0;  // nilpotent, singular values 2 and 0
  sv = singular_values(b);
  CHECK(sv[0] == doctest::Approx(2.0));
  CHECK(sv[1] == doctest::Approx(0.0));

  Matrix ones(2, 2);
  ones(0, 0) = ones(0, 1) = ones(1, 0) = ones(1, 1) = 1.0;
  sv = singular_values(ones);
  CHECK(sv[0] == doctest::Approx(2.0));
  CHECK(sv[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("singular values match eig of the Gram matrix") {
  Rng rng(55);
  for (auto [r, c] : {std::pair{4, 4}, {6, 3}, {3, 6}, {8, 2}}) {
    Matrix a = random_matrix(r, c, rng);
    auto sv = singular_values(a);
    REQUIRE(static_cast<int>(sv.size()) == std::min(r, c));
    Matrix g = multiply(a.adjoint(), a);
    HermitianEig eig;
    eig.compute(g);
    for (size_t i = 0; i < sv.size(); ++i) {
      double lam = eig.values()[eig.values().size() - 1 - i];
      CHECK(sv[i] == doctest::Approx(std::sqrt(std::max(0.0, lam))).epsilon(1e-10));
    }
    for (size_t i = 1; i < sv.size(); ++i) CHECK(sv[i - 1] >= sv[i]);
  }
}

TEST_CASE("numerical rank") {
  Rng rng(13);
  Matrix a(4, 4);
  CHECK(numerical_rank(a) == 0);

  // Outer product has rank one.
  Vector x(4), y(4);
  for (int i = 0; i < 4; ++i) {
    x[i] = rng.cgaussian();
    y[i] = rng.cgaussian();
  }
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) a(i, j) = x[i] * std::conj(y[j]);
  CHECK(numerical_rank(a) == 1);

  Matrix b = random_matrix(5, 3, rng);
  CHECK(numerical_rank(b) == 3);
  CHECK(numerical_rank(Matrix::identity(6)) == 6);
}

TEST_CASE("orthonormal basis and projection") {
  Rng rng(21);
  std::vector<Vector> vs;
  Vector v1(4), v2(4);
  for (int i = 0; i < 4; ++i) {
    v1[i] = rng.cgaussian();
    v2[i] = rng.cgaussian();
  }
  vs.push_back(v1);
  vs.push_back(v2);
  // Duplicate direction collapses.
  Vector v3 = v1;
  for (auto& z : v3) z *= cplx(0.0, 2.0);
  vs.push_back(v3);

  auto onb = orthonormal_basis(vs);
  REQUIRE(onb.size() == 2);
  for (size_t i = 0; i < onb.size(); ++i) {
    CHECK(norm(onb[i]) == doctest::Approx(1.0));
    for (size_t j = 0; j < i; ++j) CHECK(std::abs(dot(onb[i], onb[j])) < 1e-12);
  }

  // Projection removes the spanned component entirely.
  Vector r = project_out(v1, onb);
  CHECK(norm(r) < 1e-12 * norm(v1));

  Vector w(4);
  for (int i = 0; i < 4; ++i) w[i] = rng.cgaussian();
  Vector rw = project_out(w, onb);
  for (const auto& b : onb) CHECK(std::abs(dot(b, rw)) < 1e-12);
}
