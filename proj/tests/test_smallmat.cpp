#include <cmath>
#include <random>

#include "doctest.h"
#include "fcq/smallmat.hpp"
#include "fcq/tableau.hpp"

using namespace fcq;

namespace {

CMatrix reassemble(const EigDecomp& e, const CVector& d) {
  const std::size_t n = d.size();
  CMatrix D(n, n);
  for (std::size_t i = 0; i < n; ++i) D(i, i) = d[i];
  return e.vectors * D * e.inverse;
}

// A^alpha = sin(alpha pi)/pi int_0^inf t^(alpha-1) A (t + A)^{-1} dt, with
// t = e^x and the trapezoidal rule on a long x-interval.
CMatrix balakrishnan_power(const CMatrix& a, double alpha) {
  const std::size_t n = a.rows();
  CMatrix sum(n, n);
  const double dx = 0.02;
  for (double x = -120.0; x <= 120.0; x += dx) {
    const double t = std::exp(x);
    CMatrix shifted = a;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += t;
    sum = sum + lu_solve(shifted, a) * Complex(std::pow(t, alpha) * dx);
  }
  return sum * Complex(std::sin(alpha * kPi) / kPi);
}

bool contains(const CVector& v, Complex x, double tol) {
  for (const auto& y : v)
    if (std::abs(y - x) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("eigendecomposition of a diagonal matrix") {
  const CMatrix a{{2.0, 0.0}, {0.0, Complex(0, 3)}};
  const EigDecomp e = eig_small(a);
  CHECK(contains(e.values, 2.0, 1e-14));
  CHECK(contains(e.values, Complex(0, 3), 1e-14));
  for (std::size_t j = 0; j < 2; ++j) {
    // each eigenvector is a unit coordinate vector up to phase
    const double m0 = std::abs(e.vectors(0, j)), m1 = std::abs(e.vectors(1, j));
    CHECK(std::max(m0, m1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::min(m0, m1) < 1e-14);
  }
  CHECK((reassemble(e, e.values) - a).max_norm() < 1e-14);
}

TEST_CASE("rotation generator has eigenvalues +-i") {
  const CMatrix a{{0.0, 1.0}, {-1.0, 0.0}};
  const EigDecomp e = eig_small(a);
  CHECK(contains(e.values, Complex(0, 1), 1e-14));
  CHECK(contains(e.values, Complex(0, -1), 1e-14));
  CHECK((reassemble(e, e.values) - a).max_norm() < 1e-14);
}

TEST_CASE("reconstruction of Delta(zeta)/h") {
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    for (Complex zeta : {Complex(0.01), Complex(0.5, 0.3), 0.9 * std::polar(1.0, 2.5)}) {
      const CMatrix b = delta(zeta, t) * Complex(1.0 / 0.1);
      const EigDecomp e = eig_small(b);
      CHECK((reassemble(e, e.values) - b).max_norm() <= 1e-10 * b.max_norm());
      CHECK_FALSE(e.ill_conditioned);
    }
  }
}

TEST_CASE("random 3x3 reconstruction and eigenvalue residuals") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int k = 0; k < 30; ++k) {
    CMatrix a(3, 3);
    for (auto& v : a.data()) v = Complex(g(rng), g(rng));
    const EigDecomp e = eig_small(a);
    CHECK((reassemble(e, e.values) - a).max_norm() <= 1e-10 * a.max_norm());
    for (std::size_t j = 0; j < 3; ++j) {
      double res = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        Complex av = 0.0;
        for (std::size_t k2 = 0; k2 < 3; ++k2) av += a(i, k2) * e.vectors(k2, j);
        res = std::max(res, std::abs(av - e.values[j] * e.vectors(i, j)));
        norm = std::max(norm, std::abs(e.vectors(i, j)));
      }
      CHECK(res <= 1e-10 * a.max_norm() * norm);
    }
  }
}

TEST_CASE("nearly defective matrices") {
  const CMatrix defective{{1.0, 1.0}, {0.0, 1.0 + 1e-12}};
  CHECK_THROWS_AS(eig_small(defective), DecompositionError);
  const CMatrix close{{0.0, 1.0}, {0.0, 1.3e-8}};
  const EigDecomp e = eig_small(close);
  CHECK(e.condition > kEigConditionFlag);
  CHECK(e.ill_conditioned);
}

TEST_CASE("LU solves") {
  const CMatrix y{{1.0, 2.0}, {3.0, 4.0}};
  CHECK((lu_solve(CMatrix::identity(2), y) - y).max_norm() == 0.0);
  const CMatrix x = lu_solve(CMatrix{{2.0, 0.0}, {0.0, 4.0}}, CMatrix{{2.0}, {4.0}});
  CHECK(std::abs(x(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(x(1, 0) - 1.0) < 1e-15);

  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  CMatrix a(5, 5), b(5, 2);
  for (auto& v : a.data()) v = Complex(g(rng), g(rng));
  for (auto& v : b.data()) v = Complex(g(rng), g(rng));
  const CMatrix sol = lu_solve(a, b);
  CHECK((a * sol - b).max_norm() <= 1e-12 * b.max_norm());
  CHECK((a * inverse(a) - CMatrix::identity(5)).max_norm() < 1e-12);

  CHECK_THROWS_AS(lu_solve(CMatrix{{1.0, 2.0}, {2.0, 4.0}}, y), SolverError);
}

TEST_CASE("principal fractional powers") {
  CHECK(std::abs(power_alpha(Complex(1.0), 0.5) - 1.0) < 1e-15);
  CHECK(std::abs(power_alpha(Complex(4.0), 0.5) - 2.0) < 1e-15);
  CHECK(std::abs(power_alpha(Complex(0, 1), 0.5) - std::polar(1.0, kPi / 4)) < 1e-15);
  const CVector d{Complex(1.0), Complex(4.0), Complex(0, 1)};
  const CVector p = power_alpha(d, 0.5);
  CHECK(std::abs(p[1] - 2.0) < 1e-15);
  CHECK_THROWS_AS(power_alpha(Complex(-1.0), 0.5), BranchCutError);
  CHECK_THROWS_AS(power_alpha(Complex(0.0), 0.5), BranchCutError);
  CHECK_THROWS_AS(power_alpha(Complex(1.0), 1.5), DomainError);
}

TEST_CASE("matrix powers through the eigendecomposition match an integral representation") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 20) {
    CMatrix a{{Complex(1.5 + u(rng), u(rng)), Complex(u(rng), u(rng))},
              {Complex(u(rng), u(rng)), Complex(1.5 + u(rng), u(rng))}};
    const EigDecomp e = eig_small(a);
    bool ok = e.condition < 50.0;
    for (const auto& v : e.values) ok = ok && v.real() > 0.2;
    if (!ok) continue;
    ++tested;
    const double alpha = tested % 2 ? 0.5 : 0.75;
    const CMatrix via_eig = reassemble(e, power_alpha(e.values, alpha));
    const CMatrix via_integral = balakrishnan_power(a, alpha);
    CHECK((via_eig - via_integral).max_norm() <= 1e-8);
  }
}

TEST_CASE("DFT examples") {
  const CVector delta1{1.0, 0.0, 0.0, 0.0};
  for (const auto& v : dft(delta1, -1)) CHECK(std::abs(v - 1.0) < 1e-15);
  const CVector ones{1.0, 1.0};
  const CVector f = dft(ones, -1);
  CHECK(std::abs(f[0] - 2.0) < 1e-15);
  CHECK(std::abs(f[1]) < 1e-15);
}

TEST_CASE("Parseval and round trips") {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  for (std::size_t J : {16u, 12u, 160u, 256u, 7u}) {
    CAPTURE(J);
    CVector x(J);
    for (auto& v : x) v = Complex(g(rng), g(rng));
    const CVector X = dft(x, -1);
    double ex = 0.0, eX = 0.0;
    for (std::size_t i = 0; i < J; ++i) {
      ex += std::norm(x[i]);
      eX += std::norm(X[i]);
    }
    CHECK(std::abs(eX / static_cast<double>(J) - ex) <= 1e-12 * ex);
    const CVector back = dft(X, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < J; ++i) err = std::max(err, std::abs(back[i] / static_cast<double>(J) - x[i]));
    CHECK(err <= 1e-12 * static_cast<double>(J));
    // against the defining sum
    for (std::size_t j = 0; j < J; j += 3) {
      Complex s = 0.0;
      for (std::size_t n = 0; n < J; ++n)
        s += x[n] * std::polar(1.0, -2.0 * kPi * static_cast<double>(n * j % J) / static_cast<double>(J));
      CHECK(std::abs(s - X[j]) <= 1e-11 * std::sqrt(ex));
    }
  }
}

TEST_CASE("strided transform matches the contiguous one") {
  CVector data(24), scratch(8);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = Complex(std::sin(0.7 * i), std::cos(1.3 * i));
  CVector column(8);
  for (std::size_t k = 0; k < 8; ++k) column[k] = data[1 + 3 * k];
  const CVector want = dft(column, 1);
  dft_strided(data, 1, 3, 8, 1, scratch);
  for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(data[1 + 3 * k] - want[k]) < 1e-13);
  CHECK_THROWS_AS(fft_pow2(std::span<Complex>(column).first(6), 1), ConfigError);
}
