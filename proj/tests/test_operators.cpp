#include <cmath>
#include <random>

#include "doctest.h"
#include "fcq/contour.hpp"
#include "fcq/operators.hpp"

using namespace fcq;

namespace {

CVector random_vector(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

double max_diff(const CVector& a, const CVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_linearity(const OperatorFamily& f, Complex nu, std::mt19937& rng) {
  const std::size_t n = f.dim();
  for (int trial = 0; trial < 20; ++trial) {
    const CVector y1 = random_vector(n, rng), y2 = random_vector(n, rng);
    const Complex a(0.3, -1.2), b(-2.0, 0.5);
    CVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = a * y1[i] + b * y2[i];
    const CVector x = f.solve(nu, y), x1 = f.solve(nu, y1), x2 = f.solve(nu, y2);
    CVector comb(n);
    for (std::size_t i = 0; i < n; ++i) comb[i] = a * x1[i] + b * x2[i];
    CHECK(max_diff(x, comb) <= 1e-10 * max_abs(x));
  }
}

// Dense 1D blocks of the compact scheme.
CMatrix circulant(int n, Complex lo, Complex mid, Complex hi) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = mid;
    m(i, (i + n - 1) % n) = lo;
    m(i, (i + 1) % n) = hi;
  }
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

CVector column(const CMatrix& m) {
  CVector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, 0);
  return v;
}

CMatrix as_column(const CVector& v) {
  CMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

}  // namespace

// --- dense ----------------------------------------------------------------

TEST_CASE("dense solve by hand") {
  const auto op = dense_operator({}, CMatrix{{-1.0, 1.0}, {-1.0, -1.0}});
  const CVector y{1.0, 0.0};
  const CVector x = op->solve(1.0, y);
  CHECK(std::abs(x[0] - 0.4) < 1e-15);
  CHECK(std::abs(x[1] + 0.2) < 1e-15);
  // nu = 0: x = -A^{-1} y; A^{-1} = [[-1,-1],[1,-1]]/2
  const CVector x0 = op->solve(0.0, y);
  CHECK(std::abs(x0[0] - 0.5) < 1e-15);
  CHECK(std::abs(x0[1] + 0.5) < 1e-15);
  CHECK(op->dim() == 2u);
  CHECK_FALSE(op->has_mass());
  CHECK(op->is_real());
  CHECK(op->theta1_hint() == kPi / 2);
}

TEST_CASE("dense solve with a mass matrix, residual and caching") {
  std::mt19937 rng(4);
  std::normal_distribution<double> g;
  CMatrix M(6, 6), A(6, 6);
  for (auto& v : M.data()) v = Complex(g(rng), g(rng));
  for (auto& v : A.data()) v = Complex(g(rng), g(rng));
  for (int i = 0; i < 6; ++i) M(i, i) += 6.0;
  const auto op = dense_operator(M, A);
  const Complex nu(1.3, 0.7);
  const CVector y = random_vector(6, rng);
  const CVector x = op->solve(nu, y);
  const CVector r = (M * Complex(nu) - A) * std::span<const Complex>(x);
  CHECK(max_diff(r, y) <= 1e-10 * max_abs(y));
  op->solve(nu, y);
  CHECK(op->cached_factors() == 1u);
  op->solve(nu * 2.0, y);
  CHECK(op->cached_factors() == 2u);
  check_linearity(*op, nu, rng);
}

TEST_CASE("singular dense system reports the frequency") {
  const auto op = dense_operator({}, CMatrix{{0.0, 0.0}, {0.0, 1.0}});
  const CVector y{1.0, 1.0};
  CHECK_THROWS_AS(op->solve(0.0, y), SolverError);
  try {
    op->solve(0.0, y);
  } catch (const SolverError& e) {
    CHECK(e.nu() == Complex(0.0));
  }
}

TEST_CASE("resolvent bound of the dense families") {
  const auto op = dense_operator({}, CMatrix{{-1.0, 1.0}, {-1.0, -1.0}});
  CVector samples;
  for (double r = 1e-2; r <= 1e6; r *= 10.0) samples.push_back(r);
  const double C = sector_probe(*op, samples);
  CHECK(std::isfinite(C));
  CHECK(C < 10.0);

  const auto minus_id = dense_operator({}, CMatrix{{-1.0, 0.0}, {0.0, -1.0}});
  CHECK(sector_probe(*minus_id, samples) <= 1.0 + 1e-12);
  const CVector x = minus_id->solve(3.0, CVector{1.0, 2.0});
  CHECK(std::abs(x[1] - 0.5) < 1e-15);
}

// --- periodic compact 3D ------------------------------------------------

TEST_CASE("constants are in the kernel of the discrete Laplacian") {
  const PeriodicCompactFd3d op(6);
  CVector ones(op.dim(), 1.0), out(op.dim());
  op.apply_operator(ones, out);
  CHECK(max_abs(out) < 1e-12);
  op.apply_mass(ones, out);
  for (const auto& v : out) CHECK(std::abs(v - 1.0) < 1e-14);
}

TEST_CASE("spectral solve equals the dense Kronecker solve at 4^3") {
  const int n = 4;
  const PeriodicCompactFd3d op(n);
  const double eta = 2 * kPi / n;
  CHECK(op.spacing() == doctest::Approx(eta).epsilon(1e-15));
  const CMatrix A1 = circulant(n, 1.0 / (eta * eta), -2.0 / (eta * eta), 1.0 / (eta * eta));
  const CMatrix M1 = circulant(n, 1.0 / 12, 5.0 / 6, 1.0 / 12);
  const CMatrix A3 = kron(kron(A1, M1), M1) + kron(kron(M1, A1), M1) + kron(kron(M1, M1), A1);
  const CMatrix M3 = kron(kron(M1, M1), M1);
  std::mt19937 rng(2);
  for (Complex nu : {Complex(1.0), Complex(0.3, 2.0), Complex(-0.2, 0.5), Complex(50.0, -3.0)}) {
    const CVector y = random_vector(op.dim(), rng);
    const CVector x = op.solve(nu, y);
    const CVector want = column(lu_solve(M3 * nu - A3, as_column(y)));
    CHECK(max_diff(x, want) <= 1e-9 * max_abs(want));
    CVector out(op.dim());
    op.apply_operator(y, out);
    CHECK(max_diff(out, A3 * std::span<const Complex>(y)) <= 1e-12 * max_abs(out));
    op.apply_mass(y, out);
    CHECK(max_diff(out, M3 * std::span<const Complex>(y)) <= 1e-13 * max_abs(out));
  }
  check_linearity(op, Complex(0.4, 1.0), rng);
  CHECK_THROWS(op.solve(0.0, CVector(op.dim(), 1.0)));
}

TEST_CASE("compact symbol is fourth order") {
  std::vector<double> xs, errs;
  for (double xi = 0.4; xi > 0.02; xi /= 2) {
    const double ratio = compact_symbol_a(xi, 1.0) / compact_symbol_m(xi);
    xs.push_back(xi);
    errs.push_back(std::abs(ratio + xi * xi) / (xi * xi));
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double order = std::log(errs[i - 1] / errs[i]) / std::log(xs[i - 1] / xs[i]);
    CHECK(order >= 3.8);
  }
  const PeriodicCompactFd3d op(8);
  CHECK(op.symbol_a(1) == doctest::Approx(compact_symbol_a(2 * kPi / 8, op.spacing())).epsilon(1e-14));
  CHECK(op.symbol_m(0) == doctest::Approx(1.0).epsilon(1e-15));
}

// --- Schroedinger with transparent boundary ----------------------------

TEST_CASE("boundary roots") {
  const SchrodingerTbc1d op(2.0, 101, 0.75);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 50; ++k) {
    const Complex nu(u(rng), u(rng));
    const auto r = op.boundary_roots(nu);
    CHECK(std::abs(r.inner * r.outer - 1.0) <= 1e-12);
    const Complex phi = op.off_diagonal(nu), psi = op.diagonal(nu);
    CHECK(std::abs(phi * r.inner * r.inner + psi * r.inner + phi) <= 1e-10 * std::abs(psi));
  }
  CHECK(op.off_diagonal(12.0) == Complex(1.0, -1.0 / (0.04 * 0.04)));
  CHECK(op.diagonal(12.0) == Complex(10.0, 2.0 / (0.04 * 0.04)));
}

TEST_CASE("roots separate on the contour nodes") {
  const double alpha = 0.75;
  const SchrodingerTbc1d op(2.0, 801, alpha);
  CHECK(op.theta1_hint() == doctest::Approx(kPi / 6).epsilon(1e-15));
  const ContourParams p = select_parameters(24, 5, 0.95 * op.theta1_hint());
  int count = 0;
  for (double mu : {0.5, 40.0}) {
    const ContourLevel lv = level_nodes(mu, p);
    for (const auto& lam : lv.lambda) {
      const auto r = op.boundary_roots(power_alpha(lam, alpha));
      CHECK(std::abs(r.inner) < 1.0);
      CHECK(std::abs(r.outer) > 1.0);
      ++count;
    }
  }
  CHECK(count >= 50);
}

TEST_CASE("closed tridiagonal solve equals a dense solve at n = 6") {
  const int n = 6;
  const SchrodingerTbc1d op(2.0, n, 0.75);
  const double eta = 4.0 / (n - 1);
  std::mt19937 rng(12);
  for (Complex nu : {Complex(2.0, 1.0), Complex(0.1, 3.0), Complex(30.0, -4.0)}) {
    const Complex phi = nu / 12.0 - Complex(0, 1) / (eta * eta);
    const Complex psi = 5.0 * nu / 6.0 + Complex(0, 2) / (eta * eta);
    // smaller root of phi z^2 + psi z + phi, chosen by modulus
    const Complex disc = std::sqrt(psi * psi - 4.0 * phi * phi);
    Complex z1 = (-psi + disc) / (2.0 * phi), z2 = (-psi - disc) / (2.0 * phi);
    if (std::abs(z2) < std::abs(z1)) std::swap(z1, z2);
    CMatrix T(n, n);
    for (int j = 0; j < n; ++j) {
      T(j, j) = psi;
      if (j > 0) T(j, j - 1) = phi;
      if (j + 1 < n) T(j, j + 1) = phi;
    }
    T(0, 0) += phi * z1;
    T(n - 1, n - 1) += phi * z1;
    const CVector y = random_vector(n, rng);
    const CVector x = op.solve(nu, y);
    const CVector want = column(lu_solve(T, as_column(y)));
    CHECK(max_diff(x, want) <= 1e-12 * max_abs(want));
  }
}

TEST_CASE("closure residual and linearity") {
  const SchrodingerTbc1d op(2.0, 101, 0.75);
  std::mt19937 rng(13);
  const Complex nu = power_alpha(Complex(3.0, 8.0), 0.75);
  const CVector y = random_vector(op.dim(), rng);
  const CVector x = op.solve(nu, y);
  const Complex phi = op.off_diagonal(nu), psi = op.diagonal(nu), z1 = op.boundary_roots(nu).inner;
  const std::size_t n = op.dim();
  double res = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex left = j > 0 ? x[j - 1] : z1 * x[0];
    const Complex right = j + 1 < n ? x[j + 1] : z1 * x[n - 1];
    res = std::max(res, std::abs(phi * left + psi * x[j] + phi * right - y[j]));
  }
  CHECK(res <= 1e-10 * max_abs(y));
  // interior rows are nu M - A with the stored operator
  CVector Mx(n), Ax(n);
  op.apply_mass(x, Mx);
  op.apply_operator(x, Ax);
  for (std::size_t j = 1; j + 1 < n; ++j) CHECK(std::abs(nu * Mx[j] - Ax[j] - y[j]) <= 1e-10 * max_abs(y));
  check_linearity(op, nu, rng);
}

TEST_CASE("Schroedinger resolvent stays bounded along the sector edge") {
  const SchrodingerTbc1d op(2.0, 101, 0.75);
  CVector samples;
  for (double r = 1e-2; r <= 1e6; r *= 10.0) samples.push_back(std::polar(r, 0.99 * kPi / 2));
  const double C = sector_probe(op, samples);
  CHECK(std::isfinite(C));
  CHECK(C < 100.0);
}

TEST_CASE("initial support check") {
  const SchrodingerTbc1d op(2.0, 11, 0.75);
  CVector u0(11, 0.0);
  u0[5] = 1.0;
  CHECK_NOTHROW(op.check_initial_support(u0));
  u0[1] = 1e-3;
  CHECK_THROWS_AS(op.check_initial_support(u0), SupportError);
  CHECK_THROWS_AS(SchrodingerTbc1d(2.0, 4, 0.75), ConfigError);
}
