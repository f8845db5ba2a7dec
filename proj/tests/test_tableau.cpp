#include <cmath>
#include <random>

#include "doctest.h"
#include "fcq/tableau.hpp"

using namespace fcq;

namespace {

double sum_b_c(const Tableau& t, int power) {
  double s = 0.0;
  for (int i = 0; i < t.s; ++i) s += t.b[i] * std::pow(t.c[i], power);
  return s;
}

// 2x2 inverse from the adjugate.
CMatrix adjugate_inverse(const CMatrix& m) {
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return CMatrix{{m(1, 1) / det, -m(0, 1) / det}, {-m(1, 0) / det, m(0, 0) / det}};
}

CMatrix delta_inner(Complex zeta, const Tableau& t) {
  CMatrix m = t.matrix();
  const Complex f = zeta / (1.0 - zeta);
  for (int i = 0; i < t.s; ++i)
    for (int j = 0; j < t.s; ++j) m(i, j) += f * t.b[j];
  return m;
}

}  // namespace

TEST_CASE("backward Euler is the one-stage method") {
  const Tableau t = radau_iia(1);
  CHECK(t.s == 1);
  CHECK(t.A(0, 0) == 1.0);
  CHECK(t.b[0] == 1.0);
  CHECK(t.c[0] == 1.0);
  CHECK(t.order == 1);
  CHECK(t.stage_order == 1);
}

TEST_CASE("two-stage coefficients and order conditions") {
  const Tableau t = radau_iia(2);
  CHECK(t.A(0, 0) == doctest::Approx(5.0 / 12).epsilon(1e-15));
  CHECK(t.A(0, 1) == doctest::Approx(-1.0 / 12).epsilon(1e-15));
  CHECK(t.A(1, 0) == doctest::Approx(3.0 / 4).epsilon(1e-15));
  CHECK(t.A(1, 1) == doctest::Approx(1.0 / 4).epsilon(1e-15));
  CHECK(t.c[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(t.c[1] == 1.0);
  CHECK(std::abs(sum_b_c(t, 0) - 1.0) < 1e-15);
  CHECK(std::abs(sum_b_c(t, 1) - 0.5) < 1e-15);
  CHECK(std::abs(sum_b_c(t, 2) - 1.0 / 3) < 1e-15);
  double bac = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) bac += t.b[i] * t.A(i, j) * t.c[j];
  CHECK(std::abs(bac - 1.0 / 6) < 1e-15);
  CHECK(t.order == 3);
}

TEST_CASE("order conditions B(2s-1) and C(s)") {
  for (int s = 1; s <= 3; ++s) {
    CAPTURE(s);
    const Tableau t = radau_iia(s);
    CHECK(t.order == 2 * s - 1);
    CHECK(t.stage_order == s);
    for (int k = 1; k <= 2 * s - 1; ++k) CHECK(std::abs(sum_b_c(t, k - 1) - 1.0 / k) < 1e-14);
    for (int k = 1; k <= s; ++k)
      for (int i = 0; i < s; ++i) {
        double lhs = 0.0;
        for (int j = 0; j < s; ++j) lhs += t.A(i, j) * std::pow(t.c[j], k - 1);
        CHECK(std::abs(lhs - std::pow(t.c[i], k) / k) < 1e-14);
      }
  }
  const Tableau t3 = radau_iia(3);
  CHECK(t3.c[0] == doctest::Approx((4 - std::sqrt(6.0)) / 10).epsilon(1e-15));
  CHECK(t3.c[1] == doctest::Approx((4 + std::sqrt(6.0)) / 10).epsilon(1e-15));
}

TEST_CASE("structural invariants of the shipped tableaux") {
  for (int s = 1; s <= 3; ++s) {
    CAPTURE(s);
    const Tableau t = radau_iia(s);
    for (int j = 0; j < s; ++j) CHECK(t.b[j] == t.A(s - 1, j));
    CHECK(t.c[s - 1] == 1.0);
    for (int i = 0; i < s; ++i) {
      double row = 0.0;
      for (int j = 0; j < s; ++j) row += t.A(i, j);
      CHECK(std::abs(row - t.c[i]) <= 1e-14);
    }
    CHECK(std::abs(LuFactor(t.matrix()).determinant()) > 1e-12);
    const AssumptionReport rep = check_assumptions(t);
    CHECK(rep.all());
    for (const auto& e : rep.eigenvalues) CHECK(e.real() > 0.0);
  }
}

TEST_CASE("unsupported stage counts and names") {
  CHECK_THROWS_AS(radau_iia(0), ConfigError);
  CHECK_THROWS_AS(radau_iia(4), ConfigError);
  CHECK_THROWS_AS(tableau_by_name("gauss4"), ConfigError);
  CHECK(tableau_by_name("radau5").s == 3);
}

TEST_CASE("assumption checks reject other tableaux") {
  const Tableau singular = make_tableau(2, {0, 0, 0, 1}, {0, 1}, {0, 1}, 1, 1);
  const AssumptionReport r1 = check_assumptions(singular);
  CHECK_FALSE(r1.invertible);
  CHECK_FALSE(r1.all());

  const double q = std::sqrt(3.0) / 6;
  const Tableau gauss = make_tableau(2, {0.25, 0.25 - q, 0.25 + q, 0.25}, {0.5, 0.5}, {0.5 - q, 0.5 + q}, 4, 2);
  const AssumptionReport r2 = check_assumptions(gauss);
  CHECK_FALSE(r2.weights_equal_last_row);
  CHECK(r2.invertible);
}

TEST_CASE("stability function values") {
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    const Stability st = stability(0.0, t);
    CHECK(std::abs(st.r - 1.0) < 1e-15);
    for (int i = 0; i < s; ++i) CHECK(std::abs(st.q[i] - t.b[i]) < 1e-15);
  }
  CHECK(std::abs(stability(-1.0, radau_iia(1)).r - 0.5) < 1e-15);
  CHECK(std::abs(stability(-1e6, radau_iia(3)).r) <= 1e-4);
  CHECK_THROWS_AS(stability(1.0, radau_iia(1)), PoleError);
  try {
    stability(1.0, radau_iia(1));
  } catch (const PoleError& e) {
    CHECK(e.where() == Complex(1.0));
  }
}

TEST_CASE("both forms of r agree") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    for (int k = 0; k < 50; ++k) {
      const Complex z(u(rng) - 5.0, u(rng));
      const Complex r1 = stability(z, t).r;
      const Complex r2 = stability_r_via_q(z, t);
      CHECK(std::abs(r1 - r2) <= 1e-12 * std::max(1.0, std::abs(r1)));
    }
  }
}

TEST_CASE("A-stability on random points of the left half-plane") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(-50.0, 0.0), im(-50.0, 50.0);
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    for (int k = 0; k < 100; ++k) CHECK(std::abs(stability(Complex(re(rng), im(rng)), t).r) <= 1.0 + 1e-12);
    CHECK(std::abs(stability(Complex(0.0, 3.0), t).r) <= 1.0 + 1e-12);
  }
}

TEST_CASE("L-stability decay |r(z)| ~ C/|z|") {
  for (int s = 1; s <= 3; ++s) {
    CAPTURE(s);
    const Tableau t = radau_iia(s);
    const double C = std::abs(stability(-1e4, t).r) * 1e4;
    CHECK(std::isfinite(C));
    for (double z = -1e4; z >= -1e9; z *= 10.0) {
      const double ratio = std::abs(stability(z, t).r) * std::abs(z) / C;
      CHECK(ratio == doctest::Approx(1.0).epsilon(2e-3));
    }
  }
}

TEST_CASE("delta at special arguments") {
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    CHECK((delta(0.0, t) - inverse(t.matrix())).max_norm() < 1e-12);
  }
  const Tableau t1 = radau_iia(1);
  for (Complex z : {Complex(0.3), Complex(-0.7, 0.2), Complex(0.0, 0.9)})
    CHECK(std::abs(delta(z, t1)(0, 0) - (1.0 - z)) < 1e-14);
  CHECK_THROWS_AS(delta(1.0, t1), PoleError);
}

TEST_CASE("delta for two stages against the adjugate inverse") {
  const Tableau t = radau_iia(2);
  const Complex zeta = 0.1 * std::polar(1.0, kPi / 3);
  const CMatrix want = adjugate_inverse(delta_inner(zeta, t));
  CHECK((delta(zeta, t) - want).max_norm() < 1e-13);
}

TEST_CASE("delta identity on random points of the unit disk") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> rad(0.0, 0.99), ang(-kPi, kPi);
  for (int s = 1; s <= 3; ++s) {
    const Tableau t = radau_iia(s);
    for (int k = 0; k < 50; ++k) {
      const Complex zeta = std::polar(rad(rng), ang(rng));
      const CMatrix prod = delta(zeta, t) * delta_inner(zeta, t);
      CHECK((prod - CMatrix::identity(static_cast<std::size_t>(s))).max_norm() <= 1e-12);
    }
  }
}
