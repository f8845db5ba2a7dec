#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "fcq/caputo.hpp"

using namespace fcq;

namespace {

// Half-order Caputo derivative with sigma = w^2 and composite Simpson:
// D^(1/2) u(t) = 2/sqrt(pi) int_0^sqrt(t) u'(t - w^2) dw.
double half_derivative_simpson(const std::function<double(double)>& u_prime, double t, int intervals = 40000) {
  const double b = std::sqrt(t), dw = b / intervals;
  double sum = u_prime(t) + u_prime(0.0);
  for (int i = 1; i < intervals; ++i) {
    const double w = i * dw;
    sum += (i % 2 ? 4.0 : 2.0) * u_prime(t - w * w);
  }
  return sum * (dw / 3.0) * (2.0 / std::sqrt(kPi));
}

// d/dt sin(2t)^6 through the cosine expansion
// sin^6 x = (10 - 15 cos 2x + 6 cos 4x - cos 6x) / 32.
double sin6_prime(double t) {
  return (60.0 * std::sin(4 * t) - 48.0 * std::sin(8 * t) + 12.0 * std::sin(12 * t)) / 32.0;
}

}  // namespace

TEST_CASE("power rule") {
  for (int p = 1; p <= 6; ++p)
    for (double alpha : {0.25, 0.5, 0.75})
      for (double t : {0.1, 1.0, 10.0}) {
        CAPTURE(p);
        CAPTURE(alpha);
        CAPTURE(t);
        const double got = caputo_oracle([p](double s) { return p * std::pow(s, p - 1); }, alpha, t);
        const double want = std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - alpha) * std::pow(t, p - alpha);
        CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
      }
}

TEST_CASE("worked values") {
  CHECK(caputo_oracle([](double) { return 0.0; }, 0.5, 2.0) == 0.0);
  const double v = caputo_oracle([](double s) { return 2.0 * s; }, 0.5, 1.0);
  CHECK(v == doctest::Approx(8.0 / (3.0 * std::sqrt(kPi))).epsilon(1e-12));
  const Complex c = caputo_oracle_complex([](double s) { return Complex(1.0, 2.0 * s); }, 0.5, 1.0);
  CHECK(c.real() == doctest::Approx(2.0 / std::sqrt(kPi)).epsilon(1e-12));
  CHECK(c.imag() == doctest::Approx(8.0 / (3.0 * std::sqrt(kPi))).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand against a fixed-grid rule") {
  for (double t : {0.3, 1.0, 2.5, 7.0, 10.0}) {
    CAPTURE(t);
    const double got = caputo_oracle(sin6_prime, 0.5, t);
    const double want = half_derivative_simpson(sin6_prime, t);
    CHECK(std::abs(got - want) <= 1e-9);
  }
}

TEST_CASE("domain errors") {
  const auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(caputo_oracle(one, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(caputo_oracle(one, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(caputo_oracle(one, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(caputo_oracle(one, 0.5, -1.0), DomainError);
  CHECK_THROWS_AS(caputo_oracle(one, 0.5, 1.0, 1e-18), DomainError);
}

TEST_CASE("first example satisfies its equation") {
  const ManufacturedProblem mp = example1_problem();
  const Problem& p = mp.problem;
  CHECK(p.alpha == 0.5);
  CHECK(mp.t_end == 10.0);
  CHECK(p.dim() == 2u);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 5; ++i) {
    const double t = u(rng);
    CAPTURE(t);
    CVector du(2);
    for (int k = 0; k < 2; ++k)
      du[k] = half_derivative_simpson([k](double s) { return example1_derivative(s)[k].real(); }, t);
    const CVector ue = example1_solution(t);
    const CVector Au = p.family->op(ue);
    const CVector g = p.forcing.evaluate(t);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(du[k] - Au[k] - g[k]) <= 1e-8);
  }
}

TEST_CASE("first example values") {
  const CVector u0 = example1_solution(0.0);
  CHECK(std::abs(u0[0]) == 0.0);
  CHECK(std::abs(u0[1]) == 0.0);
  const CVector u = example1_solution(kPi / 4);
  CHECK(u[0].real() == doctest::Approx(1.0).epsilon(1e-14));
  const double tq = 2 * kPi / std::sqrt(5.0) / 2;  // cos(sqrt5 t) = -1
  CHECK(example1_solution(tq)[1].real() == doctest::Approx(1.0).epsilon(1e-12));
  // derivative by central differences
  const double t = 1.3, d = 1e-5;
  const CVector up = example1_solution(t + d), um = example1_solution(t - d), du = example1_derivative(t);
  for (int k = 0; k < 2; ++k) CHECK(std::abs((up[k] - um[k]) / (2 * d) - du[k]) <= 1e-7);
}

TEST_CASE("second example satisfies its equation") {
  const int n = 8;
  const ManufacturedProblem mp = example2_problem(n);
  const Problem& p = mp.problem;
  CHECK(p.dim() == 512u);
  CHECK(mp.t_end == 123.45);
  const CVector hm = example2_mode(n, -1), hp = example2_mode(n, +1);
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 5; ++i) {
    const double t = u(rng);
    CAPTURE(t);
    const double d[2] = {half_derivative_simpson([](double s) { return kPi * std::cos(kPi * s); }, t),
                         half_derivative_simpson([](double s) { return kPi * std::sin(kPi * s); }, t)};
    CVector Du(p.dim());
    for (std::size_t j = 0; j < Du.size(); ++j) Du[j] = hm[j] * d[0] + hp[j] * d[1];
    // the forcing is built from the continuous identity Laplace h = -h
    const CVector lhs = p.family->mass(Du);
    CVector Au = p.family->mass(p.u_exact(t));
    for (auto& v : Au) v = -v;
    const CVector g = p.forcing.evaluate(t);
    double err = 0.0;
    for (std::size_t j = 0; j < lhs.size(); ++j) err = std::max(err, std::abs(lhs[j] - Au[j] - g[j]));
    CHECK(err <= 1e-8);
  }
  CHECK_THROWS_AS(example2_problem(4), ConfigError);
}

TEST_CASE("second example values") {
  const int n = 8;
  const CVector hm = example2_mode(n, -1), hp = example2_mode(n, +1);
  CHECK(hm[0].real() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(hp[0].real() == doctest::Approx(3.0).epsilon(1e-15));
  // x = y = z = pi/2 is index (2*8 + 2)*8 + 2
  const std::size_t q = (2 * 8 + 2) * 8 + 2;
  CHECK(hm[q].real() == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(hp[q].real() == doctest::Approx(3.0).epsilon(1e-14));
  Complex f1, f2;
  example2_factors(0.0, 0.5, kOracleTolerance, f1, f2);
  CHECK(f1 == Complex(0.0));
  CHECK(f2 == Complex(0.0));
  example2_factors(1.0, 0.5, kOracleTolerance, f1, f2);
  const double d[2] = {half_derivative_simpson([](double s) { return kPi * std::cos(kPi * s); }, 1.0),
                       half_derivative_simpson([](double s) { return kPi * std::sin(kPi * s); }, 1.0)};
  CHECK(std::abs(f1 - (d[0] + std::sin(kPi))) <= 1e-9);
  CHECK(std::abs(f2 - (d[1] + 2.0)) <= 1e-9);
}

TEST_CASE("Gaussian initial value") {
  const CVector u0 = example3_initial(801, 2.0);
  CHECK(u0.size() == 801u);
  CHECK(std::abs(u0[400] - 10.0) < 1e-14);
  CHECK(std::abs(u0.front()) == doctest::Approx(10.0 * std::exp(-64.0)).epsilon(1e-12));
  CHECK(std::abs(u0.back()) == doctest::Approx(10.0 * std::exp(-64.0)).epsilon(1e-12));
  // x = 0.5: 10 exp(-4 + 5i)
  CHECK(std::abs(u0[500] - 10.0 * std::exp(Complex(-4.0, 5.0))) < 1e-12);
  CHECK_THROWS_AS(example3_initial(801, 0.5), ConfigError);
  const Problem p = example3_problem(101, 2.0);
  CHECK(p.alpha == 0.75);
  CHECK(p.has_initial_value());
  CHECK(max_abs(p.forcing.evaluate(0.7)) == 0.0);
}
