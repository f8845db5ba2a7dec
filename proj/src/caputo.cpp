#include "fcq/caputo.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>
#include <queue>
#include <vector>

#include "fcq/operators.hpp"

namespace fcq {

namespace {

constexpr int kGradedPanels = 16;
constexpr std::size_t kMaxPanels = 4000;

template <class T>
struct Panel {
  double lo, hi;
  T value;
  double err, l1;
  bool operator<(const Panel& o) const { return err < o.err; }
};

// One 21-point Gauss-Kronrod panel; boost reports the error on [-1, 1].
template <class T, class F>
Panel<T> gk_panel(const F& f, double lo, double hi) {
  Panel<T> pn{lo, hi, T{}, 0.0, 0.0};
  pn.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 0, 0.0, &pn.err, &pn.l1);
  pn.err *= 0.5 * (hi - lo);
  return pn;
}

template <class T>
T caputo_impl(const std::function<T(double)>& u_prime, double alpha, double t, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("caputo_oracle: alpha must lie in (0, 1)");
  if (!(t > 0.0)) throw DomainError("caputo_oracle: t must be positive");
  if (!(tol >= 1e-15)) throw DomainError("caputo_oracle: tolerance too small");
  const double p = 1.0 / (1.0 - alpha);
  const double upper = std::pow(t, 1.0 - alpha);
  auto f = [&](double r) -> T {
    const double sigma = std::pow(r, p);
    return u_prime(std::max(t - sigma, 0.0));
  };
  // r^p is not smooth at r = 0 unless p is an integer; geometric panels
  // towards r = 0 keep each panel on a smooth piece. Then the panel with the
  // largest error is bisected until the total meets the tolerance.
  const bool integer_p = std::abs(p - std::round(p)) < 1e-12;
  const int graded = integer_p ? 0 : kGradedPanels;
  std::priority_queue<Panel<T>> queue;
  double err = 0.0, l1 = 0.0;
  double lo = 0.0;
  for (int k = graded; k >= 0; --k) {
    const double hi = upper * std::ldexp(1.0, -k);
    const Panel<T> pn = gk_panel<T>(f, lo, hi);
    err += pn.err;
    l1 += pn.l1;
    queue.push(pn);
    lo = hi;
  }
  while (err > tol * l1 && queue.size() < kMaxPanels) {
    const Panel<T> worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel<T> a = gk_panel<T>(f, worst.lo, mid), b = gk_panel<T>(f, mid, worst.hi);
    err += a.err + b.err - worst.err;
    l1 += a.l1 + b.l1 - worst.l1;
    queue.push(a);
    queue.push(b);
  }
  if (!(err <= std::max(100.0 * tol * l1, 1e-300)))
    throw AccuracyError("caputo_oracle: adaptive quadrature did not converge", err);
  // sum in order of position for a result independent of the refinement order
  std::vector<Panel<T>> panels;
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel<T>& x, const Panel<T>& y) { return x.lo < y.lo; });
  T value{};
  for (const auto& pn : panels) value += pn.value;
  return value / std::tgamma(2.0 - alpha);
}

}  // namespace

double caputo_oracle(const std::function<double(double)>& u_prime, double alpha, double t, double tol) {
  return caputo_impl<double>(u_prime, alpha, t, tol);
}

Complex caputo_oracle_complex(const std::function<Complex(double)>& u_prime, double alpha, double t,
                              double tol) {
  return caputo_impl<Complex>(u_prime, alpha, t, tol);
}

// ---------------------------------------------------------------------------

CVector example1_solution(double t) {
  const double a = std::sin(2.0 * t);
  const double b = 0.5 - 0.5 * std::cos(std::sqrt(5.0) * t);
  return {std::pow(a, 6), std::pow(b, 6)};
}

CVector example1_derivative(double t) {
  const double r5 = std::sqrt(5.0);
  const double a = std::sin(2.0 * t);
  const double b = 0.5 - 0.5 * std::cos(r5 * t);
  return {12.0 * std::pow(a, 5) * std::cos(2.0 * t), 3.0 * r5 * std::pow(b, 5) * std::sin(r5 * t)};
}

ManufacturedProblem example1_problem(double tol) {
  const CMatrix a{{-1.0, 1.0}, {-1.0, -1.0}};
  const double alpha = 0.5;
  ManufacturedProblem mp;
  mp.problem.family = dense_operator(CMatrix(), a, kPi / 2);
  mp.problem.alpha = alpha;
  mp.problem.forcing = Forcing::pointwise_fn(
      2,
      [a, alpha, tol](double t, std::span<Complex> g) {
        if (t <= 0.0) {
          g[0] = g[1] = 0.0;
          return;
        }
        // Both components in one complex integral.
        const Complex d = caputo_oracle_complex(
            [](double s) {
              const CVector v = example1_derivative(s);
              return Complex(v[0].real(), v[1].real());
            },
            alpha, t, tol);
        const CVector u = example1_solution(t);
        const CVector au = a * std::span<const Complex>(u);
        g[0] = d.real() - au[0].real();
        g[1] = d.imag() - au[1].real();
      },
      true);
  mp.problem.u_exact = example1_solution;
  mp.problem.description = "dense 2x2, alpha = 1/2, u = [sin(2t)^6, (1/2 - cos(sqrt5 t)/2)^6]";
  mp.description = mp.problem.description;
  mp.t_end = 10.0;
  return mp;
}

// ---------------------------------------------------------------------------

CVector example2_mode(int n, int sign) {
  const auto nn = static_cast<std::size_t>(n);
  CVector v(nn * nn * nn);
  std::vector<double> cs(nn), sn(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const double x = 2.0 * kPi * static_cast<double>(i) / n;
    cs[i] = std::cos(x);
    sn[i] = std::sin(x);
  }
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k)
        v[(i * nn + j) * nn + k] = cs[i] + cs[j] + cs[k] + sign * (sn[i] + sn[j] + sn[k]);
  return v;
}

void example2_factors(double t, double alpha, double tol, Complex& f1, Complex& f2) {
  if (t <= 0.0) {
    f1 = f2 = 0.0;
    return;
  }
  // D^alpha e^{i pi t}: imaginary part is D^alpha sin, minus the real part is D^alpha (1 - cos).
  const Complex d = caputo_oracle_complex(
      [](double s) { return Complex(0.0, kPi) * std::exp(Complex(0.0, kPi * s)); }, alpha, t, tol);
  const double sn = std::sin(kPi * t);
  const double cs = std::cos(kPi * t);
  f1 = d.imag() + sn;
  f2 = -d.real() + (1.0 - cs);
}

ManufacturedProblem example2_problem(int n, double t_end, double tol) {
  if (n < 8) throw ConfigError("example2_problem: need at least 8 points per axis");
  auto family = std::make_shared<PeriodicCompactFd3d>(n);
  const double alpha = 0.5;
  const CVector hm = example2_mode(n, -1);
  const CVector hp = example2_mode(n, +1);

  ManufacturedProblem mp;
  mp.problem.family = family;
  mp.problem.alpha = alpha;
  mp.problem.forcing = Forcing::separable(
      {family->mass(hm), family->mass(hp)},
      [alpha, tol](double t, std::span<Complex> f) { example2_factors(t, alpha, tol, f[0], f[1]); }, true);
  mp.problem.u_exact = [hm, hp](double t) {
    const double a = std::sin(kPi * t);
    const double b = std::cos(kPi * t) - 1.0;
    CVector u(hm.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = hm[i] * a - hp[i] * b;
    return u;
  };
  mp.problem.description = "periodic subdiffusion, compact FD " + std::to_string(n) + "^3, alpha = 1/2";
  mp.description = mp.problem.description;
  mp.t_end = t_end;
  return mp;
}

// ---------------------------------------------------------------------------

CVector example3_initial(int n_points, double a_half) {
  if (n_points < 5) throw ConfigError("example3_initial: need at least 5 grid points");
  if (!(a_half >= 1.0)) throw ConfigError("example3_initial: half-width must be at least 1");
  const double eta = 2.0 * a_half / (n_points - 1);
  CVector u(static_cast<std::size_t>(n_points));
  for (int j = 0; j < n_points; ++j) {
    const double x = -a_half + j * eta;
    u[static_cast<std::size_t>(j)] = 10.0 * std::exp(Complex(-16.0 * x * x, 10.0 * x));
  }
  const double edge = std::max(std::abs(u.front()), std::abs(u.back()));
  if (edge > 1e-20)
    throw SupportError("example3_initial: initial value reaches the boundary (|u0| = " + std::to_string(edge) +
                       ")");
  return u;
}

Problem example3_problem(int n_points, double a_half, double alpha) {
  auto family = std::make_shared<SchrodingerTbc1d>(a_half, n_points, alpha);
  Problem p;
  p.family = family;
  p.alpha = alpha;
  p.forcing = Forcing::zero(static_cast<std::size_t>(n_points));
  p.u0 = example3_initial(n_points, a_half);
  family->check_initial_support(p.u0);
  p.description = "time-fractional Schroedinger on [-" + std::to_string(a_half) + ", " + std::to_string(a_half) +
                  "], n = " + std::to_string(n_points) + ", transparent closure";
  return p;
}

}  // namespace fcq
