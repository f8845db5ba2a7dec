#include <cmath>

#include "fcq/contour.hpp"
#include "fcq/operators.hpp"

namespace fcq {

namespace {
constexpr Complex kI(0.0, 1.0);
constexpr double kSupportTolerance = 1e-20;
}  // namespace

SchrodingerTbc1d::SchrodingerTbc1d(double a_half, int n_points, double alpha)
    : a_half_(a_half), n_(n_points), alpha_(alpha) {
  if (n_ < 5) throw ConfigError("schrodinger_tbc_1d: need at least 5 grid points");
  if (!(a_half_ > 0.0)) throw ConfigError("schrodinger_tbc_1d: half-width must be positive");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw ConfigError("schrodinger_tbc_1d: alpha must lie in (0, 1)");
  eta_ = 2.0 * a_half_ / (n_ - 1);
  theta1_ = theta1(alpha_, 0.0);
}

Complex SchrodingerTbc1d::off_diagonal(Complex nu) const { return nu / 12.0 - kI / (eta_ * eta_); }

Complex SchrodingerTbc1d::diagonal(Complex nu) const { return 5.0 * nu / 6.0 + 2.0 * kI / (eta_ * eta_); }

SchrodingerTbc1d::Roots SchrodingerTbc1d::boundary_roots(Complex nu) const {
  const Complex phi = off_diagonal(nu);
  const Complex psi = diagonal(nu);
  if (phi == 0.0) throw SolverError("schrodinger_tbc_1d: vanishing off-diagonal coefficient", nu);
  const Complex root = std::sqrt(psi * psi - 4.0 * phi * phi);
  const Complex za = (-psi + root) / (2.0 * phi);
  const Complex zb = (-psi - root) / (2.0 * phi);
  // Select by modulus; compute the small root from the product z1 z2 = 1.
  const Complex outer = std::abs(za) >= std::abs(zb) ? za : zb;
  const Complex inner = 1.0 / outer;
  if (std::abs(std::abs(inner) - 1.0) <= 1e-10 && std::abs(std::abs(outer) - 1.0) <= 1e-10)
    throw SolverError("schrodinger_tbc_1d: both boundary roots on the unit circle", nu);
  return {inner, outer};
}

void SchrodingerTbc1d::solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const {
  const auto n = static_cast<std::size_t>(n_);
  if (y.size() != n || x.size() != n) throw ConfigError("schrodinger_tbc_1d: size mismatch");
  const Complex phi = off_diagonal(nu);
  const Complex psi = diagonal(nu);
  const Complex corner = psi + phi * boundary_roots(nu).inner;
  const double scale = std::max(std::abs(psi), std::abs(phi));

  // Thomas elimination for the symmetric tridiagonal system.
  CVector c(n);
  Complex pivot = corner;
  if (std::abs(pivot) < 1e-14 * scale) throw SolverError("schrodinger_tbc_1d: tridiagonal breakdown", nu);
  c[0] = phi / pivot;
  x[0] = y[0] / pivot;
  for (std::size_t j = 1; j < n; ++j) {
    const Complex d = (j + 1 == n) ? corner : psi;
    pivot = d - phi * c[j - 1];
    if (std::abs(pivot) < 1e-14 * scale)
      throw SolverError("schrodinger_tbc_1d: tridiagonal breakdown", nu);
    c[j] = phi / pivot;
    x[j] = (y[j] - phi * x[j - 1]) / pivot;
  }
  for (std::size_t j = n - 1; j-- > 0;) x[j] -= c[j] * x[j + 1];
}

void SchrodingerTbc1d::apply_mass(std::span<const Complex> y, std::span<Complex> out) const {
  const auto n = static_cast<std::size_t>(n_);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex left = j > 0 ? y[j - 1] : Complex(0.0);
    const Complex right = j + 1 < n ? y[j + 1] : Complex(0.0);
    out[j] = (left + right) / 12.0 + 5.0 * y[j] / 6.0;
  }
}

void SchrodingerTbc1d::apply_operator(std::span<const Complex> y, std::span<Complex> out) const {
  const auto n = static_cast<std::size_t>(n_);
  const Complex f = kI / (eta_ * eta_);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex left = j > 0 ? y[j - 1] : Complex(0.0);
    const Complex right = j + 1 < n ? y[j + 1] : Complex(0.0);
    out[j] = f * (left - 2.0 * y[j] + right);
  }
}

void SchrodingerTbc1d::check_initial_support(std::span<const Complex> u0) const {
  const auto n = static_cast<std::size_t>(n_);
  if (u0.size() != n) throw ConfigError("schrodinger_tbc_1d: initial value size mismatch");
  double peak = 1.0;
  for (const auto& v : u0) peak = std::max(peak, std::abs(v));
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, n - 2, n - 1})
    if (std::abs(u0[j]) > kSupportTolerance * peak)
      throw SupportError("schrodinger_tbc_1d: initial value reaches the artificial boundary (|u0| = " +
                         std::to_string(std::abs(u0[j])) + " at cell " + std::to_string(j) + ")");
}

}  // namespace fcq
