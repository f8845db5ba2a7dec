#include "fcq/contour.hpp"

#include <cmath>

namespace fcq {

double theta1(double alpha, double theta0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("theta1: alpha must lie in (0, 1)");
  if (!(theta0 >= 0.0 && theta0 <= kPi / 2)) throw DomainError("theta1: theta0 must lie in [0, pi/2]");
  return std::min((kPi * (1.0 - alpha) + 2.0 * theta0) / (2.0 * alpha), kPi / 2);
}

double a_of_rho(double rho, int Lambda, double phi) {
  return std::acosh(static_cast<double>(Lambda) / ((1.0 - rho) * std::sin(phi)));
}

double contour_objective(double rho, int K, int Lambda, double phi, double d, double machine_eps) {
  // log e_K(rho) = -2 pi d K / a(rho); exponentiate each term separately.
  const double log_eps_k = -2.0 * kPi * d * K / a_of_rho(rho, Lambda, phi);
  return machine_eps * std::exp(log_eps_k * (rho - 1.0)) + std::exp(log_eps_k * rho);
}

ContourParams select_parameters(int K, int Lambda, double theta, double machine_eps) {
  if (K < 2) throw ConfigError("select_parameters: K must be >= 2");
  if (Lambda < 2) throw ConfigError("select_parameters: Lambda must be an integer > 1");
  if (!(theta > 0.0 && theta <= kPi)) throw ConfigError("select_parameters: theta must be positive");

  ContourParams p;
  p.K = K;
  p.Lambda = Lambda;
  p.phi = theta / 2.0;
  p.d = theta / 2.0;

  auto f = [&](double rho) { return contour_objective(rho, K, Lambda, p.phi, p.d, machine_eps); };

  constexpr int kScan = 2000;
  auto grid = [](int i) { return (static_cast<double>(i) + 0.5) / kScan; };
  int best = 0;
  double best_val = f(grid(0));
  for (int i = 1; i < kScan; ++i) {
    const double v = f(grid(i));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  p.boundary_minimizer = (best == 0 || best == kScan - 1);

  double lo = best > 0 ? grid(best - 1) : grid(0) * 0.5;
  double hi = best < kScan - 1 ? grid(best + 1) : 0.5 * (grid(kScan - 1) + 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double rho = 0.5 * (lo + hi);
  if (f(rho) > best_val) rho = grid(best);

  p.rho_opt = rho;
  p.a_rho = a_of_rho(rho, Lambda, p.phi);
  p.tau = p.a_rho / K;
  return p;
}

double mu_level(int ell, int K, double h, int kappa, const ContourParams& params) {
  if (!(h > 0.0)) throw DomainError("mu_level: h must be positive");
  if (ell < 1) throw DomainError("mu_level: level index must be >= 1");
  const double lambda_pow = std::pow(static_cast<double>(params.Lambda), ell);
  const double mu = 2.0 * kPi * params.d * K * (1.0 - params.rho_opt) /
                    (lambda_pow * (kappa + 1.0) * h * params.a_rho);
  if (!std::isfinite(lambda_pow) || !(mu > 0.0) || !std::isfinite(mu))
    throw DomainError("mu_level: scale out of floating-point range for level " + std::to_string(ell));
  return mu;
}

ContourLevel level_nodes(double mu, const ContourParams& params, int ell) {
  ContourLevel lvl;
  lvl.ell = ell;
  lvl.mu = mu;
  lvl.K = params.K;
  const auto n = static_cast<std::size_t>(2 * params.K + 1);
  lvl.lambda.resize(n);
  lvl.omega.resize(n);
  const double sp = std::sin(params.phi), cp = std::cos(params.phi);
  for (int k = 0; k <= params.K; ++k) {
    const double x = k * params.tau;
    const double ch = std::cosh(x), sh = std::sinh(x);
    // sin(ix - phi) = -sin(phi) cosh(x) + i cos(phi) sinh(x)
    // cos(ix - phi) =  cos(phi) cosh(x) + i sin(phi) sinh(x)
    const Complex lam(mu * (1.0 - sp * ch), mu * cp * sh);
    const Complex om = params.tau * mu / (2.0 * kPi) * Complex(cp * ch, sp * sh);
    lvl.lambda[static_cast<std::size_t>(params.K + k)] = lam;
    lvl.omega[static_cast<std::size_t>(params.K + k)] = om;
    lvl.lambda[static_cast<std::size_t>(params.K - k)] = std::conj(lam);
    lvl.omega[static_cast<std::size_t>(params.K - k)] = std::conj(om);
  }
  return lvl;
}

bool right_of_hyperbola(Complex p, double mu, double phi) {
  const double x = std::asinh(p.imag() / (mu * std::cos(phi)));
  return p.real() > mu * (1.0 - std::sin(phi) * std::cosh(x));
}

}  // namespace fcq
