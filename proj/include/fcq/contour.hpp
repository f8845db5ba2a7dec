#pragma once

// Hyperbolic integration contours gamma(x) = mu (1 + sin(i x - phi)) and the
// trapezoidal nodes/weights used for the convolution weights of each level.

#include "fcq/types.hpp"

namespace fcq {

/// Default interval growth factor.
inline constexpr int kDefaultLambda = 5;

/// Sector half-angle excess: min{(pi(1-alpha) + 2 theta0) / (2 alpha), pi/2}.
double theta1(double alpha, double theta0);

struct ContourParams {
  double phi = 0.0;      // asymptote angle
  double d = 0.0;        // half-width of the strip of analyticity
  double rho_opt = 0.0;
  double a_rho = 0.0;    // a(rho_opt)
  double tau = 0.0;      // a(rho_opt) / K
  int K = 0;
  int Lambda = kDefaultLambda;
  bool boundary_minimizer = false;  // objective had no interior minimum on the scan grid
};

/// a(rho) = arccosh(Lambda / ((1 - rho) sin phi)).
double a_of_rho(double rho, int Lambda, double phi);

/// eps * e_K(rho)^(rho-1) + e_K(rho)^rho with e_K(rho) = exp(-2 pi d K / a(rho)).
double contour_objective(double rho, int K, int Lambda, double phi, double d, double machine_eps);

/// phi = d = theta/2; rho_opt by a 2000-point scan followed by golden-section
/// refinement to 1e-6.
ContourParams select_parameters(int K, int Lambda, double theta, double machine_eps = kMachineEps);

/// mu_l = 2 pi d K (1 - rho_opt) / (Lambda^l (kappa + 1) h a(rho_opt)).
double mu_level(int ell, int K, double h, int kappa, const ContourParams& params);

/// 2K+1 nodes lambda_k and weights omega_k, k = -K..K, stored at index k + K.
struct ContourLevel {
  int ell = 0;
  double mu = 0.0;
  int K = 0;
  CVector lambda;
  CVector omega;

  Complex node(int k) const { return lambda[static_cast<std::size_t>(k + K)]; }
  Complex weight(int k) const { return omega[static_cast<std::size_t>(k + K)]; }
};

ContourLevel level_nodes(double mu, const ContourParams& params, int ell = 0);

/// True when the point p lies strictly to the right of the hyperbola
/// mu (1 + sin(i x - phi)).
bool right_of_hyperbola(Complex p, double mu, double phi);

}  // namespace fcq
