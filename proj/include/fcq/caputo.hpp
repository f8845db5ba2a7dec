#pragma once

// Caputo derivative by quadrature, and the manufactured test problems built on it.

#include <functional>
#include <string>

#include "fcq/problem.hpp"
#include "fcq/types.hpp"

namespace fcq {

inline constexpr double kOracleTolerance = 1e-12;

/// D^alpha u(t) = 1/Gamma(1-alpha) int_0^t (t-s)^(-alpha) u'(s) ds, given u'.
/// After sigma = t - s and sigma = r^(1/(1-alpha)) the kernel disappears and
/// adaptive 21-point Gauss-Kronrod panels integrate over r in [0, t^(1-alpha)].
double caputo_oracle(const std::function<double(double)>& u_prime, double alpha, double t,
                     double tol = kOracleTolerance);
/// Same for complex-valued u; real and imaginary parts are independent.
Complex caputo_oracle_complex(const std::function<Complex(double)>& u_prime, double alpha, double t,
                              double tol = kOracleTolerance);

struct ManufacturedProblem {
  Problem problem;  // u_exact set
  std::string description;
  double t_end = 0.0;
};

/// D^(1/2) u = A u + g with A = [[-1, 1], [-1, -1]] and
/// u(t) = [sin(2t)^6, (1/2 - cos(sqrt5 t)/2)^6].
ManufacturedProblem example1_problem(double tol = kOracleTolerance);

/// Exact solution of example 1 and its derivative.
CVector example1_solution(double t);
CVector example1_derivative(double t);

/// Subdiffusion D^(1/2) u = Laplace u + g on the 2 pi-periodic cube, compact
/// finite differences with n points per axis, exact solution
/// u = h_-(x) sin(pi t) - h_+(x)(cos(pi t) - 1),
/// h_-/+ = cos x + cos y + cos z -/+ (sin x + sin y + sin z).
ManufacturedProblem example2_problem(int n_per_dim, double t_end = 123.45, double tol = kOracleTolerance);

/// Grid samples of h_- and h_+ (index (i*n + j)*n + k, x_i = 2 pi i / n).
CVector example2_mode(int n_per_dim, int sign);

/// Time factors f1 = D^(1/2) sin(pi t) + sin(pi t), f2 = D^(1/2)(1 - cos pi t) + 1 - cos pi t.
void example2_factors(double t, double alpha, double tol, Complex& f1, Complex& f2);

/// u0(x) = 10 exp(-(4x)^2 + 10 i x) on the grid over [-a, a].
CVector example3_initial(int n_points, double a_half);

/// Time-fractional Schroedinger equation D^alpha u = i u_xx on [-a, a] with
/// transparent closure, zero forcing and u(0) = example3_initial.
Problem example3_problem(int n_points, double a_half, double alpha = 0.75);

}  // namespace fcq
