#pragma once

#include <string>
#include <vector>

#include "fcq/smallmat.hpp"
#include "fcq/types.hpp"

namespace fcq {

/// Butcher tableau of an s-stage implicit Runge-Kutta method.
struct Tableau {
  int s = 0;
  std::vector<double> a;  // row-major s x s RK matrix
  std::vector<double> b;
  std::vector<double> c;
  int order = 0;
  int stage_order = 0;
  std::string name;

  double A(int i, int j) const { return a[static_cast<std::size_t>(i * s + j)]; }
  CMatrix matrix() const;
};

/// The s-stage Radau IIA method (order 2s-1, stage order s), s in {1, 2, 3}.
Tableau radau_iia(int s);

/// Builds a tableau from explicit coefficients; only shapes are validated.
Tableau make_tableau(int s, std::vector<double> a, std::vector<double> b, std::vector<double> c,
                     int order, int stage_order, std::string name = "custom");

/// Looks up "radau1" / "radau3" / "radau5".
Tableau tableau_by_name(const std::string& name);

struct Stability {
  Complex r;
  CVector q;  // row vector b^T (I - zA)^{-1}
};

/// r(z) and q(z). r is evaluated as e_s^T (I - zA)^{-1} 1 when the last row of
/// A equals b, and as 1 + z q(z) 1 otherwise.
Stability stability(Complex z, const Tableau& t);

/// r(z) via 1 + z q(z) 1, kept for cross-checks.
Complex stability_r_via_q(Complex z, const Tableau& t);

struct AssumptionReport {
  bool weights_equal_last_row = false;
  bool invertible = false;
  bool spectrum_in_right_half_plane = false;
  CVector eigenvalues;

  bool all() const { return weights_equal_last_row && invertible && spectrum_in_right_half_plane; }
};

AssumptionReport check_assumptions(const Tableau& t);

/// Delta(zeta) = (A + zeta/(1-zeta) 1 b^T)^{-1}.
CMatrix delta(Complex zeta, const Tableau& t);

}  // namespace fcq
