#include "fcq/tableau.hpp"

#include <cmath>

namespace fcq {

CMatrix Tableau::matrix() const {
  CMatrix m(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = A(i, j);
  return m;
}

Tableau make_tableau(int s, std::vector<double> a, std::vector<double> b, std::vector<double> c,
                     int order, int stage_order, std::string name) {
  const auto n = static_cast<std::size_t>(s);
  if (s < 1 || a.size() != n * n || b.size() != n || c.size() != n)
    throw ConfigError("make_tableau: inconsistent tableau shapes");
  return Tableau{s, std::move(a), std::move(b), std::move(c), order, stage_order, std::move(name)};
}

Tableau radau_iia(int s) {
  switch (s) {
    case 1:
      return make_tableau(1, {1.0}, {1.0}, {1.0}, 1, 1, "radau1");
    case 2:
      return make_tableau(2, {5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0}, {3.0 / 4.0, 1.0 / 4.0},
                          {1.0 / 3.0, 1.0}, 3, 2, "radau3");
    case 3: {
      const double r6 = std::sqrt(6.0);
      std::vector<double> a = {
          (88.0 - 7.0 * r6) / 360.0,    (296.0 - 169.0 * r6) / 1800.0, (-2.0 + 3.0 * r6) / 225.0,
          (296.0 + 169.0 * r6) / 1800.0, (88.0 + 7.0 * r6) / 360.0,    (-2.0 - 3.0 * r6) / 225.0,
          (16.0 - r6) / 36.0,           (16.0 + r6) / 36.0,            1.0 / 9.0};
      std::vector<double> b(a.begin() + 6, a.end());
      return make_tableau(3, std::move(a), std::move(b), {(4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0},
                          5, 3, "radau5");
    }
    default:
      throw ConfigError("radau_iia: unsupported stage count " + std::to_string(s) +
                        " (supported: 1, 2, 3)");
  }
}

Tableau tableau_by_name(const std::string& name) {
  if (name == "radau1") return radau_iia(1);
  if (name == "radau3") return radau_iia(2);
  if (name == "radau5") return radau_iia(3);
  throw ConfigError("unknown method '" + name + "' (expected radau1, radau3 or radau5)");
}

namespace {

bool last_row_is_b(const Tableau& t) {
  for (int j = 0; j < t.s; ++j)
    if (t.A(t.s - 1, j) != t.b[static_cast<std::size_t>(j)]) return false;
  return true;
}

LuFactor stage_lu(Complex z, const Tableau& t) {
  CMatrix m = CMatrix::identity(static_cast<std::size_t>(t.s)) - t.matrix() * z;
  try {
    return LuFactor(std::move(m));
  } catch (const SolverError&) {
    throw PoleError("stability: I - zA is singular", z);
  }
}

}  // namespace

Stability stability(Complex z, const Tableau& t) {
  const LuFactor lu = stage_lu(z, t);
  const auto n = static_cast<std::size_t>(t.s);
  Stability out;
  out.q.assign(t.b.begin(), t.b.end());
  lu.solve_transposed_in_place(out.q);
  if (last_row_is_b(t)) {
    CVector w(n, 1.0);
    lu.solve_in_place(w);
    out.r = w[n - 1];
  } else {
    Complex sum = 0.0;
    for (const auto& x : out.q) sum += x;
    out.r = 1.0 + z * sum;
  }
  if (!std::isfinite(out.r.real()) || !std::isfinite(out.r.imag()))
    throw PoleError("stability: non-finite value next to a pole", z);
  return out;
}

Complex stability_r_via_q(Complex z, const Tableau& t) {
  const LuFactor lu = stage_lu(z, t);
  CVector q(t.b.begin(), t.b.end());
  lu.solve_transposed_in_place(q);
  Complex sum = 0.0;
  for (const auto& x : q) sum += x;
  return 1.0 + z * sum;
}

AssumptionReport check_assumptions(const Tableau& t) {
  AssumptionReport rep;
  rep.weights_equal_last_row = last_row_is_b(t);
  const CMatrix a = t.matrix();
  try {
    const LuFactor lu(a);
    rep.invertible = std::abs(lu.determinant()) > 1e-12;
  } catch (const SolverError&) {
    rep.invertible = false;
  }
  rep.eigenvalues = eigenvalues_small(a);
  rep.spectrum_in_right_half_plane = true;
  for (const auto& e : rep.eigenvalues)
    if (!(e.real() > 0.0)) rep.spectrum_in_right_half_plane = false;
  return rep;
}

CMatrix delta(Complex zeta, const Tableau& t) {
  if (zeta == 1.0) throw PoleError("delta: zeta = 1 is a pole", zeta);
  const Complex f = zeta / (1.0 - zeta);
  CMatrix inner = t.matrix();
  for (int i = 0; i < t.s; ++i)
    for (int j = 0; j < t.s; ++j) inner(i, j) += f * t.b[static_cast<std::size_t>(j)];
  try {
    return inverse(inner);
  } catch (const SolverError&) {
    throw PoleError("delta: A + zeta/(1-zeta) 1 b^T is singular", zeta);
  }
}

}  // namespace fcq
