#include "fcq/problem.hpp"

#include "fcq/parallel.hpp"

namespace fcq {

void Forcing::evaluate(double t, std::span<Complex> g) const {
  if (g.size() != dim) throw ConfigError("Forcing::evaluate: size mismatch");
  if (pointwise()) {
    factors(t, g);
    return;
  }
  CVector f(rank);
  factors(t, f);
  std::fill(g.begin(), g.end(), Complex(0.0));
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t d = 0; d < dim; ++d) g[d] += f[r] * modes[r][d];
}

CVector Forcing::evaluate(double t) const {
  CVector g(dim);
  evaluate(t, g);
  return g;
}

Forcing Forcing::zero(std::size_t dim) {
  Forcing f;
  f.dim = dim;
  // One zero mode, so the forcing is not mistaken for pointwise.
  f.modes.push_back(CVector(dim, 0.0));
  f.rank = 1;
  f.factors = [](double, std::span<Complex> out) { out[0] = 0.0; };
  f.real_valued = true;
  return f;
}

Forcing Forcing::pointwise_fn(std::size_t dim, FactorFn fn, bool real_valued) {
  Forcing f;
  f.dim = dim;
  f.rank = dim;
  f.factors = std::move(fn);
  f.real_valued = real_valued;
  return f;
}

Forcing Forcing::separable(std::vector<CVector> modes, FactorFn fn, bool real_valued) {
  if (modes.empty()) throw ConfigError("Forcing::separable: need at least one mode");
  Forcing f;
  f.dim = modes.front().size();
  for (const auto& m : modes)
    if (m.size() != f.dim) throw ConfigError("Forcing::separable: modes differ in length");
  f.rank = modes.size();
  f.modes = std::move(modes);
  f.factors = std::move(fn);
  f.real_valued = real_valued;
  return f;
}

namespace {
bool all_real(const CVector& v) {
  for (const auto& x : v)
    if (x.imag() != 0.0) return false;
  return true;
}
}  // namespace

Forcing Forcing::constant(CVector v) {
  const bool real = all_real(v);
  return separable({std::move(v)}, [](double, std::span<Complex> out) { out[0] = 1.0; }, real);
}

Forcing Forcing::plus_constant(CVector v) const {
  if (v.size() != dim) throw ConfigError("Forcing::plus_constant: size mismatch");
  const bool real = real_valued && all_real(v);
  std::vector<CVector> new_modes;
  if (pointwise()) {
    for (std::size_t d = 0; d < dim; ++d) {
      CVector e(dim, 0.0);
      e[d] = 1.0;
      new_modes.push_back(std::move(e));
    }
  } else {
    new_modes = modes;
  }
  new_modes.push_back(std::move(v));
  const std::size_t old_rank = rank;
  FactorFn old = factors;
  return separable(
      std::move(new_modes),
      [old, old_rank](double t, std::span<Complex> out) {
        old(t, out.first(old_rank));
        out[old_rank] = 1.0;
      },
      real);
}

bool Problem::has_initial_value() const {
  for (const auto& x : u0)
    if (x != 0.0) return true;
  return false;
}

CVector Problem::stage_samples(std::size_t n, std::span<const double> c, double h) const {
  const std::size_t d = dim();
  CVector out(c.size() * d);
  for (std::size_t i = 0; i < c.size(); ++i)
    forcing.evaluate((static_cast<double>(n) + c[i]) * h, std::span<Complex>(out).subspan(i * d, d));
  return out;
}

// ---------------------------------------------------------------------------

StageTable::StageTable(const Problem& problem, const Tableau& tableau, double h, std::size_t steps,
                       int workers)
    : steps_(steps),
      stages_(tableau.s),
      rank_(problem.forcing.rank),
      dim_(problem.forcing.dim),
      stride_(static_cast<std::size_t>(tableau.s) * problem.forcing.rank),
      h_(h),
      c_(tableau.c),
      real_(problem.forcing.real_valued),
      modes_(problem.forcing.modes) {
  if (dim_ != problem.dim()) throw ConfigError("StageTable: forcing dimension differs from operator");
  table_.assign(steps_ * stride_, 0.0);
  parallel_for(
      steps_, workers,
      [&](std::size_t n) {
        for (int i = 0; i < stages_; ++i) {
          const double t = (static_cast<double>(n) + c_[static_cast<std::size_t>(i)]) * h_;
          problem.forcing.factors(t, std::span<Complex>(table_).subspan(n * stride_ + i * rank_, rank_));
        }
      },
      16);
}

void StageTable::combine_modes(std::span<const Complex> coeff, std::span<Complex> out) const {
  if (pointwise()) {
    std::copy(coeff.begin(), coeff.end(), out.begin());
    return;
  }
  std::fill(out.begin(), out.end(), Complex(0.0));
  for (std::size_t r = 0; r < rank_; ++r) {
    const Complex f = coeff[r];
    if (f == 0.0) continue;
    const CVector& v = modes_[r];
    for (std::size_t d = 0; d < dim_; ++d) out[d] += f * v[d];
  }
}

CVector StageTable::stage_vector(std::size_t n, int i) const {
  CVector out(dim_);
  combine_modes(factors(n).subspan(static_cast<std::size_t>(i) * rank_, rank_), out);
  return out;
}

bool StageTable::matches(const Tableau& t, double h, std::size_t steps) const {
  return t.s == stages_ && t.c == c_ && h == h_ && steps <= steps_;
}

}  // namespace fcq
