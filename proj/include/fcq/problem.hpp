#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fcq/operators.hpp"
#include "fcq/tableau.hpp"
#include "fcq/types.hpp"

namespace fcq {

/// Inhomogeneity g(t) = sum_r f_r(t) v_r, already in the form that appears on
/// the right of M D^alpha u = A u + g. With no modes the forcing is pointwise:
/// the factors are the components of g(t) themselves.
struct Forcing {
  using FactorFn = std::function<void(double t, std::span<Complex> factors)>;

  std::size_t dim = 0;
  std::size_t rank = 0;
  std::vector<CVector> modes;
  FactorFn factors;
  bool real_valued = true;

  bool pointwise() const { return modes.empty(); }
  void evaluate(double t, std::span<Complex> g) const;
  CVector evaluate(double t) const;

  static Forcing zero(std::size_t dim);
  static Forcing pointwise_fn(std::size_t dim, FactorFn fn, bool real_valued);
  static Forcing separable(std::vector<CVector> modes, FactorFn fn, bool real_valued);
  /// g(t) = v for all t.
  static Forcing constant(CVector v);
  /// g(t) + v for all t.
  Forcing plus_constant(CVector v) const;
};

/// M D^alpha u = A u + g, u(0) = u0.
struct Problem {
  FamilyPtr family;
  double alpha = 0.5;
  Forcing forcing;
  std::function<CVector(double)> u_exact;  // optional
  CVector u0;                              // empty means zero
  std::string description;

  std::size_t dim() const { return family->dim(); }
  bool has_initial_value() const;
  /// G_n = (g(t_n + c_k h))_{k=1..s}, stage-major, length s*dim.
  CVector stage_samples(std::size_t n, std::span<const double> c, double h) const;
};

/// Time factors f_r(t_n + c_i h) for n = 0..steps-1, computed once and shared
/// read-only by the first block and all scalar marches.
class StageTable {
 public:
  StageTable(const Problem& problem, const Tableau& tableau, double h, std::size_t steps,
             int workers = 0);

  std::size_t steps() const { return steps_; }
  int stages() const { return stages_; }
  std::size_t rank() const { return rank_; }
  std::size_t dim() const { return dim_; }
  double h() const { return h_; }
  bool pointwise() const { return modes_.empty(); }
  bool real_valued() const { return real_; }
  const std::vector<CVector>& modes() const { return modes_; }

  /// f_r(t_n + c_i h) for i < s, r < rank, at index i*rank + r.
  std::span<const Complex> factors(std::size_t n) const {
    return {table_.data() + n * stride_, stride_};
  }
  Complex factor(std::size_t n, int i, std::size_t r) const {
    return table_[n * stride_ + static_cast<std::size_t>(i) * rank_ + r];
  }

  /// out = sum_r coeff[r] v_r (coeff itself when pointwise).
  void combine_modes(std::span<const Complex> coeff, std::span<Complex> out) const;
  /// G_{n,i} as a full vector.
  CVector stage_vector(std::size_t n, int i) const;

  bool matches(const Tableau& t, double h, std::size_t steps) const;

 private:
  std::size_t steps_;
  int stages_;
  std::size_t rank_;
  std::size_t dim_;
  std::size_t stride_;
  double h_;
  std::vector<double> c_;
  bool real_;
  std::vector<CVector> modes_;
  CVector table_;
};

}  // namespace fcq
