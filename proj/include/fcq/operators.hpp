#pragma once

// Operator families: resolvent solves (nu M - A) x = y at complex frequency nu.
// nu always arrives already powered (nu = lambda^alpha).

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

#include "fcq/smallmat.hpp"
#include "fcq/types.hpp"

namespace fcq {

class OperatorFamily {
 public:
  virtual ~OperatorFamily() = default;

  virtual std::size_t dim() const = 0;
  /// Sector angle theta_1 usable for contour construction.
  virtual double theta1_hint() const = 0;
  virtual bool has_mass() const = 0;
  /// A and M are real, so solve(conj nu, conj y) = conj solve(nu, y).
  virtual bool is_real() const = 0;

  /// x = (nu M - A(nu))^{-1} y. Safe to call concurrently.
  virtual void solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const = 0;
  CVector solve(Complex nu, std::span<const Complex> y) const;

  /// out = M y (identity when the family has no mass matrix).
  virtual void apply_mass(std::span<const Complex> y, std::span<Complex> out) const;
  /// out = A y. Frequency-dependent closures are not included.
  virtual void apply_operator(std::span<const Complex> y, std::span<Complex> out) const = 0;

  /// Throws SupportError when u0 is not admissible initial data.
  virtual void check_initial_support(std::span<const Complex> /*u0*/) const {}

  CVector mass(std::span<const Complex> y) const;
  CVector op(std::span<const Complex> y) const;
};

using FamilyPtr = std::shared_ptr<const OperatorFamily>;

/// Dense family; an empty M means the identity. LU factors are cached per
/// distinct nu (keyed by its bit pattern).
class DenseOperator final : public OperatorFamily {
 public:
  DenseOperator(CMatrix mass, CMatrix op, double theta1 = kPi / 2);

  std::size_t dim() const override { return op_.rows(); }
  double theta1_hint() const override { return theta1_; }
  bool has_mass() const override { return !mass_.empty(); }
  bool is_real() const override { return real_; }
  using OperatorFamily::solve;
  void solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const override;
  void apply_mass(std::span<const Complex> y, std::span<Complex> out) const override;
  void apply_operator(std::span<const Complex> y, std::span<Complex> out) const override;

  const CMatrix& matrix() const { return op_; }
  std::size_t cached_factors() const;

 private:
  std::shared_ptr<const LuFactor> factor(Complex nu) const;

  CMatrix mass_;
  CMatrix op_;
  double theta1_;
  bool real_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const LuFactor>> cache_;
};

std::shared_ptr<DenseOperator> dense_operator(CMatrix mass, CMatrix op, double theta1 = kPi / 2);

/// Fourth-order compact finite differences for the Laplacian on the
/// 2 pi-periodic cube with n points per axis (index = (i*n + j)*n + k).
/// Solves are spectral: 3D DFT, divide by the symbol, inverse DFT.
class PeriodicCompactFd3d final : public OperatorFamily {
 public:
  explicit PeriodicCompactFd3d(int n_per_dim);

  std::size_t dim() const override { return static_cast<std::size_t>(n_) * n_ * n_; }
  double theta1_hint() const override { return kPi / 2; }
  bool has_mass() const override { return true; }
  bool is_real() const override { return true; }
  using OperatorFamily::solve;
  void solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const override;
  void apply_mass(std::span<const Complex> y, std::span<Complex> out) const override;
  void apply_operator(std::span<const Complex> y, std::span<Complex> out) const override;

  int n() const { return n_; }
  double spacing() const { return eta_; }
  /// Symbols of A_1 and M_1 at xi = 2 pi k / n.
  double symbol_a(int k) const { return sym_a_[static_cast<std::size_t>(k)]; }
  double symbol_m(int k) const { return sym_m_[static_cast<std::size_t>(k)]; }

 private:
  void transform(std::span<Complex> x, int sign) const;

  int n_;
  double eta_;
  std::vector<double> sym_a_, sym_m_;
};

/// Symbols of the 1D blocks: a(xi) = (2 cos xi - 2)/eta^2, m(xi) = 5/6 + cos(xi)/6.
double compact_symbol_a(double xi, double eta);
double compact_symbol_m(double xi);

/// 1D time-fractional Schroedinger operator i d^2/dx^2 on [-a, a], compact
/// finite differences, with the exact discrete transparent closure at both
/// ends. Solves (nu M - i A) x = y with the decaying exterior root folded
/// into the corner rows.
class SchrodingerTbc1d final : public OperatorFamily {
 public:
  SchrodingerTbc1d(double a_half, int n_points, double alpha);

  std::size_t dim() const override { return static_cast<std::size_t>(n_); }
  double theta1_hint() const override { return theta1_; }
  bool has_mass() const override { return true; }
  bool is_real() const override { return false; }
  using OperatorFamily::solve;
  void solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const override;
  void apply_mass(std::span<const Complex> y, std::span<Complex> out) const override;
  void apply_operator(std::span<const Complex> y, std::span<Complex> out) const override;
  void check_initial_support(std::span<const Complex> u0) const override;

  double spacing() const { return eta_; }
  double a_half() const { return a_half_; }
  double x(int j) const { return -a_half_ + j * eta_; }

  struct Roots {
    Complex inner;  // |z| < 1, decaying exterior solution
    Complex outer;  // |z| > 1
  };
  /// Roots of phi z^2 + psi z + phi = 0.
  Roots boundary_roots(Complex nu) const;
  Complex off_diagonal(Complex nu) const;  // phi(nu)
  Complex diagonal(Complex nu) const;      // psi(nu)

 private:
  double a_half_;
  int n_;
  double alpha_;
  double eta_;
  double theta1_;
};

/// max over samples and random unit y of |nu| ||solve(nu, y)|| / ||M y||.
double sector_probe(const OperatorFamily& family, std::span<const Complex> samples,
                    int trials_per_sample = 3, unsigned seed = 12345);

}  // namespace fcq
