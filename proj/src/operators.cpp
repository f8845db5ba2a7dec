#include "fcq/operators.hpp"

#include <bit>
#include <cmath>
#include <random>

namespace fcq {

CVector OperatorFamily::solve(Complex nu, std::span<const Complex> y) const {
  CVector x(dim());
  solve(nu, y, x);
  return x;
}

void OperatorFamily::apply_mass(std::span<const Complex> y, std::span<Complex> out) const {
  std::copy(y.begin(), y.end(), out.begin());
}

CVector OperatorFamily::mass(std::span<const Complex> y) const {
  CVector out(dim());
  apply_mass(y, out);
  return out;
}

CVector OperatorFamily::op(std::span<const Complex> y) const {
  CVector out(dim());
  apply_operator(y, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxCachedFactors = 8192;

bool is_real_matrix(const CMatrix& m) {
  for (const auto& x : m.data())
    if (x.imag() != 0.0) return false;
  return true;
}

}  // namespace

DenseOperator::DenseOperator(CMatrix mass, CMatrix op, double theta1)
    : mass_(std::move(mass)), op_(std::move(op)), theta1_(theta1) {
  if (op_.rows() == 0 || op_.rows() != op_.cols())
    throw ConfigError("dense_operator: A must be square and non-empty");
  if (!mass_.empty() && (mass_.rows() != op_.rows() || mass_.cols() != op_.cols()))
    throw ConfigError("dense_operator: M and A shapes differ");
  real_ = is_real_matrix(op_) && (mass_.empty() || is_real_matrix(mass_));
}

std::shared_ptr<const LuFactor> DenseOperator::factor(Complex nu) const {
  const auto key = std::make_pair(std::bit_cast<std::uint64_t>(nu.real()),
                                  std::bit_cast<std::uint64_t>(nu.imag()));
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const std::size_t n = dim();
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = (mass_.empty() ? (i == j ? nu : Complex(0.0)) : nu * mass_(i, j)) - op_(i, j);
  std::shared_ptr<const LuFactor> lu;
  try {
    lu = std::make_shared<const LuFactor>(std::move(m));
  } catch (const SolverError&) {
    throw SolverError("dense_operator: nu M - A is singular", nu);
  }
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() >= kMaxCachedFactors) cache_.clear();
  cache_.emplace(key, lu);
  return lu;
}

void DenseOperator::solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const {
  if (y.size() != dim() || x.size() != dim()) throw ConfigError("dense_operator: size mismatch");
  std::copy(y.begin(), y.end(), x.begin());
  factor(nu)->solve_in_place(x);
}

void DenseOperator::apply_mass(std::span<const Complex> y, std::span<Complex> out) const {
  if (mass_.empty()) {
    std::copy(y.begin(), y.end(), out.begin());
    return;
  }
  const CVector r = mass_ * y;
  std::copy(r.begin(), r.end(), out.begin());
}

void DenseOperator::apply_operator(std::span<const Complex> y, std::span<Complex> out) const {
  const CVector r = op_ * y;
  std::copy(r.begin(), r.end(), out.begin());
}

std::size_t DenseOperator::cached_factors() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

std::shared_ptr<DenseOperator> dense_operator(CMatrix mass, CMatrix op, double theta1) {
  return std::make_shared<DenseOperator>(std::move(mass), std::move(op), theta1);
}

// ---------------------------------------------------------------------------

double sector_probe(const OperatorFamily& family, std::span<const Complex> samples,
                    int trials_per_sample, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n = family.dim();
  CVector y(n), my(n), x(n);
  auto norm2 = [](std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return std::sqrt(s);
  };
  double c = 0.0;
  for (const Complex nu : samples)
    for (int t = 0; t < trials_per_sample; ++t) {
      for (auto& e : y) e = Complex(normal(rng), normal(rng));
      const double ny = norm2(y);
      for (auto& e : y) e /= ny;
      family.apply_mass(y, my);
      family.solve(nu, y, x);
      c = std::max(c, std::abs(nu) * norm2(x) / norm2(my));
    }
  return c;
}

}  // namespace fcq
