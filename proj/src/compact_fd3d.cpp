#include <cmath>

#include "fcq/operators.hpp"

namespace fcq {

double compact_symbol_a(double xi, double eta) { return (2.0 * std::cos(xi) - 2.0) / (eta * eta); }

double compact_symbol_m(double xi) { return 5.0 / 6.0 + std::cos(xi) / 6.0; }

PeriodicCompactFd3d::PeriodicCompactFd3d(int n_per_dim) : n_(n_per_dim) {
  if (n_ < 4) throw ConfigError("periodic_compact_fd_3d: need at least 4 points per axis");
  eta_ = 2.0 * kPi / n_;
  sym_a_.resize(static_cast<std::size_t>(n_));
  sym_m_.resize(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    const double xi = 2.0 * kPi * k / n_;
    sym_a_[static_cast<std::size_t>(k)] = compact_symbol_a(xi, eta_);
    sym_m_[static_cast<std::size_t>(k)] = compact_symbol_m(xi);
  }
}

void PeriodicCompactFd3d::transform(std::span<Complex> x, int sign) const {
  const auto n = static_cast<std::size_t>(n_);
  CVector scratch(n);
  // Axis k (stride 1), axis j (stride n), axis i (stride n^2).
  for (std::size_t a = 0; a < n * n; ++a) dft_strided(x, a * n, 1, n, sign, scratch);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) dft_strided(x, i * n * n + k, n, n, sign, scratch);
  for (std::size_t b = 0; b < n * n; ++b) dft_strided(x, b, n * n, n, sign, scratch);
}

void PeriodicCompactFd3d::solve(Complex nu, std::span<const Complex> y, std::span<Complex> x) const {
  if (y.size() != dim() || x.size() != dim()) throw ConfigError("periodic_compact_fd_3d: size mismatch");
  std::copy(y.begin(), y.end(), x.begin());
  transform(x, -1);
  const auto n = static_cast<std::size_t>(n_);
  const double inv = 1.0 / static_cast<double>(dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double mi = sym_m_[i], mj = sym_m_[j], mk = sym_m_[k];
        const double a = sym_a_[i] * mj * mk + mi * sym_a_[j] * mk + mi * mj * sym_a_[k];
        const Complex denom = nu * (mi * mj * mk) - a;
        if (std::abs(denom) == 0.0)
          throw SolverError("periodic_compact_fd_3d: zero symbol denominator", nu);
        x[(i * n + j) * n + k] *= inv / denom;
      }
  transform(x, +1);
}

namespace {

// out = circulant(off, diag, off) applied along one axis with the given stride.
void apply_axis(std::span<const Complex> y, std::span<Complex> out, std::size_t n,
                std::size_t stride, double off, double diag) {
  const std::size_t total = n * n * n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t pos = (idx / stride) % n;
    const std::size_t base = idx - pos * stride;
    const std::size_t prev = base + ((pos + n - 1) % n) * stride;
    const std::size_t next = base + ((pos + 1) % n) * stride;
    out[idx] = off * (y[prev] + y[next]) + diag * y[idx];
  }
}

}  // namespace

void PeriodicCompactFd3d::apply_mass(std::span<const Complex> y, std::span<Complex> out) const {
  const auto n = static_cast<std::size_t>(n_);
  CVector t1(dim()), t2(dim());
  apply_axis(y, t1, n, 1, 1.0 / 12.0, 5.0 / 6.0);
  apply_axis(t1, t2, n, n, 1.0 / 12.0, 5.0 / 6.0);
  apply_axis(t2, out, n, n * n, 1.0 / 12.0, 5.0 / 6.0);
}

void PeriodicCompactFd3d::apply_operator(std::span<const Complex> y, std::span<Complex> out) const {
  const auto n = static_cast<std::size_t>(n_);
  const double ia = 1.0 / (eta_ * eta_);
  const std::size_t strides[3] = {n * n, n, 1};
  CVector t1(dim()), t2(dim()), t3(dim());
  std::fill(out.begin(), out.end(), Complex(0.0));
  for (int lap = 0; lap < 3; ++lap) {
    // Second difference along axis `lap`, mass along the other two.
    std::span<const Complex> src = y;
    CVector* bufs[3] = {&t1, &t2, &t3};
    for (int ax = 0; ax < 3; ++ax) {
      if (ax == lap)
        apply_axis(src, *bufs[ax], n, strides[ax], ia, -2.0 * ia);
      else
        apply_axis(src, *bufs[ax], n, strides[ax], 1.0 / 12.0, 5.0 / 6.0);
      src = *bufs[ax];
    }
    for (std::size_t i = 0; i < dim(); ++i) out[i] += t3[i];
  }
}

}  // namespace fcq
