#include "fcq/smallmat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fcq {

double max_abs(const CVector& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ConfigError("CMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw ConfigError("CMatrix: shape mismatch in product");
  CMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ConfigError("CMatrix: shape mismatch");
  CMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

CMatrix CMatrix::operator+(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ConfigError("CMatrix: shape mismatch");
  CMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

CMatrix CMatrix::operator*(Complex scale) const {
  CMatrix out = *this;
  for (auto& x : out.data_) x *= scale;
  return out;
}

CVector CMatrix::operator*(std::span<const Complex> x) const {
  if (x.size() != cols_) throw ConfigError("CMatrix: shape mismatch in matvec");
  CVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double CMatrix::max_norm() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

double CMatrix::inf_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kZeroPivot = 1e-30;
}

LuFactor::LuFactor(CMatrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw ConfigError("LuFactor: matrix must be square");
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < kZeroPivot) throw SolverError("LuFactor: zero pivot", Complex(best, 0.0));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const Complex pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

void LuFactor::solve_in_place(std::span<Complex> x) const {
  const std::size_t n = lu_.rows();
  if (x.size() != n) throw ConfigError("LuFactor: rhs size mismatch");
  CVector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = y[i];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
    y[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex acc = y[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(i, j) * y[j];
    y[i] = acc / lu_(i, i);
  }
  std::copy(y.begin(), y.end(), x.begin());
}

void LuFactor::solve_transposed_in_place(std::span<Complex> x) const {
  // P A = L U  =>  A^T = U^T L^T P, so solve U^T z = x, L^T w = z, x = P^T w.
  const std::size_t n = lu_.rows();
  if (x.size() != n) throw ConfigError("LuFactor: rhs size mismatch");
  CVector z(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = z[i];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(j, i) * z[j];
    z[i] = acc / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex acc = z[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(j, i) * z[j];
    z[i] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
}

Complex LuFactor::determinant() const {
  Complex det = static_cast<double>(sign_);
  for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

CMatrix lu_solve(const CMatrix& a, const CMatrix& y) {
  if (y.rows() != a.rows()) throw ConfigError("lu_solve: rhs rows mismatch");
  const LuFactor lu(a);
  CMatrix x(y.rows(), y.cols());
  CVector col(y.rows());
  for (std::size_t j = 0; j < y.cols(); ++j) {
    for (std::size_t i = 0; i < y.rows(); ++i) col[i] = y(i, j);
    lu.solve_in_place(col);
    for (std::size_t i = 0; i < y.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

CMatrix inverse(const CMatrix& a) { return lu_solve(a, CMatrix::identity(a.rows())); }

// ---------------------------------------------------------------------------

namespace {

// Characteristic polynomial lambda^s + c[s-1] lambda^{s-1} + ... + c[0].
CVector char_poly(const CMatrix& a) {
  const std::size_t s = a.rows();
  if (s == 1) return {-a(0, 0)};
  if (s == 2) {
    const Complex tr = a(0, 0) + a(1, 1);
    const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return {det, -tr};
  }
  const Complex tr = a(0, 0) + a(1, 1) + a(2, 2);
  const Complex minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                         a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const Complex det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                      a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                      a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  return {-det, minors, -tr};
}

Complex newton_polish(const CVector& c, Complex x) {
  const std::size_t s = c.size();
  for (int it = 0; it < 2; ++it) {
    Complex p = 1.0, dp = 0.0;
    for (std::size_t k = s; k-- > 0;) {
      dp = dp * x + p;
      p = p * x + c[k];
    }
    if (std::abs(dp) < 1e-300) break;
    const Complex step = p / dp;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    x -= step;
  }
  return x;
}

}  // namespace

CVector eigenvalues_small(const CMatrix& a) {
  const std::size_t s = a.rows();
  if (s == 0 || s > 3 || a.cols() != s)
    throw ConfigError("eigenvalues_small: matrix must be square with s <= 3");
  const CVector c = char_poly(a);
  CVector roots;
  if (s == 1) {
    roots = {-c[0]};
  } else if (s == 2) {
    const Complex half_b = 0.5 * c[1];
    const Complex disc = std::sqrt(half_b * half_b - c[0]);
    // Pick the larger-magnitude root first to avoid cancellation.
    Complex r1 = -half_b + disc;
    if (std::abs(-half_b - disc) > std::abs(r1)) r1 = -half_b - disc;
    const Complex r2 = (r1 != 0.0) ? c[0] / r1 : -half_b;
    roots = {r1, r2};
  } else {
    const Complex a2 = c[2], a1 = c[1], a0 = c[0];
    const Complex shift = a2 / 3.0;
    const Complex p = a1 - a2 * a2 / 3.0;
    const Complex q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    Complex u3 = -q / 2.0 + disc;
    if (std::abs(-q / 2.0 - disc) > std::abs(u3)) u3 = -q / 2.0 - disc;
    const Complex omega(-0.5, std::sqrt(3.0) / 2.0);
    if (std::abs(u3) == 0.0) {
      roots = {-shift, -shift, -shift};
    } else {
      Complex u = std::pow(u3, 1.0 / 3.0);
      for (int k = 0; k < 3; ++k) {
        roots.push_back(u - p / (3.0 * u) - shift);
        u *= omega;
      }
    }
  }
  for (auto& r : roots) r = newton_polish(c, r);
  return roots;
}

namespace {

// Unit vector spanning the null space of the (numerically) rank s-1 matrix b,
// via Gaussian elimination with complete pivoting.
CVector null_vector(CMatrix b) {
  const std::size_t s = b.rows();
  if (s == 1) return {1.0};
  std::vector<std::size_t> col(s);
  for (std::size_t j = 0; j < s; ++j) col[j] = j;
  for (std::size_t k = 0; k + 1 < s; ++k) {
    std::size_t pi = k, pj = k;
    double best = -1.0;
    for (std::size_t i = k; i < s; ++i)
      for (std::size_t j = k; j < s; ++j) {
        const double v = std::abs(b(i, j));
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best == 0.0) break;
    for (std::size_t j = 0; j < s; ++j) std::swap(b(k, j), b(pi, j));
    for (std::size_t i = 0; i < s; ++i) std::swap(b(i, k), b(i, pj));
    std::swap(col[k], col[pj]);
    for (std::size_t i = k + 1; i < s; ++i) {
      const Complex f = b(i, k) / b(k, k);
      for (std::size_t j = k; j < s; ++j) b(i, j) -= f * b(k, j);
    }
  }
  // Free variable: last permuted column.
  CVector z(s);
  z[s - 1] = 1.0;
  for (std::size_t i = s - 1; i-- > 0;) {
    Complex acc = 0.0;
    for (std::size_t j = i + 1; j < s; ++j) acc += b(i, j) * z[j];
    z[i] = (b(i, i) != 0.0) ? -acc / b(i, i) : 0.0;
  }
  CVector v(s);
  double norm = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    v[col[j]] = z[j];
    norm += std::norm(z[j]);
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace

EigDecomp eig_small(const CMatrix& a) {
  const std::size_t s = a.rows();
  EigDecomp out;
  out.values = eigenvalues_small(a);
  const double scale = std::max(a.max_norm(), 1e-300);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      if (std::abs(out.values[i] - out.values[j]) < kEigGapTolerance * scale)
        throw DecompositionError(
            "eig_small: nearly defective matrix (eigenvalue gap below 1e-8 scale); "
            "perturb the input and retry");

  out.vectors = CMatrix(s, s);
  for (std::size_t k = 0; k < s; ++k) {
    CMatrix b = a;
    for (std::size_t i = 0; i < s; ++i) b(i, i) -= out.values[k];
    const CVector v = null_vector(std::move(b));
    for (std::size_t i = 0; i < s; ++i) out.vectors(i, k) = v[i];
  }
  try {
    out.inverse = inverse(out.vectors);
  } catch (const SolverError&) {
    throw DecompositionError("eig_small: eigenvector matrix is singular");
  }
  out.condition = out.vectors.inf_norm() * out.inverse.inf_norm();
  out.ill_conditioned = out.condition > kEigConditionFlag;
  return out;
}

// ---------------------------------------------------------------------------

Complex power_alpha(Complex d, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("power_alpha: alpha must lie in (0, 1]");
  if (d.imag() == 0.0 && d.real() <= 0.0)
    throw BranchCutError("power_alpha: argument on the closed negative real axis", d);
  if (alpha == 1.0) return d;
  return std::exp(alpha * Complex(std::log(std::abs(d)), std::arg(d)));
}

CVector power_alpha(std::span<const Complex> d, double alpha) {
  CVector out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = power_alpha(d[i], alpha);
  return out;
}

void fft_pow2(std::span<Complex> x, int sign) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  if (!std::has_single_bit(n)) throw ConfigError("fft_pow2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  // Twiddles from direct evaluation, not recurrence, to keep round-off flat.
  CVector w(n / 2);
  const double ang = sign * 2.0 * kPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n / 2; ++k) w[k] = std::polar(1.0, ang * static_cast<double>(k));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = x[i + k];
        const Complex v = x[i + k + half] * w[k * step];
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
  }
}

CVector dft(std::span<const Complex> x, int sign) {
  const std::size_t n = x.size();
  CVector out(x.begin(), x.end());
  if (n == 0) throw ConfigError("dft: empty input");
  if (std::has_single_bit(n)) {
    fft_pow2(out, sign);
    return out;
  }
  CVector tw(n);
  for (std::size_t k = 0; k < n; ++k)
    tw[k] = std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Complex acc = 0.0;
    std::size_t idx = 0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += x[m] * tw[idx];
      idx += j;
      if (idx >= n) idx -= n;
    }
    out[j] = acc;
  }
  return out;
}

void dft_strided(std::span<Complex> x, std::size_t offset, std::size_t stride, std::size_t n,
                 int sign, std::span<Complex> scratch) {
  for (std::size_t k = 0; k < n; ++k) scratch[k] = x[offset + k * stride];
  if (std::has_single_bit(n)) {
    fft_pow2(scratch.first(n), sign);
  } else {
    const CVector t = dft(scratch.first(n), sign);
    std::copy(t.begin(), t.end(), scratch.begin());
  }
  for (std::size_t k = 0; k < n; ++k) x[offset + k * stride] = scratch[k];
}

}  // namespace fcq
