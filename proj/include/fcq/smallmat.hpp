#pragma once

// Dense complex linear algebra for the small systems that appear in
// Runge-Kutta convolution quadrature, plus the discrete Fourier transform.

#include <span>

#include "fcq/types.hpp"

namespace fcq {

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols, Complex fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  CMatrix operator*(const CMatrix& rhs) const;
  CMatrix operator-(const CMatrix& rhs) const;
  CMatrix operator+(const CMatrix& rhs) const;
  CMatrix operator*(Complex scale) const;
  CVector operator*(std::span<const Complex> x) const;

  CMatrix transpose() const;
  double max_norm() const;   ///< max |a_ij|
  double inf_norm() const;   ///< max row sum

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVector data_;
};

/// LU factorization with partial pivoting, reusable for many right-hand sides.
class LuFactor {
 public:
  explicit LuFactor(CMatrix a);

  std::size_t size() const { return lu_.rows(); }
  void solve_in_place(std::span<Complex> x) const;
  /// Solves A^T x = y.
  void solve_transposed_in_place(std::span<Complex> x) const;
  Complex determinant() const;

 private:
  CMatrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

/// X = A^{-1} Y for square A and any number of right-hand-side columns.
CMatrix lu_solve(const CMatrix& a, const CMatrix& y);
CMatrix inverse(const CMatrix& a);

/// Eigendecomposition A = U diag(d) U^{-1} of an s x s matrix, s <= 3.
struct EigDecomp {
  CMatrix vectors;   // U, columns are unit right eigenvectors
  CVector values;    // d
  CMatrix inverse;   // U^{-1}
  double condition = 1.0;       // ||U||_inf ||U^{-1}||_inf
  bool ill_conditioned = false;  // condition > 1e8
};

inline constexpr double kEigConditionFlag = 1e8;
inline constexpr double kEigGapTolerance = 1e-8;

/// Roots of the characteristic polynomial (closed form plus Newton polish).
CVector eigenvalues_small(const CMatrix& a);

EigDecomp eig_small(const CMatrix& a);

/// Principal-branch d_i^alpha; alpha in (0, 1].
CVector power_alpha(std::span<const Complex> d, double alpha);
Complex power_alpha(Complex d, double alpha);

/// X_j = sum_n x_n exp(sign 2 pi i n j / J). Radix-2 for powers of two,
/// direct evaluation otherwise.
CVector dft(std::span<const Complex> x, int sign);

/// In-place radix-2 transform; size must be a power of two.
void fft_pow2(std::span<Complex> x, int sign);

/// Strided transform used for multi-dimensional arrays: transforms the n
/// entries x[offset + k*stride]. Uses `scratch` (size >= n) as work space.
void dft_strided(std::span<Complex> x, std::size_t offset, std::size_t stride,
                 std::size_t n, int sign, std::span<Complex> scratch);

}  // namespace fcq
