#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcq {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (bad stage count, step count, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical procedure (singular system, breakdown, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A rational function was evaluated at (or next to) one of its poles.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, Complex where)
      : NumericalError(what), where_(where) {}
  Complex where() const { return where_; }

 private:
  Complex where_;
};

/// Eigendecomposition failed (defective or nearly defective matrix).
class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fractional power requested on the branch cut (-inf, 0].
class BranchCutError : public NumericalError {
 public:
  BranchCutError(const std::string& what, Complex where)
      : NumericalError(what), where_(where) {}
  Complex where() const { return where_; }

 private:
  Complex where_;
};

/// Resolvent solve failed at frequency nu.
class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, Complex nu)
      : NumericalError(what), nu_(nu) {}
  Complex nu() const { return nu_; }

 private:
  Complex nu_;
};

/// Quadrature did not reach the requested tolerance.
class AccuracyError : public NumericalError {
 public:
  AccuracyError(const std::string& what, double achieved)
      : NumericalError(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Initial value reaches the artificial boundary.
class SupportError : public Error {
 public:
  using Error::Error;
};

double max_abs(const CVector& v);

}  // namespace fcq
