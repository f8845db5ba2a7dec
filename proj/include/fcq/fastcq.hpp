#pragma once

// Runge-Kutta convolution quadrature for M D^alpha u = A u + g, u(0) = 0:
//   u_N = sum_{n=0}^{N-1} (e_s^T x Id) h W_n G_{N-1-n},
//   sum_n h W_n zeta^n = ((Delta(zeta)/h)^alpha x M - Id x A)^{-1}.
// The first kappa+1 terms come from a circle rule in zeta, the rest from
// hyperbolic contours on geometrically growing intervals.

#include <optional>
#include <string>
#include <vector>

#include "fcq/contour.hpp"
#include "fcq/problem.hpp"
#include "fcq/tableau.hpp"

namespace fcq {

enum class RealMode { Auto, Real, Complex };

struct CQConfig {
  Tableau tableau = radau_iia(3);
  double h = 0.1;
  std::size_t steps = 100;  // N
  int K = 25;
  int Lambda = kDefaultLambda;
  int kappa = 20;
  int J = 160;
  double rho_circle = 0.0;  // 0: eps^(1/(2J))
  double theta = 0.0;       // 0: kThetaFraction * theta1 of the family
  RealMode real_mode = RealMode::Auto;
  int workers = 0;          // 0: all available threads

  void validate(const OperatorFamily& family) const;
  double resolved_rho() const;
  double resolved_theta(const OperatorFamily& family) const;
  /// Real-reduced path in use for this problem.
  bool use_real(const Problem& problem) const;
};

inline constexpr double kThetaFraction = 0.95;

struct LevelPlan {
  std::size_t N = 0;
  int kappa = 0;
  int Lambda = kDefaultLambda;
  int L = 0;
  std::vector<std::size_t> m;  // m_0 .. m_L

  /// Number of weights handled by the circle rule.
  std::size_t first_block_terms() const { return m.front(); }
  /// Level containing weight index n (n >= m_0), 0 for the first block.
  int level_of(std::size_t n) const;
};

LevelPlan plan_levels(std::size_t N, int kappa, int Lambda);

struct RunStats {
  std::size_t rk_steps = 0;
  std::size_t resolvent_solves = 0;
  std::size_t first_block_solves = 0;
  int levels = 0;
  int nodes_per_level = 0;
  bool real_mode = false;
  int workers = 1;
  double time_table = 0.0;
  double time_first_block = 0.0;
  double time_marches = 0.0;
  double time_solves = 0.0;
  double time_total = 0.0;
};

struct FastResult {
  CVector u;
  RunStats stats;
  LevelPlan plan;
  ContourParams contour;
};

/// Fast algorithm. The problem must have zero initial data (see transform_initial).
/// A prebuilt stage table with matching tableau and h may be passed.
FastResult fast_solve(const Problem& problem, const CQConfig& config, const StageTable* table = nullptr);

/// Contribution of the weights 0 .. plan.first_block_terms()-1 to u_N.
CVector first_block(const Problem& problem, const CQConfig& config, const LevelPlan& plan,
                    const StageTable& table);

/// y = h sum_{n=from}^{to-1} r(h lambda)^(to-1-n) q(h lambda) G_n, i.e. the
/// Runge-Kutta solution of y' = lambda y + g started from zero at step `from`.
/// Returned as mode coefficients (see StageTable::combine_modes).
CVector rk_march(Complex lambda, const StageTable& table, std::size_t from, std::size_t to,
                 const Tableau& tableau);

/// Same march carried out on full stage vectors with the stage system
/// (Id - h lambda A) solved every step; used to cross-check rk_march.
CVector rk_march_stages(Complex lambda, const StageTable& table, std::size_t from, std::size_t to,
                        const Tableau& tableau);

struct DirectOptions {
  std::size_t J = 0;   // 0: next power of two >= max(4 N, 256)
  double rho = 0.0;    // 0: rho^J = sqrt(eps)
};

/// Oracle: all of u_0 .. u_N from the generating function, evaluated on a
/// circle of J points and inverted by FFT. Supports alpha in (0, 1].
std::vector<CVector> direct_cq(const Problem& problem, const Tableau& tableau, double h, std::size_t N,
                               DirectOptions options = {}, int workers = 0);
std::vector<CVector> direct_cq(const Problem& problem, const CQConfig& config, DirectOptions options = {});

/// Convolution weights W_0 .. W_{count-1} (each s*dim square) from the
/// generating function. Dense families only in practice.
std::vector<CMatrix> direct_weights(const OperatorFamily& family, double alpha, const Tableau& tableau, double h,
                                    std::size_t count, DirectOptions options = {});

/// Last block row w_n = (e_s^T x Id) W_n, a dim x (s*dim) matrix.
CMatrix last_row_block(const CMatrix& W, int s);

/// Hyperbola approximation of w_n on the given level.
CMatrix contour_weight(const OperatorFamily& family, double alpha, const Tableau& tableau, double h,
                       std::size_t n, const ContourLevel& level);

/// Contour parameters and nodes of level ell for a configuration.
ContourLevel config_level(const CQConfig& config, const OperatorFamily& family, int ell);

/// Zero-initial-value form of a problem: w = u - u0 solves the same equation
/// with g replaced by g + A u0.
struct TransformedProblem {
  Problem problem;
  CVector u0;
  CVector reconstruct(const CVector& w) const;
};

TransformedProblem transform_initial(const Problem& problem);

}  // namespace fcq
