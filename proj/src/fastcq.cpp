#include "fcq/fastcq.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "fcq/parallel.hpp"

namespace fcq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Complex ipow(Complex z, std::size_t m) {
  Complex r = 1.0;
  while (m) {
    if (m & 1U) r *= z;
    z *= z;
    m >>= 1U;
  }
  return r;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1U;
  return p;
}

// Delta(zeta)/h = U diag(d) U^{-1} and nu_i = d_i^alpha, with one radial
// perturbation of zeta when the decomposition or the power fails.
struct CircleNode {
  Complex zeta;
  EigDecomp eig;
  CVector nu;
};

CircleNode circle_node(Complex zeta, const Tableau& t, double h, double alpha) {
  for (int attempt = 0;; ++attempt) {
    try {
      CircleNode node{zeta, eig_small(delta(zeta, t) * Complex(1.0 / h)), {}};
      node.nu = power_alpha(node.eig.values, alpha);
      return node;
    } catch (const DecompositionError&) {
      if (attempt > 0) throw;
    } catch (const BranchCutError&) {
      if (attempt > 0) throw;
    }
    zeta *= 1.0 + 1e-9;
  }
}

// Dense resolvent matrix (nu M - A)^{-1}, column by column.
CMatrix resolvent_matrix(const OperatorFamily& family, Complex nu) {
  const std::size_t n = family.dim();
  CMatrix out(n, n);
  CVector e(n, 0.0), x(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    family.solve(nu, e, x);
    e[c] = 0.0;
    for (std::size_t r = 0; r < n; ++r) out(r, c) = x[r];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void CQConfig::validate(const OperatorFamily& family) const {
  if (tableau.s < 1) throw ConfigError("config: empty tableau");
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("config: h must be positive");
  if (steps < 1) throw ConfigError("config: steps must be at least 1");
  if (K < 2) throw ConfigError("config: K must be at least 2");
  if (Lambda < 2) throw ConfigError("config: Lambda must be at least 2");
  if (kappa < 1) throw ConfigError("config: kappa must be at least 1");
  if (J < kappa + 1) throw ConfigError("config: J must be at least kappa + 1");
  if (rho_circle != 0.0 && !(rho_circle > 0.0 && rho_circle < 1.0))
    throw ConfigError("config: circle radius must lie in (0, 1)");
  if (workers < 0) throw ConfigError("config: workers must be non-negative");
  const double th = resolved_theta(family);
  if (!(th > 0.0 && th < family.theta1_hint()))
    throw ConfigError("config: theta must lie in (0, theta1) with theta1 = " +
                      std::to_string(family.theta1_hint()));
}

double CQConfig::resolved_rho() const {
  return rho_circle > 0.0 ? rho_circle : std::pow(kMachineEps, 1.0 / (2.0 * J));
}

double CQConfig::resolved_theta(const OperatorFamily& family) const {
  return theta > 0.0 ? theta : kThetaFraction * family.theta1_hint();
}

bool CQConfig::use_real(const Problem& problem) const {
  const bool real_data = problem.family->is_real() && problem.forcing.real_valued;
  switch (real_mode) {
    case RealMode::Real:
      if (!real_data) throw ConfigError("config: real mode requested for complex data");
      return true;
    case RealMode::Complex:
      return false;
    case RealMode::Auto:
      break;
  }
  return real_data;
}

// ---------------------------------------------------------------------------

LevelPlan plan_levels(std::size_t N, int kappa, int Lambda) {
  if (N < 1) throw ConfigError("plan_levels: N must be at least 1");
  if (kappa < 0) throw ConfigError("plan_levels: kappa must be non-negative");
  if (Lambda < 2) throw ConfigError("plan_levels: Lambda must be at least 2");
  LevelPlan plan;
  plan.N = N;
  plan.kappa = kappa;
  plan.Lambda = Lambda;
  const auto base = static_cast<std::size_t>(kappa) + 1;
  if (N <= base) {
    plan.m = {N};
    return plan;
  }
  plan.m = {base};
  std::size_t edge = base;
  while (true) {
    if (edge > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(Lambda))
      throw ConfigError("plan_levels: level edge overflow");
    edge *= static_cast<std::size_t>(Lambda);
    if (N <= edge) {
      plan.m.push_back(N);
      break;
    }
    plan.m.push_back(edge);
  }
  plan.L = static_cast<int>(plan.m.size()) - 1;
  return plan;
}

int LevelPlan::level_of(std::size_t n) const {
  if (n < m.front()) return 0;
  for (int ell = 1; ell <= L; ++ell)
    if (n < m[static_cast<std::size_t>(ell)]) return ell;
  return -1;
}

ContourLevel config_level(const CQConfig& config, const OperatorFamily& family, int ell) {
  const ContourParams params =
      select_parameters(config.K, config.Lambda, config.resolved_theta(family), kMachineEps);
  return level_nodes(mu_level(ell, config.K, config.h, config.kappa, params), params, ell);
}

// ---------------------------------------------------------------------------

CVector first_block(const Problem& problem, const CQConfig& config, const LevelPlan& plan,
                    const StageTable& table) {
  const Tableau& tab = config.tableau;
  const auto s = static_cast<std::size_t>(tab.s);
  const std::size_t R = table.rank();
  const std::size_t dim = table.dim();
  const std::size_t nb = plan.first_block_terms();
  const auto J = static_cast<std::size_t>(config.J);
  const std::size_t N = plan.N;
  if (nb > J) throw ConfigError("first_block: more terms than circle points");
  if (table.steps() < N || table.stages() != tab.s) throw ConfigError("first_block: stage table too short");
  const double rho = config.resolved_rho();

  // fhat[(k R + r) J + j] = sum_n rho^{-n}/J f_r(t_{N-1-n} + c_k h) e^{-2 pi i n j / J}
  CVector fhat(s * R * J, 0.0);
  {
    std::vector<double> scale(nb);
    for (std::size_t n = 0; n < nb; ++n) scale[n] = std::pow(rho, -static_cast<double>(n)) / static_cast<double>(J);
    CVector seq(J);
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t r = 0; r < R; ++r) {
        std::fill(seq.begin(), seq.end(), Complex(0.0));
        for (std::size_t n = 0; n < nb; ++n) seq[n] = scale[n] * table.factor(N - 1 - n, static_cast<int>(k), r);
        const CVector f = dft(seq, -1);
        std::copy(f.begin(), f.end(), fhat.begin() + static_cast<std::ptrdiff_t>((k * R + r) * J));
      }
  }

  std::vector<CVector> parts(J);
  parallel_for(J, config.workers, [&](std::size_t j) {
    const Complex zeta = rho * std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(J));
    const CircleNode node = circle_node(zeta, tab, config.h, problem.alpha);
    CVector acc(dim, 0.0), coef(R), z(dim), x(dim);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t r = 0; r < R; ++r) {
        Complex c = 0.0;
        for (std::size_t k = 0; k < s; ++k) c += node.eig.inverse(i, k) * fhat[(k * R + r) * J + j];
        coef[r] = c;
      }
      table.combine_modes(coef, z);
      problem.family->solve(node.nu[i], z, x);
      const Complex u = node.eig.vectors(s - 1, i);
      for (std::size_t d = 0; d < dim; ++d) acc[d] += u * x[d];
    }
    parts[j] = std::move(acc);
  });

  CVector out(dim, 0.0);
  for (const auto& p : parts)
    for (std::size_t d = 0; d < dim; ++d) out[d] += p[d];
  if (config.use_real(problem))
    for (auto& v : out) v = v.real();
  return out;
}

CVector rk_march(Complex lambda, const StageTable& table, std::size_t from, std::size_t to,
                 const Tableau& tableau) {
  if (to > table.steps() || from > to) throw ConfigError("rk_march: step window outside the stage table");
  const auto s = static_cast<std::size_t>(tableau.s);
  const std::size_t R = table.rank();
  const double h = table.h();
  const Stability st = stability(h * lambda, tableau);
  CVector hq(s);
  for (std::size_t i = 0; i < s; ++i) hq[i] = h * st.q[i];
  const Complex r = st.r;
  CVector beta(R, 0.0);
  for (std::size_t n = from; n < to; ++n) {
    const auto f = table.factors(n);
    for (std::size_t m = 0; m < R; ++m) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < s; ++i) acc += hq[i] * f[i * R + m];
      beta[m] = r * beta[m] + acc;
    }
  }
  return beta;
}

CVector rk_march_stages(Complex lambda, const StageTable& table, std::size_t from, std::size_t to,
                        const Tableau& tableau) {
  if (to > table.steps() || from > to) throw ConfigError("rk_march_stages: step window outside the stage table");
  const int s = tableau.s;
  const std::size_t dim = table.dim();
  const double h = table.h();
  const Complex z = h * lambda;
  CMatrix stage = CMatrix::identity(static_cast<std::size_t>(s)) - tableau.matrix() * z;
  const LuFactor lu(stage);
  CVector y(dim, 0.0);
  std::vector<CVector> G(static_cast<std::size_t>(s));
  CVector Y(static_cast<std::size_t>(s));
  for (std::size_t n = from; n < to; ++n) {
    for (int i = 0; i < s; ++i) G[static_cast<std::size_t>(i)] = table.stage_vector(n, i);
    CVector next = y;
    for (std::size_t d = 0; d < dim; ++d) {
      // Y_i = y + h sum_j a_ij (lambda Y_j + g_j)
      for (int i = 0; i < s; ++i) {
        Complex rhs = y[d];
        for (int j = 0; j < s; ++j) rhs += h * tableau.A(i, j) * G[static_cast<std::size_t>(j)][d];
        Y[static_cast<std::size_t>(i)] = rhs;
      }
      lu.solve_in_place(Y);
      for (int i = 0; i < s; ++i)
        next[d] += h * tableau.b[static_cast<std::size_t>(i)] *
                   (lambda * Y[static_cast<std::size_t>(i)] + G[static_cast<std::size_t>(i)][d]);
    }
    y = std::move(next);
  }
  return y;
}

// ---------------------------------------------------------------------------

namespace {

struct NodeTask {
  int ell;
  int k;
  Complex lambda;
  Complex nu;
  Complex c;  // omega_k r(h lambda_k)^{m_{ell-1}}
  std::size_t from;
  std::size_t to;
};

}  // namespace

FastResult fast_solve(const Problem& problem, const CQConfig& config, const StageTable* table) {
  const auto t_start = Clock::now();
  const OperatorFamily& family = *problem.family;
  config.validate(family);
  if (problem.has_initial_value())
    throw ConfigError("fast_solve: nonzero initial value; apply transform_initial first");
  if (!(problem.alpha > 0.0 && problem.alpha < 1.0)) throw ConfigError("fast_solve: alpha must lie in (0, 1)");

  FastResult res;
  RunStats& stats = res.stats;
  const std::size_t N = config.steps;
  res.plan = plan_levels(N, config.kappa, config.Lambda);
  const LevelPlan& plan = res.plan;
  const bool real = config.use_real(problem);
  stats.real_mode = real;
  stats.levels = plan.L;
  stats.workers = resolve_workers(config.workers);
  const Tableau& tab = config.tableau;
  const std::size_t dim = family.dim();

  std::optional<StageTable> own;
  auto t0 = Clock::now();
  if (table == nullptr || !table->matches(tab, config.h, N)) {
    own.emplace(problem, tab, config.h, N, config.workers);
    table = &*own;
  }
  stats.time_table = seconds_since(t0);

  // Contour levels and per-node data, prepared sequentially.
  std::vector<NodeTask> tasks;
  if (plan.L > 0) {
    res.contour = select_parameters(config.K, config.Lambda, config.resolved_theta(family), kMachineEps);
    const CVector rk_eigs = eigenvalues_small(tab.matrix());
    for (int ell = 1; ell <= plan.L; ++ell) {
      const double mu = mu_level(ell, config.K, config.h, config.kappa, res.contour);
      for (const auto& e : rk_eigs) {
        const Complex pole = 1.0 / (e * config.h);
        if (!right_of_hyperbola(pole, mu, res.contour.phi))
          throw PoleError("fast_solve: stability-function pole inside contour of level " + std::to_string(ell),
                          pole);
      }
      const ContourLevel level = level_nodes(mu, res.contour, ell);
      const std::size_t m_prev = plan.m[static_cast<std::size_t>(ell - 1)];
      const std::size_t m_cur = plan.m[static_cast<std::size_t>(ell)];
      for (int k = real ? 0 : -config.K; k <= config.K; ++k) {
        NodeTask t;
        t.ell = ell;
        t.k = k;
        t.lambda = level.node(k);
        t.nu = power_alpha(t.lambda, problem.alpha);
        t.c = level.weight(k) * ipow(stability(config.h * t.lambda, tab).r, m_prev);
        t.from = N - m_cur;
        t.to = N - m_prev;
        tasks.push_back(t);
      }
    }
    stats.nodes_per_level = real ? config.K + 1 : 2 * config.K + 1;
  }

  t0 = Clock::now();
  CVector u = first_block(problem, config, plan, *table);
  stats.time_first_block = seconds_since(t0);
  stats.first_block_solves = static_cast<std::size_t>(tab.s) * static_cast<std::size_t>(config.J);

  t0 = Clock::now();
  std::vector<CVector> beta(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    beta[i] = rk_march(tasks[i].lambda, *table, tasks[i].from, tasks[i].to, tab);
  });
  stats.time_marches = seconds_since(t0);
  for (const auto& t : tasks) stats.rk_steps += t.to - t.from;

  t0 = Clock::now();
  std::vector<CVector> parts(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const NodeTask& t = tasks[i];
    CVector y(dim), x(dim);
    table->combine_modes(beta[i], y);
    try {
      family.solve(t.nu, y, x);
    } catch (const SolverError& e) {
      throw SolverError("level " + std::to_string(t.ell) + ", node " + std::to_string(t.k) + ": " + e.what(),
                        e.nu());
    }
    for (auto& v : x) v *= t.c;
    parts[i] = std::move(x);
  });
  stats.time_solves = seconds_since(t0);
  stats.resolvent_solves = tasks.size();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const CVector& p = parts[i];
    if (real) {
      const double f = tasks[i].k == 0 ? 1.0 : 2.0;
      for (std::size_t d = 0; d < dim; ++d) u[d] += f * p[d].real();
    } else {
      for (std::size_t d = 0; d < dim; ++d) u[d] += p[d];
    }
  }
  if (real)
    for (auto& v : u) v = v.real();
  res.u = std::move(u);
  stats.time_total = seconds_since(t_start);
  return res;
}

// ---------------------------------------------------------------------------

std::vector<CVector> direct_cq(const Problem& problem, const Tableau& tab, double h, std::size_t N,
                               DirectOptions options, int workers) {
  if (N < 1) throw ConfigError("direct_cq: N must be at least 1");
  if (!(h > 0.0)) throw ConfigError("direct_cq: h must be positive");
  if (!(problem.alpha > 0.0 && problem.alpha <= 1.0)) throw ConfigError("direct_cq: alpha must lie in (0, 1]");
  if (problem.has_initial_value())
    throw ConfigError("direct_cq: nonzero initial value; apply transform_initial first");
  const std::size_t J = options.J ? options.J : next_pow2(std::max<std::size_t>(4 * N, 256));
  if (J < N + 1) throw ConfigError("direct_cq: need at least N + 1 circle points");
  const double rho = options.rho > 0.0 ? options.rho : std::pow(kMachineEps, 0.5 / static_cast<double>(J));
  const StageTable table(problem, tab, h, N, workers);
  const auto s = static_cast<std::size_t>(tab.s);
  const std::size_t R = table.rank();
  const std::size_t dim = table.dim();

  // ghat[(k R + r) J + j] = sum_m f_r(t_m + c_k h) zeta_j^m
  CVector ghat(s * R * J);
  parallel_for(s * R, workers, [&](std::size_t kr) {
    const std::size_t k = kr / R, r = kr % R;
    CVector seq(J, 0.0);
    double p = 1.0;
    for (std::size_t m = 0; m < N; ++m, p *= rho) seq[m] = p * table.factor(m, static_cast<int>(k), r);
    const CVector f = dft(seq, +1);
    std::copy(f.begin(), f.end(), ghat.begin() + static_cast<std::ptrdiff_t>(kr * J));
  });

  // Generating function of the trajectory at each circle point.
  CVector values(J * dim);
  parallel_for(J, workers, [&](std::size_t j) {
    const Complex zeta = rho * std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(J));
    const CircleNode node = circle_node(zeta, tab, h, problem.alpha);
    CVector coef(R), z(dim), x(dim), acc(dim, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t r = 0; r < R; ++r) {
        Complex c = 0.0;
        for (std::size_t k = 0; k < s; ++k) c += node.eig.inverse(i, k) * ghat[(k * R + r) * J + j];
        coef[r] = c;
      }
      table.combine_modes(coef, z);
      problem.family->solve(node.nu[i], z, x);
      const Complex u = node.eig.vectors(s - 1, i);
      for (std::size_t d = 0; d < dim; ++d) acc[d] += u * x[d];
    }
    for (std::size_t d = 0; d < dim; ++d) values[j * dim + d] = node.zeta * acc[d];
  });

  // Coefficient extraction u_m = rho^{-m}/J sum_j U(zeta_j) e^{-2 pi i m j / J}.
  std::vector<CVector> traj(N + 1, CVector(dim));
  parallel_for(dim, workers, [&](std::size_t d) {
    CVector col(J);
    for (std::size_t j = 0; j < J; ++j) col[j] = values[j * dim + d];
    const CVector f = dft(col, -1);
    for (std::size_t m = 0; m <= N; ++m)
      traj[m][d] = f[m] * std::pow(rho, -static_cast<double>(m)) / static_cast<double>(J);
  });
  return traj;
}

std::vector<CVector> direct_cq(const Problem& problem, const CQConfig& config, DirectOptions options) {
  return direct_cq(problem, config.tableau, config.h, config.steps, options, config.workers);
}

std::vector<CMatrix> direct_weights(const OperatorFamily& family, double alpha, const Tableau& tab, double h,
                                    std::size_t count, DirectOptions options) {
  if (count < 1) throw ConfigError("direct_weights: count must be at least 1");
  const std::size_t J = options.J ? options.J : next_pow2(std::max<std::size_t>(4 * count, 256));
  if (J < count) throw ConfigError("direct_weights: need at least count circle points");
  const double rho = options.rho > 0.0 ? options.rho : std::pow(kMachineEps, 0.5 / static_cast<double>(J));
  const auto s = static_cast<std::size_t>(tab.s);
  const std::size_t dim = family.dim();
  const std::size_t n = s * dim;

  // values[(row n + col) J + j] = K(Delta(zeta_j)/h) entries
  CVector values(n * n * J);
  parallel_for(J, 0, [&](std::size_t j) {
    const Complex zeta = rho * std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(J));
    const CircleNode node = circle_node(zeta, tab, h, alpha);
    std::vector<CMatrix> S;
    for (std::size_t i = 0; i < s; ++i) S.push_back(resolvent_matrix(family, node.nu[i]));
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t kc = 0; kc < s; ++kc) {
        CVector w(s);
        for (std::size_t i = 0; i < s; ++i) w[i] = node.eig.vectors(k, i) * node.eig.inverse(i, kc);
        for (std::size_t d = 0; d < dim; ++d)
          for (std::size_t dc = 0; dc < dim; ++dc) {
            Complex v = 0.0;
            for (std::size_t i = 0; i < s; ++i) v += w[i] * S[i](d, dc);
            values[((k * dim + d) * n + kc * dim + dc) * J + j] = v;
          }
      }
  });

  std::vector<CMatrix> W(count, CMatrix(n, n));
  for (std::size_t e = 0; e < n * n; ++e) {
    const CVector f = dft(std::span<const Complex>(values).subspan(e * J, J), -1);
    for (std::size_t m = 0; m < count; ++m)
      W[m].data()[e] = f[m] * std::pow(rho, -static_cast<double>(m)) / (static_cast<double>(J) * h);
  }
  return W;
}

CMatrix last_row_block(const CMatrix& W, int s) {
  const std::size_t dim = W.rows() / static_cast<std::size_t>(s);
  CMatrix out(dim, W.cols());
  for (std::size_t d = 0; d < dim; ++d)
    for (std::size_t c = 0; c < W.cols(); ++c) out(d, c) = W((static_cast<std::size_t>(s) - 1) * dim + d, c);
  return out;
}

CMatrix contour_weight(const OperatorFamily& family, double alpha, const Tableau& tab, double h, std::size_t n,
                       const ContourLevel& level) {
  const auto s = static_cast<std::size_t>(tab.s);
  const std::size_t dim = family.dim();
  CMatrix out(dim, s * dim);
  for (int k = -level.K; k <= level.K; ++k) {
    const Complex lambda = level.node(k);
    const Stability st = stability(h * lambda, tab);
    const CMatrix S = resolvent_matrix(family, power_alpha(lambda, alpha));
    const Complex f = level.weight(k) * ipow(st.r, n);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t d = 0; d < dim; ++d)
        for (std::size_t dc = 0; dc < dim; ++dc) out(d, i * dim + dc) += f * st.q[i] * S(d, dc);
  }
  return out;
}

// ---------------------------------------------------------------------------

CVector TransformedProblem::reconstruct(const CVector& w) const {
  if (u0.empty()) return w;
  CVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] + u0[i];
  return out;
}

TransformedProblem transform_initial(const Problem& problem) {
  TransformedProblem tp;
  tp.problem = problem;
  if (!problem.has_initial_value()) {
    tp.problem.u0.clear();
    return tp;
  }
  if (problem.u0.size() != problem.dim()) throw ConfigError("transform_initial: initial value size mismatch");
  problem.family->check_initial_support(problem.u0);
  tp.problem.forcing = problem.forcing.plus_constant(problem.family->op(problem.u0));
  tp.problem.u0.clear();
  tp.u0 = problem.u0;
  if (tp.problem.u_exact) {
    auto exact = problem.u_exact;
    CVector u0 = problem.u0;
    tp.problem.u_exact = [exact, u0](double t) {
      CVector w = exact(t);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= u0[i];
      return w;
    };
  }
  return tp;
}

}  // namespace fcq
