#include "fcq/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "fcq/caputo.hpp"
#include "fcq/operators.hpp"
#include "fcq/parallel.hpp"

namespace fcq {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_diff(const CVector& a, const CVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::size_t steps_for(double t, double h, const char* who) {
  if (!(h > 0.0)) throw ConfigError(std::string(who) + ": h must be positive");
  const double n = std::round(t / h);
  if (n < 1.0 || std::abs(n * h - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw ConfigError(std::string(who) + ": t = " + fmt17(t) + " is not a multiple of h = " + fmt17(h));
  return static_cast<std::size_t>(n);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json header(const char* name) { return json{{"schema", std::string("fcq.") + name}, {"version", 1}}; }

void csv_header(std::ostream& os, const char* name) { os << "# fcq." << name << " v1\n"; }

json stats_json(const RunStats& s) {
  return json{{"rk_steps", s.rk_steps},
              {"resolvent_solves", s.resolvent_solves},
              {"first_block_solves", s.first_block_solves},
              {"levels", s.levels},
              {"nodes_per_level", s.nodes_per_level},
              {"real_mode", s.real_mode},
              {"workers", s.workers}};
}

json phases_json(const PhaseTimes& p) {
  return json{{"table", p.table},
              {"first_block", p.first_block},
              {"rk_marches", p.marches},
              {"resolvent_solves", p.solves},
              {"total", p.total}};
}

// Non-finite values become null in JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: non-positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

std::vector<std::size_t> pre_saturation_points(const std::vector<double>& err, double floor_factor,
                                               std::size_t keep) {
  if (err.empty()) return {};
  const double floor = *std::min_element(err.begin(), err.end());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < err.size(); ++i)
    if (err[i] > floor_factor * floor) idx.push_back(i);
  if (idx.size() > keep) idx.erase(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(keep));
  return idx;
}

// ---------------------------------------------------------------------------
// convergence

ConvergenceReport run_convergence(const ConvergenceOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.ladder.empty()) throw ConfigError("convergence: empty ladder");
  if (opt.Ks.empty()) throw ConfigError("convergence: no K values");
  std::vector<Tableau> tabs;
  for (const auto& m : opt.methods) tabs.push_back(tableau_by_name(m));
  for (std::size_t N : opt.ladder)
    if (N < 1) throw ConfigError("convergence: ladder entries must be positive");

  // Every K and method shares the configuration checks up front.
  const ManufacturedProblem mp = example1_problem(opt.oracle_tol);
  for (int K : opt.Ks) {
    CQConfig c;
    c.K = K;
    c.kappa = opt.kappa;
    c.J = opt.J;
    c.Lambda = opt.Lambda;
    c.theta = opt.theta;
    c.h = opt.t_end / static_cast<double>(opt.ladder.front());
    c.validate(*mp.problem.family);
  }
  const CVector exact = mp.problem.u_exact(opt.t_end);

  ConvergenceReport rep;
  // rows[(method, K)] in ladder order
  std::map<std::pair<std::size_t, int>, std::vector<ConvergenceRow>> series;
  for (std::size_t mi = 0; mi < tabs.size(); ++mi) {
    const Tableau& tab = tabs[mi];
    for (std::size_t N : opt.ladder) {
      const double h = opt.t_end / static_cast<double>(N);
      if (std::abs(static_cast<double>(N) * h - opt.t_end) > 1e-12 * opt.t_end)
        throw ConfigError("convergence: N h differs from t_end");
      const StageTable table(mp.problem, tab, h, N, opt.workers);
      for (int K : opt.Ks) {
        CQConfig c;
        c.tableau = tab;
        c.h = h;
        c.steps = N;
        c.K = K;
        c.kappa = opt.kappa;
        c.J = opt.J;
        c.Lambda = opt.Lambda;
        c.theta = opt.theta;
        c.real_mode = opt.real_mode;
        c.workers = opt.workers;
        const FastResult res = fast_solve(mp.problem, c, &table);
        ConvergenceRow row;
        row.method = opt.methods[mi];
        row.s = tab.s;
        row.h = h;
        row.N = N;
        row.K = K;
        row.error = max_diff(res.u, exact);
        row.direct_only = res.plan.L == 0;
        series[{mi, K}].push_back(row);
      }
    }
  }

  for (auto& [key, rows] : series) {
    std::vector<double> hs, es;
    for (auto& r : rows) {
      hs.push_back(r.h);
      es.push_back(r.error);
      bool ok = hs.size() >= 2;
      for (double e : es) ok = ok && e > 0.0;
      r.slope_so_far = ok ? loglog_slope(hs, es) : kNaN;
      rep.rows.push_back(r);
    }
    ConvergenceFit fit;
    fit.method = opt.methods[key.first];
    fit.K = key.second;
    fit.min_error = *std::min_element(es.begin(), es.end());
    fit.used = pre_saturation_points(es);
    std::vector<double> fh, fe;
    for (std::size_t i : fit.used) {
      fh.push_back(hs[i]);
      fe.push_back(es[i]);
    }
    fit.slope = fit.used.size() >= 2 ? loglog_slope(fh, fe) : kNaN;
    rep.fits.push_back(fit);
  }
  rep.seconds = since(t0);
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  csv_header(os, "convergence");
  os << "method,s,h,N,K,error_inf,fitted_slope_so_far,direct_only\n";
  for (const auto& r : rep.rows)
    os << r.method << ',' << r.s << ',' << fmt17(r.h) << ',' << r.N << ',' << r.K << ',' << fmt17(r.error) << ','
       << fmt17(r.slope_so_far) << ',' << (r.direct_only ? 1 : 0) << '\n';
}

void write_convergence_json(std::ostream& os, const ConvergenceReport& rep) {
  json j = header("convergence");
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"method", r.method},
                    {"s", r.s},
                    {"h", r.h},
                    {"N", r.N},
                    {"K", r.K},
                    {"error_inf", r.error},
                    {"fitted_slope_so_far", num(r.slope_so_far)},
                    {"direct_only", r.direct_only}});
  json fits = json::array();
  for (const auto& f : rep.fits)
    fits.push_back({{"method", f.method}, {"K", f.K}, {"slope", num(f.slope)}, {"min_error", f.min_error},
                    {"points", f.used}});
  j["rows"] = rows;
  j["fits"] = fits;
  j["seconds"] = rep.seconds;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// subdiffusion timing

namespace {

PhaseTimes phases_of(const RunStats& s) {
  return {s.time_table, s.time_first_block, s.time_marches, s.time_solves, s.time_total};
}

SubdiffusionRun timed_runs(const Problem& problem, const CQConfig& config, const StageTable& table,
                           double table_seconds, int repeats, const CVector& exact) {
  SubdiffusionRun run;
  run.N = config.steps;
  run.workers = config.workers;
  for (int r = 0; r < repeats; ++r) {
    const FastResult res = fast_solve(problem, config, &table);
    PhaseTimes p = phases_of(res.stats);
    p.table = table_seconds;
    run.repeats.push_back(p);
    run.stats = res.stats;
    run.error = max_diff(res.u, exact);
  }
  auto pick = [&](double PhaseTimes::*f) {
    std::vector<double> v;
    for (const auto& p : run.repeats) v.push_back(p.*f);
    return v;
  };
  run.median.table = table_seconds;
  run.median.first_block = median(pick(&PhaseTimes::first_block));
  run.median.marches = median(pick(&PhaseTimes::marches));
  run.median.solves = median(pick(&PhaseTimes::solves));
  run.median.total = median(pick(&PhaseTimes::total));
  for (auto f : {&PhaseTimes::first_block, &PhaseTimes::marches, &PhaseTimes::solves}) {
    const auto v = pick(f);
    const double med = median(v);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (med > 0.0 && (*hi - *lo) > 0.5 * med) run.variance_flag = true;
  }
  return run;
}

}  // namespace

SubdiffusionReport run_subdiffusion(const SubdiffusionOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.ladder.empty()) throw ConfigError("subdiffusion: empty N ladder");
  if (opt.worker_ladder.empty()) throw ConfigError("subdiffusion: empty worker ladder");
  if (opt.repeats < 1) throw ConfigError("subdiffusion: repeats must be at least 1");
  for (int w : opt.worker_ladder)
    if (w < 1) throw ConfigError("subdiffusion: worker counts must be positive");
  const Tableau tab = tableau_by_name(opt.method);
  const ManufacturedProblem mp = example2_problem(opt.grid, opt.t_end, opt.oracle_tol);
  const Problem& problem = mp.problem;
  const CVector exact = problem.u_exact(opt.t_end);
  const std::size_t worker_N = opt.worker_steps ? opt.worker_steps : *std::max_element(opt.ladder.begin(), opt.ladder.end());
  const int ladder_workers = resolve_workers(opt.workers);

  auto make_config = [&](std::size_t N, int workers) {
    CQConfig c;
    c.tableau = tab;
    c.h = opt.t_end / static_cast<double>(N);
    c.steps = N;
    c.K = opt.K;
    c.kappa = opt.kappa;
    c.J = opt.J;
    c.Lambda = opt.Lambda;
    c.theta = opt.theta;
    c.real_mode = opt.real_mode;
    c.workers = workers;
    c.validate(*problem.family);
    return c;
  };
  for (std::size_t N : opt.ladder) make_config(N, 1);
  make_config(worker_N, 1);

  SubdiffusionReport rep;
  rep.options = opt;
  std::optional<StageTable> worker_table;
  double worker_table_seconds = 0.0;
  for (std::size_t N : opt.ladder) {
    const CQConfig c = make_config(N, ladder_workers);
    auto tt = Clock::now();
    StageTable table(problem, tab, c.h, N, ladder_workers);
    const double table_seconds = since(tt);
    rep.n_ladder.push_back(timed_runs(problem, c, table, table_seconds, opt.repeats, exact));
    if (N == worker_N && !worker_table) {
      worker_table.emplace(std::move(table));
      worker_table_seconds = table_seconds;
    }
  }
  if (!worker_table) {
    const auto tt = Clock::now();
    worker_table.emplace(problem, tab, opt.t_end / static_cast<double>(worker_N), worker_N, ladder_workers);
    worker_table_seconds = since(tt);
  }
  for (int w : opt.worker_ladder)
    rep.worker_ladder.push_back(
        timed_runs(problem, make_config(worker_N, w), *worker_table, worker_table_seconds, opt.repeats, exact));

  std::vector<double> Ns, marches, solves, firsts;
  for (const auto& r : rep.n_ladder) {
    Ns.push_back(static_cast<double>(r.N));
    marches.push_back(r.median.marches);
    solves.push_back(r.median.solves);
    firsts.push_back(r.median.first_block);
  }
  const bool positive = std::all_of(marches.begin(), marches.end(), [](double v) { return v > 0.0; }) &&
                        std::all_of(solves.begin(), solves.end(), [](double v) { return v > 0.0; });
  if (Ns.size() >= 2 && positive) {
    rep.march_exponent = loglog_slope(Ns, marches);
    rep.solves_exponent = loglog_slope(Ns, solves);
  } else {
    rep.march_exponent = rep.solves_exponent = kNaN;
  }
  rep.solves_monotone = true;
  for (std::size_t i = 1; i < solves.size(); ++i)
    if (solves[i] < solves[i - 1]) rep.solves_monotone = false;
  const auto [fmin, fmax] = std::minmax_element(firsts.begin(), firsts.end());
  rep.first_block_ratio = *fmin > 0.0 ? *fmax / *fmin : kNaN;
  const double m_first = rep.worker_ladder.front().median.marches;
  const double m_last = rep.worker_ladder.back().median.marches;
  rep.march_speedup = m_last > 0.0 ? m_first / m_last : kNaN;
  rep.error_ok = true;
  for (const auto& r : rep.n_ladder) rep.error_ok = rep.error_ok && r.error <= opt.error_bound;
  for (const auto& r : rep.worker_ladder) rep.error_ok = rep.error_ok && r.error <= opt.error_bound;
  rep.seconds = since(t0);
  return rep;
}

void write_subdiffusion_json(std::ostream& os, const SubdiffusionReport& rep) {
  const auto& o = rep.options;
  json j = header("subdiffusion");
  j["config"] = {{"grid", o.grid},   {"workers", o.workers},   {"t_end", o.t_end},   {"method", o.method},   {"K", o.K},
                 {"kappa", o.kappa}, {"J", o.J},           {"Lambda", o.Lambda},   {"repeats", o.repeats},
                 {"error_bound", o.error_bound}};
  auto runs = [](const std::vector<SubdiffusionRun>& v) {
    json a = json::array();
    for (const auto& r : v) {
      json reps = json::array();
      for (const auto& p : r.repeats) reps.push_back(phases_json(p));
      a.push_back({{"N", r.N},
                   {"workers", r.workers},
                   {"median", phases_json(r.median)},
                   {"repeats", reps},
                   {"stats", stats_json(r.stats)},
                   {"error_inf", r.error},
                   {"variance_flag", r.variance_flag}});
    }
    return a;
  };
  j["n_ladder"] = runs(rep.n_ladder);
  j["worker_ladder"] = runs(rep.worker_ladder);
  j["summary"] = {{"march_exponent", num(rep.march_exponent)},
                  {"resolvent_monotone", rep.solves_monotone},
                  {"resolvent_exponent", num(rep.solves_exponent)},
                  {"first_block_ratio", num(rep.first_block_ratio)},
                  {"march_speedup", num(rep.march_speedup)},
                  {"error_ok", rep.error_ok}};
  j["seconds"] = rep.seconds;
  os << j.dump(2) << '\n';
}

void write_subdiffusion_csv(std::ostream& os, const SubdiffusionReport& rep) {
  csv_header(os, "subdiffusion");
  os << "ladder,N,workers,first_block,rk_marches,resolvent_solves,table,total,rk_steps,resolvent_solve_count,"
        "levels,error_inf,variance_flag\n";
  auto rows = [&](const char* name, const std::vector<SubdiffusionRun>& v) {
    for (const auto& r : v)
      os << name << ',' << r.N << ',' << r.workers << ',' << fmt17(r.median.first_block) << ','
         << fmt17(r.median.marches) << ',' << fmt17(r.median.solves) << ',' << fmt17(r.median.table) << ','
         << fmt17(r.median.total) << ',' << r.stats.rk_steps << ',' << r.stats.resolvent_solves << ','
         << r.stats.levels << ',' << fmt17(r.error) << ',' << (r.variance_flag ? 1 : 0) << '\n';
  };
  rows("steps", rep.n_ladder);
  rows("workers", rep.worker_ladder);
}

// ---------------------------------------------------------------------------
// Schroedinger

GridAlignment align_grids(double a, int n, double a_ref, int n_ref) {
  if (n < 2 || n_ref < 2) throw ConfigError("align_grids: need at least two points per grid");
  if (!(a > 0.0) || a > a_ref * (1.0 + 1e-12)) throw ConfigError("align_grids: domain not inside reference domain");
  const double eta = 2.0 * a / (n - 1);
  const double eta_ref = 2.0 * a_ref / (n_ref - 1);
  auto as_int = [](double v, const char* what) {
    const double r = std::round(v);
    if (r < 0.0 || std::abs(v - r) > 1e-8 * std::max(1.0, std::abs(v)))
      throw ConfigError(std::string("align_grids: ") + what + " is not an integer (" + fmt17(v) + ")");
    return static_cast<std::size_t>(r);
  };
  GridAlignment g;
  g.offset = as_int((a_ref - a) / eta_ref, "reference offset");
  if (eta >= eta_ref) {
    g.reference_finer = true;
    g.ratio = as_int(eta / eta_ref, "spacing ratio");
  } else {
    g.reference_finer = false;
    g.ratio = as_int(eta_ref / eta, "spacing ratio");
  }
  return g;
}

CVector schrodinger_solution(double a_half, int n_points, double alpha, const CQConfig& config) {
  const Problem p = example3_problem(n_points, a_half, alpha);
  const TransformedProblem tp = transform_initial(p);
  const FastResult res = fast_solve(tp.problem, config);
  return tp.reconstruct(res.u);
}

namespace {

CQConfig schrodinger_config(const Tableau& tab, double h, std::size_t N, int K, int kappa, int J, int Lambda,
                            double theta, int workers) {
  CQConfig c;
  c.tableau = tab;
  c.h = h;
  c.steps = N;
  c.K = K;
  c.kappa = kappa;
  c.J = J;
  c.Lambda = Lambda;
  c.theta = theta;
  c.real_mode = RealMode::Complex;
  c.workers = workers;
  return c;
}

}  // namespace

SchrodingerReport run_schrodinger(const SchrodingerOptions& opt) {
  const auto t0 = Clock::now();
  const Tableau tab = tableau_by_name(opt.method);
  std::vector<double> times = opt.times;
  if (times.empty()) {
    const auto count = static_cast<int>(std::llround(opt.t_end / 0.05));
    for (int i = 0; i <= count; ++i) times.push_back(i / 20.0);
  }
  const Problem base = example3_problem(opt.n_points, opt.a_half, opt.alpha);
  const auto& family = dynamic_cast<const SchrodingerTbc1d&>(*base.family);

  std::optional<GridAlignment> align;
  std::optional<Problem> ref_base;
  if (opt.reference) {
    align = align_grids(opt.a_half, opt.n_points, opt.ref_a_half, opt.ref_points);
    ref_base = example3_problem(opt.ref_points, opt.ref_a_half, opt.alpha);
  }
  // Validate every configuration before the first solve.
  std::vector<std::size_t> steps;
  for (double t : times) {
    const std::size_t N = t == 0.0 ? 0 : steps_for(t, opt.h, "schrodinger");
    steps.push_back(N);
    if (N == 0) continue;
    schrodinger_config(tab, opt.h, N, opt.K, opt.kappa, opt.J, opt.Lambda, opt.theta, opt.workers)
        .validate(family);
    if (opt.reference)
      schrodinger_config(tab, opt.h, N, opt.ref_K, opt.ref_kappa, opt.ref_J, opt.Lambda, opt.theta, opt.workers)
          .validate(*ref_base->family);
  }

  SchrodingerReport rep;
  rep.initial_max = max_abs(base.u0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    SchrodingerSnapshot snap;
    snap.t = times[i];
    snap.N = steps[i];
    CVector u, ref;
    if (snap.N == 0) {
      u = base.u0;
      if (opt.reference) ref = ref_base->u0;
    } else {
      u = schrodinger_solution(opt.a_half, opt.n_points, opt.alpha,
                               schrodinger_config(tab, opt.h, snap.N, opt.K, opt.kappa, opt.J, opt.Lambda,
                                                  opt.theta, opt.workers));
      if (opt.reference)
        ref = schrodinger_solution(opt.ref_a_half, opt.ref_points, opt.alpha,
                                   schrodinger_config(tab, opt.h, snap.N, opt.ref_K, opt.ref_kappa, opt.ref_J,
                                                      opt.Lambda, opt.theta, opt.workers));
    }
    const auto n = static_cast<std::size_t>(opt.n_points);
    snap.x.resize(n);
    snap.modulus.resize(n);
    snap.error.assign(n, kNaN);
    snap.max_error = opt.reference ? 0.0 : kNaN;
    for (std::size_t j = 0; j < n; ++j) {
      snap.x[j] = family.x(static_cast<int>(j));
      snap.modulus[j] = std::abs(u[j]);
      snap.max_modulus = std::max(snap.max_modulus, snap.modulus[j]);
      if (!align) continue;
      std::size_t r;
      if (align->reference_finer) {
        r = align->offset + j * align->ratio;
      } else {
        if (j % align->ratio) continue;
        r = align->offset + j / align->ratio;
      }
      snap.error[j] = std::abs(u[j] - ref[r]);
      snap.max_error = std::max(snap.max_error, snap.error[j]);
    }
    rep.snapshots.push_back(std::move(snap));
  }
  rep.seconds = since(t0);
  return rep;
}

void write_schrodinger_csv(std::ostream& os, const SchrodingerReport& rep) {
  csv_header(os, "schrodinger");
  os << "t,N,x,modulus,error\n";
  for (const auto& s : rep.snapshots)
    for (std::size_t j = 0; j < s.x.size(); ++j)
      os << fmt17(s.t) << ',' << s.N << ',' << fmt17(s.x[j]) << ',' << fmt17(s.modulus[j]) << ','
         << (std::isnan(s.error[j]) ? std::string() : fmt17(s.error[j])) << '\n';
}

void write_schrodinger_json(std::ostream& os, const SchrodingerReport& rep) {
  json j = header("schrodinger");
  json snaps = json::array();
  for (const auto& s : rep.snapshots) {
    json err = json::array();
    for (double e : s.error) err.push_back(num(e));
    snaps.push_back({{"t", s.t},
                     {"N", s.N},
                     {"x", s.x},
                     {"modulus", s.modulus},
                     {"error", err},
                     {"max_modulus", s.max_modulus},
                     {"max_error", num(s.max_error)}});
  }
  j["initial_max"] = rep.initial_max;
  j["snapshots"] = snaps;
  j["seconds"] = rep.seconds;
  os << j.dump(2) << '\n';
}

ContourScanReport run_contour_scan(const ContourScanOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.Ks.empty()) throw ConfigError("contour scan: no K values");
  const Tableau tab = tableau_by_name(opt.method);
  const std::size_t N = steps_for(opt.t, opt.h, "contour scan");
  const Problem base = example3_problem(opt.n_points, opt.a_half, opt.alpha);
  for (int K : opt.Ks)
    schrodinger_config(tab, opt.h, N, K, opt.kappa, opt.J, opt.Lambda, opt.theta, opt.workers)
        .validate(*base.family);

  // Reference: the circle rule for every weight. rho^J = eps^0.8 balances the
  // aliasing error against the rounding amplified by rho^(-N).
  const int ref_J = opt.ref_J ? opt.ref_J : static_cast<int>(2 * N);
  if (static_cast<std::size_t>(ref_J) < N) throw ConfigError("contour scan: reference J must be at least N");
  CQConfig ref = schrodinger_config(tab, opt.h, N, opt.Ks.front(), static_cast<int>(N) - 1, ref_J, opt.Lambda,
                                    opt.theta, opt.workers);
  ref.rho_circle = std::pow(kMachineEps, 0.8 / ref_J);
  const CVector u_ref = schrodinger_solution(opt.a_half, opt.n_points, opt.alpha, ref);

  ContourScanReport rep;
  rep.N = N;
  rep.reference_max = max_abs(u_ref);
  for (int K : opt.Ks) {
    const auto tk = Clock::now();
    const CVector u = schrodinger_solution(
        opt.a_half, opt.n_points, opt.alpha,
        schrodinger_config(tab, opt.h, N, K, opt.kappa, opt.J, opt.Lambda, opt.theta, opt.workers));
    rep.rows.push_back({K, max_diff(u, u_ref), since(tk)});
  }
  rep.seconds = since(t0);
  return rep;
}

void write_contour_scan_csv(std::ostream& os, const ContourScanReport& rep) {
  csv_header(os, "contour_scan");
  os << "K,N,error_inf,seconds\n";
  for (const auto& r : rep.rows) os << r.K << ',' << rep.N << ',' << fmt17(r.error) << ',' << fmt17(r.seconds) << '\n';
}

void write_contour_scan_json(std::ostream& os, const ContourScanReport& rep) {
  json j = header("contour_scan");
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back({{"K", r.K}, {"error_inf", r.error}, {"seconds", r.seconds}});
  j["N"] = rep.N;
  j["reference_max"] = rep.reference_max;
  j["rows"] = rows;
  j["seconds"] = rep.seconds;
  os << j.dump(2) << '\n';
}

DecayFit fit_geometric_decay(const std::vector<ContourScanRow>& rows, double floor_factor) {
  DecayFit fit;
  if (rows.empty()) return fit;
  double floor = rows.front().error;
  for (const auto& r : rows) floor = std::min(floor, r.error);
  std::size_t n = 0;
  while (n < rows.size() && rows[n].error > floor_factor * floor) ++n;
  fit.points = n;
  if (n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rows[i].K, y = std::log(rows[i].error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (i > 0) {
      const double dK = rows[i].K - rows[i - 1].K;
      if (dK <= 0) throw ConfigError("fit_geometric_decay: K must increase");
      fit.worst_step = std::max(fit.worst_step, std::pow(rows[i].error / rows[i - 1].error, 5.0 / dK));
    }
  }
  const double m = static_cast<double>(n);
  fit.rate_per_five = std::exp(5.0 * (m * sxy - sx * sy) / (m * sxx - sx * sx));
  return fit;
}

// ---------------------------------------------------------------------------
// weights

WeightsReport run_weights(const WeightsOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.n_max < 1) throw ConfigError("weights: n_max must be at least 1");
  if (opt.stride < 1) throw ConfigError("weights: stride must be at least 1");
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("weights: alpha must lie in (0, 1)");
  if (opt.kappa < 0) throw ConfigError("weights: kappa must be non-negative");
  const Tableau tab = tableau_by_name(opt.method);
  const ManufacturedProblem mp = example1_problem();
  const OperatorFamily& family = *mp.problem.family;
  const std::size_t N = opt.n_max + 1;
  std::vector<CQConfig> configs;
  for (int K : opt.Ks) {
    CQConfig c;
    c.tableau = tab;
    c.h = opt.h;
    c.steps = N;
    c.K = K;
    c.kappa = opt.kappa;
    c.J = opt.kappa + 1;
    c.Lambda = opt.Lambda;
    c.theta = opt.theta;
    // kappa = 0 is allowed here: no circle block is formed.
    CQConfig checked = c;
    checked.kappa = std::max(1, c.kappa);
    checked.J = checked.kappa + 1;
    checked.validate(family);
    configs.push_back(c);
  }
  const LevelPlan plan = plan_levels(N, opt.kappa, opt.Lambda);
  const std::vector<CMatrix> W = direct_weights(family, opt.alpha, tab, opt.h, N);

  WeightsReport rep;
  for (std::size_t n = 0; n <= opt.n_max; n += opt.stride)
    if (plan.level_of(n) <= 0)
      rep.notices.push_back("n=" + std::to_string(n) + " (t=" + fmt17(static_cast<double>(n) * opt.h) +
                            ") lies in no contour interval; omitted");
  for (const auto& c : configs) {
    std::vector<ContourLevel> levels;
    for (int ell = 1; ell <= plan.L; ++ell) levels.push_back(config_level(c, family, ell));
    for (std::size_t n = 0; n <= opt.n_max; n += opt.stride) {
      const int ell = plan.level_of(n);
      if (ell <= 0) continue;
      const CMatrix wd = last_row_block(W[n], tab.s);
      const CMatrix wc =
          contour_weight(family, opt.alpha, tab, opt.h, n, levels[static_cast<std::size_t>(ell - 1)]);
      rep.rows.push_back({n, c.K, ell, static_cast<double>(n) * opt.h, (wc - wd).max_norm(), wd.max_norm()});
    }
  }
  rep.seconds = since(t0);
  return rep;
}

void write_weights_csv(std::ostream& os, const WeightsReport& rep) {
  csv_header(os, "weights");
  for (const auto& n : rep.notices) os << "# notice: " << n << '\n';
  os << "n,K,level,t,error_max,direct_max\n";
  for (const auto& r : rep.rows)
    os << r.n << ',' << r.K << ',' << r.level << ',' << fmt17(r.t) << ',' << fmt17(r.error) << ','
       << fmt17(r.direct_norm) << '\n';
}

void write_weights_json(std::ostream& os, const WeightsReport& rep) {
  json j = header("weights");
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"n", r.n}, {"K", r.K}, {"level", r.level}, {"t", r.t}, {"error_max", r.error},
                    {"direct_max", r.direct_norm}});
  j["notices"] = rep.notices;
  j["rows"] = rows;
  j["seconds"] = rep.seconds;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// selftest

std::vector<SelftestCheck> run_selftest(int workers) {
  std::vector<SelftestCheck> out;
  auto check = [&](const std::string& name, auto&& fn) {
    SelftestCheck c;
    c.name = name;
    try {
      c.pass = fn(c.detail);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(c);
  };

  check("radau assumptions", [](std::string& d) {
    bool ok = true;
    for (int s = 1; s <= 3; ++s) {
      const bool a = check_assumptions(radau_iia(s)).all();
      d += "s=" + std::to_string(s) + (a ? " ok " : " FAILED ");
      ok = ok && a;
    }
    return ok;
  });
  check("caputo power rule", [](std::string& d) {
    const double alpha = 0.5, t = 0.7;
    const double got = caputo_oracle([](double) { return 1.0; }, alpha, t);
    const double want = std::pow(t, 1.0 - alpha) / std::tgamma(2.0 - alpha);
    d = "error " + fmt17(std::abs(got - want));
    return std::abs(got - want) <= 1e-10;
  });
  check("dft round trip", [](std::string& d) {
    CVector x(64);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = Complex(std::sin(1.0 + i), std::cos(0.3 * i));
    CVector y = dft(dft(x, -1), 1);
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(y[i] / 64.0 - x[i]));
    d = "error " + fmt17(e);
    return e <= 1e-13;
  });
  check("tbc roots", [](std::string& d) {
    const SchrodingerTbc1d op(2.0, 101, 0.75);
    const auto r = op.boundary_roots(Complex(3.0, 1.0));
    const double e = std::abs(r.inner * r.outer - 1.0);
    d = "|z1 z2 - 1| = " + fmt17(e);
    return e <= 1e-12 && std::abs(r.inner) < 1.0;
  });
  check("fast vs direct, dense", [workers](std::string& d) {
    const ManufacturedProblem mp = example1_problem();
    CQConfig c;
    c.tableau = radau_iia(3);
    c.steps = 200;
    c.h = 1.0 / 200;
    c.K = 25;
    c.workers = workers;
    const FastResult fr = fast_solve(mp.problem, c);
    const auto dr = direct_cq(mp.problem, c);
    const double e = max_diff(fr.u, dr.back());
    d = "difference " + fmt17(e);
    return e <= 1e-6 * std::max(1.0, max_abs(dr.back()));
  });
  check("counters", [workers](std::string& d) {
    const ManufacturedProblem mp = example1_problem();
    CQConfig c;
    c.steps = 300;
    c.h = 0.01;
    c.K = 12;
    c.kappa = 7;
    c.J = 8;
    c.Lambda = 3;
    c.workers = workers;
    const FastResult fr = fast_solve(mp.problem, c);
    const auto L = static_cast<std::size_t>(fr.plan.L);
    const bool ok = fr.stats.real_mode && fr.stats.resolvent_solves == L * 13 && fr.stats.rk_steps == 13 * (300 - 8);
    d = "L=" + std::to_string(L) + " solves=" + std::to_string(fr.stats.resolvent_solves) +
        " rk_steps=" + std::to_string(fr.stats.rk_steps);
    return ok;
  });
  return out;
}

void write_selftest(std::ostream& os, const std::vector<SelftestCheck>& checks, bool as_json) {
  if (as_json) {
    json j = header("selftest");
    json a = json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = a;
    os << j.dump(2) << '\n';
    return;
  }
  csv_header(os, "selftest");
  os << "check,result,detail\n";
  for (const auto& c : checks) os << c.name << ',' << (c.pass ? "PASS" : "FAIL") << ",\"" << c.detail << "\"\n";
}

}  // namespace fcq
