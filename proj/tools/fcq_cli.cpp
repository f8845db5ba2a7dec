// fcq: experiment driver for fast Runge-Kutta convolution quadrature.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fcq/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kAcceptance = 4 };

struct RunSpec {
  std::optional<double> alpha, h, theta, rho, t_end, a_half, error_bound, oracle_tol, ref_a_half;
  std::optional<std::size_t> steps;
  std::optional<int> K, Lambda, kappa, J, workers, grid, repeats, ref_grid, ref_K, ref_kappa, ref_J, stride;
  std::optional<std::string> method;
  std::vector<std::size_t> ladder;
  std::vector<int> Ks, worker_ladder, scan_K;
  std::vector<double> times;
  std::string out;
  std::optional<std::string> format;
  bool real = false, complex = false, no_reference = false, dump_config = false;
};

fcq::RealMode real_mode(const RunSpec& s) {
  if (s.real && s.complex) throw fcq::ConfigError("--real and --complex are exclusive");
  return s.real ? fcq::RealMode::Real : s.complex ? fcq::RealMode::Complex : fcq::RealMode::Auto;
}

template <class T>
void check_positive(const std::optional<T>& v, const char* flag) {
  if (v && !(*v > T(0))) throw fcq::ConfigError(std::string(flag) + " must be positive");
}

void validate_common(const RunSpec& s) {
  check_positive(s.h, "--h");
  check_positive(s.steps, "--steps");
  check_positive(s.t_end, "--t-end");
  check_positive(s.a_half, "--a-half");
  check_positive(s.grid, "--grid");
  check_positive(s.repeats, "--repeats");
  check_positive(s.stride, "--stride");
  if (s.workers && *s.workers < 0) throw fcq::ConfigError("--workers must be non-negative");
  if (s.alpha && !(*s.alpha > 0.0 && *s.alpha < 1.0)) throw fcq::ConfigError("--alpha must lie in (0, 1)");
  if (s.rho && !(*s.rho > 0.0 && *s.rho < 1.0)) throw fcq::ConfigError("--rho must lie in (0, 1)");
  if (s.theta && !(*s.theta >= 0.0)) throw fcq::ConfigError("--theta must be non-negative");
  if (s.format && *s.format != "csv" && *s.format != "json") throw fcq::ConfigError("--format must be csv or json");
  real_mode(s);
}

void fixed_alpha(const RunSpec& s, double alpha, const char* experiment) {
  if (s.alpha && *s.alpha != alpha)
    throw fcq::ConfigError(std::string(experiment) + " uses alpha = " + fcq::fmt17(alpha));
}

// Prints the resolved configuration as a config file.
struct Dump {
  std::ostringstream os;
  template <class T>
  void operator()(const char* key, const T& v) {
    os << key << '=' << v << '\n';
  }
  template <class T>
  void list(const char* key, const std::vector<T>& v) {
    os << key << '=' << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]\n";
  }
  void number(const char* key, double v) { os << key << '=' << fcq::fmt17(v) << '\n'; }
};

void emit(const RunSpec& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw fcq::ConfigError("cannot open output file " + s.out);
  f << text;
}

int run_convergence(const RunSpec& s) {
  fixed_alpha(s, 0.5, "convergence");
  fcq::ConvergenceOptions o;
  if (s.method) o.methods = {*s.method};
  if (s.K) o.Ks = {*s.K};
  if (!s.Ks.empty()) o.Ks = s.Ks;
  if (s.t_end) o.t_end = *s.t_end;
  if (!s.ladder.empty()) o.ladder = s.ladder;
  if (s.h || s.steps) {
    const double t = o.t_end;
    std::size_t N;
    if (s.h && s.steps) {
      N = *s.steps;
      if (std::abs(static_cast<double>(N) * *s.h - t) > 1e-9 * t)
        throw fcq::ConfigError("ladder: N h = " + fcq::fmt17(static_cast<double>(N) * *s.h) + " differs from t_end");
    } else if (s.h) {
      const double n = std::round(t / *s.h);
      if (n < 1.0 || std::abs(n * *s.h - t) > 1e-9 * t) throw fcq::ConfigError("ladder: t_end is not a multiple of h");
      N = static_cast<std::size_t>(n);
    } else {
      N = *s.steps;
    }
    o.ladder = {N};
  }
  if (s.kappa) o.kappa = *s.kappa;
  if (s.J) o.J = *s.J;
  if (s.Lambda) o.Lambda = *s.Lambda;
  if (s.theta) o.theta = *s.theta;
  if (s.workers) o.workers = *s.workers;
  if (s.oracle_tol) o.oracle_tol = *s.oracle_tol;
  o.real_mode = real_mode(s);
  for (const auto& m : o.methods) fcq::tableau_by_name(m);

  if (s.dump_config) {
    Dump d;
    d.list("method", o.methods);
    d.list("Ks", o.Ks);
    d.list("ladder", o.ladder);
    d.number("t-end", o.t_end);
    d("kappa", o.kappa);
    d("J", o.J);
    d("Lambda", o.Lambda);
    d.number("theta", o.theta);
    d("workers", o.workers);
    d.number("oracle-tol", o.oracle_tol);
    std::cerr << d.os.str();
  }
  const auto rep = fcq::run_convergence(o);
  std::ostringstream os;
  if (s.format.value_or("csv") == "json")
    fcq::write_convergence_json(os, rep);
  else
    fcq::write_convergence_csv(os, rep);
  emit(s, os.str());
  return kOk;
}

int run_subdiffusion(const RunSpec& s) {
  fixed_alpha(s, 0.5, "subdiffusion");
  fcq::SubdiffusionOptions o;
  if (s.grid) o.grid = *s.grid;
  if (s.t_end) o.t_end = *s.t_end;
  if (!s.ladder.empty()) o.ladder = s.ladder;
  if (!s.worker_ladder.empty()) o.worker_ladder = s.worker_ladder;
  if (s.workers) o.workers = *s.workers;
  if (s.steps) o.worker_steps = *s.steps;
  if (s.method) o.method = *s.method;
  if (s.K) o.K = *s.K;
  if (s.kappa) o.kappa = *s.kappa;
  o.J = s.J ? *s.J : o.kappa + 2;
  if (s.Lambda) o.Lambda = *s.Lambda;
  if (s.theta) o.theta = *s.theta;
  if (s.repeats) o.repeats = *s.repeats;
  if (s.error_bound) o.error_bound = *s.error_bound;
  if (s.oracle_tol) o.oracle_tol = *s.oracle_tol;
  o.real_mode = real_mode(s);
  if (s.dump_config) {
    Dump d;
    d("grid", o.grid);
    d.number("t-end", o.t_end);
    d.list("ladder", o.ladder);
    d.list("worker-ladder", o.worker_ladder);
    d("workers", o.workers);
    d("steps", o.worker_steps);
    d("method", o.method);
    d("K", o.K);
    d("kappa", o.kappa);
    d("J", o.J);
    d("Lambda", o.Lambda);
    d.number("theta", o.theta);
    d("repeats", o.repeats);
    d.number("error-bound", o.error_bound);
    d.number("oracle-tol", o.oracle_tol);
    std::cerr << d.os.str();
  }
  const auto rep = fcq::run_subdiffusion(o);
  std::ostringstream os;
  if (s.format.value_or("json") == "json")
    fcq::write_subdiffusion_json(os, rep);
  else
    fcq::write_subdiffusion_csv(os, rep);
  emit(s, os.str());
  return rep.error_ok ? kOk : kNumerical;
}

int run_schrodinger(const RunSpec& s) {
  if (!s.scan_K.empty()) {
    fcq::ContourScanOptions o;
    if (s.a_half) o.a_half = *s.a_half;
    if (s.grid) o.n_points = *s.grid;
    if (s.alpha) o.alpha = *s.alpha;
    if (s.h) o.h = *s.h;
    if (s.t_end) o.t = *s.t_end;
    if (s.method) o.method = *s.method;
    o.Ks = s.scan_K;
    if (s.kappa) o.kappa = *s.kappa;
    o.J = s.J ? *s.J : 4 * o.kappa;
    if (s.Lambda) o.Lambda = *s.Lambda;
    if (s.theta) o.theta = *s.theta;
    if (s.workers) o.workers = *s.workers;
    if (s.ref_J) o.ref_J = *s.ref_J;
    if (s.dump_config) {
      Dump d;
      d.number("a-half", o.a_half);
      d("grid", o.n_points);
      d.number("alpha", o.alpha);
      d.number("h", o.h);
      d.number("t-end", o.t);
      d("method", o.method);
      d.list("scan-K", o.Ks);
      d("kappa", o.kappa);
      d("J", o.J);
      d("Lambda", o.Lambda);
      d.number("theta", o.theta);
      d("workers", o.workers);
      d("ref-J", o.ref_J);
      std::cerr << d.os.str();
    }
    const auto rep = fcq::run_contour_scan(o);
    std::ostringstream os;
    if (s.format.value_or("csv") == "json")
      fcq::write_contour_scan_json(os, rep);
    else
      fcq::write_contour_scan_csv(os, rep);
    emit(s, os.str());
    return kOk;
  }
  fcq::SchrodingerOptions o;
  if (s.a_half) o.a_half = *s.a_half;
  if (s.grid) o.n_points = *s.grid;
  if (s.alpha) o.alpha = *s.alpha;
  if (s.h) o.h = *s.h;
  if (s.t_end) o.t_end = *s.t_end;
  o.times = s.times;
  if (s.method) o.method = *s.method;
  if (s.K) o.K = *s.K;
  if (s.kappa) o.kappa = *s.kappa;
  o.J = s.J ? *s.J : 4 * o.kappa;
  if (s.Lambda) o.Lambda = *s.Lambda;
  if (s.theta) o.theta = *s.theta;
  if (s.workers) o.workers = *s.workers;
  o.reference = !s.no_reference;
  if (s.ref_a_half) o.ref_a_half = *s.ref_a_half;
  if (s.ref_grid) o.ref_points = *s.ref_grid;
  if (s.ref_K) o.ref_K = *s.ref_K;
  if (s.ref_kappa) o.ref_kappa = *s.ref_kappa;
  o.ref_J = s.ref_J ? *s.ref_J : 4 * o.ref_kappa;
  if (s.dump_config) {
    Dump d;
    d.number("a-half", o.a_half);
    d("grid", o.n_points);
    d.number("alpha", o.alpha);
    d.number("h", o.h);
    d.number("t-end", o.t_end);
    d("method", o.method);
    d("K", o.K);
    d("kappa", o.kappa);
    d("J", o.J);
    d("Lambda", o.Lambda);
    d.number("theta", o.theta);
    d("workers", o.workers);
    d("no-reference", !o.reference);
    d.number("ref-a-half", o.ref_a_half);
    d("ref-grid", o.ref_points);
    d("ref-K", o.ref_K);
    d("ref-kappa", o.ref_kappa);
    d("ref-J", o.ref_J);
    std::cerr << d.os.str();
  }
  const auto rep = fcq::run_schrodinger(o);
  std::ostringstream os;
  if (s.format.value_or("csv") == "json")
    fcq::write_schrodinger_json(os, rep);
  else
    fcq::write_schrodinger_csv(os, rep);
  emit(s, os.str());
  return kOk;
}

int run_weights(const RunSpec& s) {
  fcq::WeightsOptions o;
  if (s.method) o.method = *s.method;
  if (s.alpha) o.alpha = *s.alpha;
  if (s.h) o.h = *s.h;
  if (s.steps) o.n_max = *s.steps;
  if (s.K) o.Ks = {*s.K};
  if (!s.Ks.empty()) o.Ks = s.Ks;
  if (s.kappa) o.kappa = *s.kappa;
  if (s.Lambda) o.Lambda = *s.Lambda;
  if (s.theta) o.theta = *s.theta;
  if (s.stride) o.stride = static_cast<std::size_t>(*s.stride);
  if (s.dump_config) {
    Dump d;
    d("method", o.method);
    d.number("alpha", o.alpha);
    d.number("h", o.h);
    d("steps", o.n_max);
    d.list("Ks", o.Ks);
    d("kappa", o.kappa);
    d("Lambda", o.Lambda);
    d.number("theta", o.theta);
    d("stride", o.stride);
    std::cerr << d.os.str();
  }
  const auto rep = fcq::run_weights(o);
  for (const auto& n : rep.notices) std::cerr << "notice: " << n << '\n';
  std::ostringstream os;
  if (s.format.value_or("csv") == "json")
    fcq::write_weights_json(os, rep);
  else
    fcq::write_weights_csv(os, rep);
  emit(s, os.str());
  return kOk;
}

int run_selftest(const RunSpec& s) {
  const auto checks = fcq::run_selftest(s.workers.value_or(0));
  std::ostringstream os;
  fcq::write_selftest(os, checks, s.format.value_or("csv") == "json");
  emit(s, os.str());
  for (const auto& c : checks)
    if (!c.pass) return kAcceptance;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast Runge-Kutta convolution quadrature for fractional evolution equations"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Flat key=value file; keys are flag names, command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  RunSpec s;
  app.add_option("--alpha", s.alpha, "Fractional order");
  app.add_option("--h", s.h, "Time step");
  app.add_option("--steps", s.steps, "Number of steps N");
  app.add_option("--K", s.K, "Contour nodes per half-contour");
  app.add_option("--Lambda", s.Lambda, "Interval growth factor");
  app.add_option("--kappa", s.kappa, "Weights handled by the circle rule, minus one");
  app.add_option("--J", s.J, "Circle-rule points");
  app.add_option("--rho", s.rho, "Circle-rule radius (default eps^(1/(2J)))");
  app.add_option("--theta", s.theta, "Contour angle parameter (default 0.95 theta1)");
  app.add_option("--method", s.method, "radau1 | radau3 | radau5");
  app.add_option("--workers", s.workers, "Worker threads (0: all)");
  app.add_option("--grid", s.grid, "Points per axis (subdiffusion) or grid points (schrodinger)");
  app.add_option("--a-half", s.a_half, "Half-width of the Schroedinger domain");
  app.add_option("--t-end", s.t_end, "Final time");
  app.add_option("--out", s.out, "Output file (default stdout)");
  app.add_option("--format", s.format, "csv | json");
  app.add_flag("--real", s.real, "Force the real-reduced contour sum");
  app.add_flag("--complex", s.complex, "Force the full complex contour sum");
  app.add_flag("--dump-config", s.dump_config, "Print the resolved configuration to stderr");
  app.add_option("--ladder", s.ladder, "Step counts N of a ladder")->delimiter(',');
  app.add_option("--Ks", s.Ks, "List of K values")->delimiter(',');
  app.add_option("--worker-ladder", s.worker_ladder, "Worker counts")->delimiter(',');
  app.add_option("--repeats", s.repeats, "Timing repeats");
  app.add_option("--error-bound", s.error_bound, "Bound on the final error (subdiffusion)");
  app.add_option("--oracle-tol", s.oracle_tol, "Tolerance of the Caputo quadrature");
  app.add_option("--times", s.times, "Snapshot times")->delimiter(',');
  app.add_flag("--no-reference", s.no_reference, "Skip the large-domain reference run");
  app.add_option("--ref-a-half", s.ref_a_half, "Reference half-width");
  app.add_option("--ref-grid", s.ref_grid, "Reference grid points");
  app.add_option("--ref-K", s.ref_K, "Reference K");
  app.add_option("--ref-kappa", s.ref_kappa, "Reference kappa");
  app.add_option("--ref-J", s.ref_J, "Reference J");
  app.add_option("--scan-K", s.scan_K, "Error against K at --t-end (schrodinger)")->delimiter(',');
  app.add_option("--stride", s.stride, "Tabulate every stride-th weight");

  auto* convergence = app.add_subcommand("convergence", "Error against h for the manufactured 2x2 problem");
  auto* subdiffusion = app.add_subcommand("subdiffusion", "Phase timings for 3D subdiffusion");
  auto* schrodinger = app.add_subcommand("schrodinger", "Schroedinger equation with transparent boundary");
  auto* weights = app.add_subcommand("weights", "Contour against direct convolution weights");
  auto* selftest = app.add_subcommand("selftest", "Quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    validate_common(s);
    if (*convergence) return run_convergence(s);
    if (*subdiffusion) return run_subdiffusion(s);
    if (*schrodinger) return run_schrodinger(s);
    if (*weights) return run_weights(s);
    if (*selftest) return run_selftest(s);
  } catch (const fcq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fcq::SupportError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fcq::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}
