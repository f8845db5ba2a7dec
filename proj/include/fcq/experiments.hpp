#pragma once

// Experiment drivers shared by the command-line tool and the acceptance suite.

#include <iosfwd>
#include <string>
#include <vector>

#include "fcq/fastcq.hpp"

namespace fcq {

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Indices of a ladder (ordered coarse to fine) kept for an order fit: points
/// whose error exceeds floor_factor * min(error), and of those the finest `keep`.
std::vector<std::size_t> pre_saturation_points(const std::vector<double>& err, double floor_factor = 10.0,
                                               std::size_t keep = 4);

/// Formats with 17 significant digits.
std::string fmt17(double v);

// --- convergence ----------------------------------------------------------

struct ConvergenceOptions {
  std::vector<std::string> methods{"radau1", "radau3", "radau5"};
  std::vector<int> Ks{10, 25};
  std::vector<std::size_t> ladder{20, 40, 80, 160, 320, 640, 1280, 2560, 5120, 10240};
  double t_end = 10.0;
  int kappa = 20;
  int J = 160;
  int Lambda = kDefaultLambda;
  double theta = 0.0;
  RealMode real_mode = RealMode::Auto;
  int workers = 0;
  double oracle_tol = 1e-12;
};

struct ConvergenceRow {
  std::string method;
  int s = 0;
  double h = 0.0;
  std::size_t N = 0;
  int K = 0;
  double error = 0.0;
  double slope_so_far = 0.0;  // NaN for the first row of a series
  bool direct_only = false;
};

struct ConvergenceFit {
  std::string method;
  int K = 0;
  double slope = 0.0;
  double min_error = 0.0;
  std::vector<std::size_t> used;  // ladder indices in the fit
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceFit> fits;
  double seconds = 0.0;
};

ConvergenceReport run_convergence(const ConvergenceOptions& opt);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep);
void write_convergence_json(std::ostream& os, const ConvergenceReport& rep);

// --- subdiffusion timing --------------------------------------------------

struct SubdiffusionOptions {
  int grid = 16;
  double t_end = 123.45;
  std::vector<std::size_t> ladder{1000, 10000, 100000};
  std::vector<int> worker_ladder{1, 2, 4};
  std::size_t worker_steps = 0;  // 0: largest ladder entry
  int workers = 0;               // for the N-ladder; 0: all available
  std::string method = "radau5";
  int K = 20;
  int kappa = 12;
  int J = 14;
  int Lambda = kDefaultLambda;
  double theta = 0.0;
  RealMode real_mode = RealMode::Auto;
  int repeats = 3;
  double error_bound = 1e-2;
  double oracle_tol = 1e-10;
};

struct PhaseTimes {
  double table = 0.0;
  double first_block = 0.0;
  double marches = 0.0;
  double solves = 0.0;
  double total = 0.0;
};

struct SubdiffusionRun {
  std::size_t N = 0;
  int workers = 1;
  PhaseTimes median;
  std::vector<PhaseTimes> repeats;
  RunStats stats;
  double error = 0.0;
  bool variance_flag = false;  // a phase varied by more than 50% across repeats
};

struct SubdiffusionReport {
  SubdiffusionOptions options;
  std::vector<SubdiffusionRun> n_ladder;
  std::vector<SubdiffusionRun> worker_ladder;
  double march_exponent = 0.0;
  bool solves_monotone = false;
  double solves_exponent = 0.0;
  double first_block_ratio = 0.0;
  double march_speedup = 0.0;  // first vs last worker-ladder entry
  bool error_ok = false;
  double seconds = 0.0;
};

SubdiffusionReport run_subdiffusion(const SubdiffusionOptions& opt);
void write_subdiffusion_json(std::ostream& os, const SubdiffusionReport& rep);
void write_subdiffusion_csv(std::ostream& os, const SubdiffusionReport& rep);

// --- Schroedinger with transparent boundary --------------------------------

struct SchrodingerOptions {
  double a_half = 2.0;
  int n_points = 801;
  double alpha = 0.75;
  double h = 0.00025;
  std::vector<double> times;  // empty: 0, 0.05, ..., t_end
  double t_end = 1.0;
  std::string method = "radau5";
  int K = 50;
  int kappa = 20;
  int J = 80;
  int Lambda = kDefaultLambda;
  double theta = 0.0;
  int workers = 0;
  bool reference = true;
  double ref_a_half = 8.0;
  int ref_points = 1601;
  int ref_K = 110;
  int ref_kappa = 60;
  int ref_J = 240;
};

struct SchrodingerSnapshot {
  double t = 0.0;
  std::size_t N = 0;
  std::vector<double> x;
  std::vector<double> modulus;
  std::vector<double> error;  // at reference-aligned points, NaN elsewhere
  double max_modulus = 0.0;
  double max_error = 0.0;     // NaN without reference
};

struct SchrodingerReport {
  std::vector<SchrodingerSnapshot> snapshots;
  double initial_max = 0.0;
  double seconds = 0.0;
};

/// Grid index stride between the domain grid and the reference grid;
/// throws ConfigError when the grids do not share points.
struct GridAlignment {
  std::size_t offset = 0;  // reference index of the first domain point
  std::size_t ratio = 1;   // domain spacing = ratio * reference spacing, or 1 / ratio
  bool reference_finer = true;
};
GridAlignment align_grids(double a, int n, double a_ref, int n_ref);

SchrodingerReport run_schrodinger(const SchrodingerOptions& opt);
void write_schrodinger_csv(std::ostream& os, const SchrodingerReport& rep);
void write_schrodinger_json(std::ostream& os, const SchrodingerReport& rep);

/// Solution of the Schroedinger problem at t = N h (u(0) included).
CVector schrodinger_solution(double a_half, int n_points, double alpha, const CQConfig& config);

/// Error at a fixed time against the number of contour nodes, with a
/// same-grid reference that puts every weight in the circle block.
struct ContourScanOptions {
  double a_half = 2.0;
  int n_points = 801;
  double alpha = 0.75;
  double h = 0.00025;
  double t = 0.5;
  std::string method = "radau5";
  std::vector<int> Ks{10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80};
  int kappa = 20;
  int J = 80;
  int Lambda = kDefaultLambda;
  double theta = 0.0;
  int workers = 0;
  int ref_J = 0;  // 0: 2 N
};

struct ContourScanRow {
  int K = 0;
  double error = 0.0;
  double seconds = 0.0;
};

struct ContourScanReport {
  std::vector<ContourScanRow> rows;
  std::size_t N = 0;
  double reference_max = 0.0;
  double seconds = 0.0;
};

ContourScanReport run_contour_scan(const ContourScanOptions& opt);
void write_contour_scan_csv(std::ostream& os, const ContourScanReport& rep);
void write_contour_scan_json(std::ostream& os, const ContourScanReport& rep);

/// Geometric decay of the error in K over the rows before the error first
/// comes within floor_factor of the smallest error.
struct DecayFit {
  double rate_per_five = 0.0;  // least-squares error ratio per +5 nodes
  double worst_step = 0.0;     // largest consecutive ratio, normalised to +5 nodes
  std::size_t points = 0;
};
DecayFit fit_geometric_decay(const std::vector<ContourScanRow>& rows, double floor_factor = 10.0);

// --- weights --------------------------------------------------------------

struct WeightsOptions {
  std::string method = "radau5";
  double alpha = 0.5;
  double h = 0.01;
  std::size_t n_max = 1000;
  std::vector<int> Ks{10, 15, 20, 25, 30};
  int kappa = 0;
  int Lambda = kDefaultLambda;
  double theta = 0.0;
  std::size_t stride = 1;  // tabulate every stride-th n
};

struct WeightsRow {
  std::size_t n = 0;
  int K = 0;
  int level = 0;
  double t = 0.0;
  double error = 0.0;
  double direct_norm = 0.0;
};

struct WeightsReport {
  std::vector<WeightsRow> rows;
  std::vector<std::string> notices;
  double seconds = 0.0;
};

WeightsReport run_weights(const WeightsOptions& opt);
void write_weights_csv(std::ostream& os, const WeightsReport& rep);
void write_weights_json(std::ostream& os, const WeightsReport& rep);

// --- selftest ---------------------------------------------------------------

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<SelftestCheck> run_selftest(int workers = 0);
void write_selftest(std::ostream& os, const std::vector<SelftestCheck>& checks, bool json);

}  // namespace fcq
