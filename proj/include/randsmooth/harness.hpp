#ifndef RANDSMOOTH_HARNESS_HPP
#define RANDSMOOTH_HARNESS_HPP

#include "randsmooth/optimizer.hpp"
#include "randsmooth/problems.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace randsmooth {

/// The reference optimum did not settle across doubling budgets.
class ReferenceInstability : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ProblemSpec {
  std::string kind = "robust_regression";  // robust_regression | l1_centroid | metric_learning
  std::int64_t n = 1000;
  std::int64_t d = 50;
  double noise_sd = 0.31622776601683794;  // sqrt(0.1)
  double L0 = 1.0;
  double trace_bound = 1.0;  // metric learning C
  int rank = 2;
};

std::unique_ptr<StochasticProblem> make_problem(const ProblemSpec& spec, std::uint64_t seed);

enum class ExperimentMode { t_eps, trace, timing, compare };

/// Everything one experiment needs. Parsed from a key = value file; see
/// parse_config for the keys.
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::t_eps;
  ProblemSpec problem;

  std::string psi = "euclidean";  // euclidean | lp
  double lp_exponent = 0.0;       // <= 0: 1 + 1/log d
  DomainKind domain = DomainKind::unconstrained;
  double domain_bound = 1.0;  // ball radius, box half-width, or trace bound
  RegularizerKind regularizer = RegularizerKind::none;
  double lambda = 0.0;

  SmoothingKind smoothing = SmoothingKind::uniform_l2_ball;
  ScheduleKind schedule = ScheduleKind::anytime;
  std::optional<double> u;    // default: the corollary radius for the smoothing kind
  std::optional<double> eta;  // default: l0 / (R sqrt(m))

  std::vector<int> m_list{1};
  std::int64_t T = 10000;
  double eps_fraction = 0.05;
  std::optional<double> eps;  // absolute target; overrides eps_fraction
  std::vector<std::uint64_t> seeds{1};
  std::int64_t eval_every = 1;
  std::int64_t reference_budget = 100000;
  std::vector<double> stepsize_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  double time_budget_s = 2.0;  // timing mode, per run
  /// compare mode: dual averaging is measured at its running average (true)
  /// or at its iterate x_t (false).
  bool baseline_report_average = true;

  unsigned threads = 1;
  std::filesystem::path out_dir = "out";
  /// When set, instances and their reference optima are saved here and
  /// reused by later runs with the same generator and reference settings.
  std::filesystem::path problem_cache;
  /// trace mode: include the wall_ns column (not reproducible across runs).
  bool record_time = false;

  void validate() const;
};

/// Reads `key = value` lines; '#' starts a comment. Lists are comma
/// separated; seeds also accept a range `a-b`. Unknown keys and malformed
/// values raise ConfigError.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

ExperimentMode parse_mode(const std::string& s);
std::string to_string(ExperimentMode m);

/// Geometry for a problem of dimension d under the config.
Geometry make_geometry(const ExperimentConfig& cfg, Eigen::Index d);

/// u = R d^{1/4} (l2 ball), R d^{-1/4} (Gaussian), R sqrt(d log d) (cube).
double default_smoothing_radius(SmoothingKind kind, double R, Eigen::Index d);

/// Step configuration for m samples, with l0 measured in the dual of the
/// smoothing kind's primal norm and R the given distance estimate.
StepConfig make_step_config(const ExperimentConfig& cfg, const StochasticProblem& problem, double R,
                            int m, std::int64_t T);

// ---------------------------------------------------------------------------
// Reference optimum
// ---------------------------------------------------------------------------

struct ReferenceOptions {
  std::int64_t budget = 100000;  // oracle calls of the first run; then 2x and 4x
  int m = 64;
  double eps_fraction = 0.05;
  std::optional<double> eps;
  SmoothingKind smoothing = SmoothingKind::uniform_l2_ball;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct Reference {
  Vector x;
  double f = 0.0;     // f(x) + r(x)
  double f_x0 = 0.0;  // objective at the default start
  double eps = 0.0;   // target accuracy derived from the gap at x_0
  double R = 1.0;     // matched-norm distance from x_0 to x, or the domain radius
  std::array<double, 3> budget_values{};  // best value after B, 2B, 4B
  bool stable = false;
  std::string source;  // exact | lower_bound | planted | accelerated
};

/// min over known candidates (closed-form minimizer, planted point) and the
/// best iterate of three accelerated runs with m = 64 at budgets B, 2B, 4B.
/// Stable when the last doubling changes the value by less than eps/10.
Reference reference_optimum(const StochasticProblem& problem, const Geometry& geom,
                            const ReferenceOptions& opts);

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

struct TEps {
  std::int64_t T = 0;  // first t with gap(x_t) <= eps, or the budget
  bool reached = false;
};

TEps measure_T_eps(const StochasticProblem& problem, const Geometry& geom, const StepConfig& cfg,
                   const Reference& ref, std::uint64_t seed);

/// The same for plain dual averaging at the given stepsize scale.
TEps measure_T_eps_dual_averaging(const StochasticProblem& problem, const Geometry& geom,
                                  const DualAveragingConfig& cfg, const Reference& ref,
                                  std::uint64_t seed);

struct SummaryStats {
  std::size_t count = 0;
  double mean = NAN, std = NAN, median = NAN, q1 = NAN, q3 = NAN;
};

/// Sample statistics (std with n - 1); quartiles by linear interpolation.
SummaryStats summarize(std::vector<double> values);
double quantile(std::vector<double> values, double q);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct TEpsRecord {
  std::uint64_t seed = 0;
  int m = 0;
  std::string method = "accelerated";
  double stepsize_scale = 0.0;
  std::int64_t T = 0;
  bool reached = false;
  double eps = 0.0, f_ref = 0.0, R = 0.0;
  std::string status = "ok";  // ok | unstable_reference | error: ...
};

struct TEpsCell {
  int m = 0;
  std::string method;
  double stepsize_scale = 0.0;
  std::size_t reached = 0;
  SummaryStats stats;  // over seeds with a usable reference
};

struct TEpsResult {
  std::vector<TEpsRecord> records;
  std::vector<TEpsCell> summary;
  bool unstable_reference = false;
};

/// T(eps, m) for every (seed, m); seeds run in parallel. Each seed generates
/// its own instance (data seed = seed) and reference optimum.
TEpsResult run_t_eps(const ExperimentConfig& cfg);

/// T(eps, m) for the smoothed accelerated method and for plain dual averaging
/// at every stepsize in the grid. The summary keeps, per m, the accelerated
/// cell and the dual-averaging cell with the smallest median.
TEpsResult compare_smoothed_vs_plain(const ExperimentConfig& cfg);

struct TraceRecord {
  std::uint64_t seed = 0;
  int m = 0;
  RunTrace trace;
};

struct TraceResult {
  std::vector<TraceRecord> runs;
  bool unstable_reference = false;
};

/// Full gap traces for every (seed, m). With `timed` true the runs execute
/// one at a time and stop after time_budget_s of optimizer time.
TraceResult run_traces(const ExperimentConfig& cfg, bool timed);

/// Gap of the last evaluated iterate at or before each time (initial gap
/// before the first row), as seed-level quartiles.
struct GapBand {
  std::vector<double> times_s;
  std::vector<double> q1, median, q3;
};
GapBand gap_band(const std::vector<const RunTrace*>& traces, const std::vector<double>& times_s);

/// Optimizer seconds until the evaluated gap first drops to `gap`; infinity if never.
double time_to_gap(const RunTrace& trace, double gap);

/// Fit of T(m) = max(a / m, b) by least squares over the regime split.
struct TwoRegimeFit {
  double a = 0.0, b = 0.0, r2 = 0.0;
};
TwoRegimeFit fit_two_regime(const std::vector<double>& m, const std::vector<double>& T);

// ---------------------------------------------------------------------------
// Output. Files are written from one thread after all runs finish.
// ---------------------------------------------------------------------------

void write_t_eps_csv(const TEpsResult& result, std::ostream& per_seed, std::ostream& summary);
void write_traces_csv(const TraceResult& result, std::ostream& os, bool with_time);
void write_timing_summary(const TraceResult& result, std::ostream& os);

/// Runs the configured experiment and writes its CSV files into cfg.out_dir.
/// Returns false when some seed had an unstable reference optimum.
bool run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace randsmooth

#endif
