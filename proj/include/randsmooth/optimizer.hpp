#ifndef RANDSMOOTH_OPTIMIZER_HPP
#define RANDSMOOTH_OPTIMIZER_HPP

#include "randsmooth/core.hpp"
#include "randsmooth/problem.hpp"
#include "randsmooth/prox.hpp"
#include "randsmooth/smoothing.hpp"
#include "randsmooth/trace.hpp"

#include <cstdint>
#include <optional>

namespace randsmooth {

/// theta_t = 2 / (1 + sqrt(1 + 4 / theta_{t-1}^2)).
double theta_next(double theta_prev);

/// theta_t with theta_0 = 1, kept in extended precision together with the
/// running sum of 1/theta_tau so that the identity
///   sum_{tau <= t} 1/theta_tau = 1/theta_t^2
/// can be asserted to 1e-9 in absolute terms for t up to 1e4 and beyond.
class ThetaSchedule {
 public:
  double theta() const { return static_cast<double>(theta_); }
  std::int64_t t() const { return t_; }
  /// sum_{tau <= t} 1/theta_tau
  long double inverse_sum() const { return inverse_sum_; }
  long double theta_extended() const { return theta_; }
  /// theta_{t+1} without advancing.
  double peek_next() const;
  void advance();
  /// |sum 1/theta - 1/theta^2| and whether theta_t <= 2/(t+2).
  long double identity_residual() const;
  bool within_rate_bound() const;

 private:
  static long double next(long double theta);
  long double theta_ = 1.0L;
  long double inverse_sum_ = 1.0L;
  std::int64_t t_ = 0;
};

struct StepConfig {
  /// eta in eta_t = eta * sqrt(t + 1); <= 0 selects l0 / (radius_R sqrt(m)).
  double eta_scale = 0.0;
  int m = 1;
  std::int64_t T = 100;
  SmoothingSpec smoothing;
  double radius_R = 1.0;
  unsigned threads = 1;
  /// Multiplies L_t = l1_const / u_t; 1 follows the schedule exactly.
  double lipschitz_scale = 1.0;

  double eta() const;
  void validate() const;
};

/// eta_t = eta * sqrt(t + 1).
double eta_schedule(std::int64_t t, const StepConfig& cfg);

/// L_t = l1_const / u_t for the radius u_t at theta_t.
double lipschitz_schedule(double theta_t, const StepConfig& cfg);

struct AccelState {
  Vector x, y, z;
  DualState dual;
  ThetaSchedule theta;
  std::int64_t t = 0;
  std::uint64_t oracle_calls = 0;

  /// x_0 = z_0 = start, empty accumulators.
  static AccelState start(const Vector& x0);
};

/// Scalars used by one accel_step, for tracing.
struct StepInfo {
  double u = 0.0;       // u_t at the query point y_t
  double L_next = 0.0;  // L_{t+1}
  double eta_next = 0.0;
  double theta = 0.0;   // theta_t
};

/// One iteration of the three-sequence method:
///   y_t = (1 - theta_t) x_t + theta_t z_t
///   g_t = smoothed gradient at y_t with radius u_t, m samples
///   s += g_t / theta_t, A += 1 / theta_t
///   z_{t+1} = argmin <s, x> + A r(x) + (L_{t+1} + eta_{t+1}/theta_{t+1}) psi(x)
///   x_{t+1} = (1 - theta_t) x_t + theta_t z_{t+1}
/// Randomness comes from substream(seed, t, i, sample).
AccelState accel_step(const AccelState& state, const StochasticProblem& problem,
                      const Geometry& geom, const StepConfig& cfg, std::uint64_t seed,
                      StepInfo* info = nullptr);

struct RunOptions {
  /// Reference optimum used for the gap column; gap = f(x) + r(x) - f_ref.
  double f_ref = 0.0;
  /// Evaluate the gap every k iterations (and at the last one).
  std::int64_t eval_every = 1;
  /// Stop as soon as an evaluated gap is <= this value.
  std::optional<double> stop_at_gap;
  /// Check x_t and z_t against the domain at every evaluated iterate.
  bool check_feasibility = true;
  std::optional<Vector> x0;
  /// Abort when the gap exceeds this multiple of the initial gap.
  double divergence_factor = 1e6;
  /// Stop once the optimizer time exceeds this many nanoseconds.
  std::optional<std::int64_t> max_wall_ns;
};

RunTrace run_accelerated(const StochasticProblem& problem, const Geometry& geom,
                         const StepConfig& cfg, std::uint64_t seed, const RunOptions& opts = {});

struct DualAveragingConfig {
  int m = 1;
  std::int64_t T = 100;
  double l0 = 1.0;
  double radius_R = 1.0;
  /// alpha_t = stepsize_scale * radius_R / (l0 sqrt(t + 1)).
  double stepsize_scale = 1.0;
  unsigned threads = 1;
  /// Report the running average of x_1..x_t (default) or the iterate x_t.
  bool report_average = true;
};

/// Plain dual averaging with g_t the mean of m oracle queries at x_t:
///   x_{t+1} = argmin <sum g, x> + (t+1) r(x) + psi(x) / alpha_t.
/// The gap column and x_final refer to the running average of x_1..x_t.
RunTrace run_dual_averaging(const StochasticProblem& problem, const Geometry& geom,
                            const DualAveragingConfig& cfg, std::uint64_t seed,
                            const RunOptions& opts = {});

}  // namespace randsmooth

#endif
