#include "randsmooth/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace randsmooth {

double theta_next(double theta_prev) {
  if (!(theta_prev > 0.0 && theta_prev <= 1.0)) throw ConfigError("theta_next: theta outside (0, 1]");
  return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta_prev * theta_prev)));
}

long double ThetaSchedule::next(long double theta) {
  return 2.0L / (1.0L + std::sqrt(1.0L + 4.0L / (theta * theta)));
}

double ThetaSchedule::peek_next() const { return static_cast<double>(next(theta_)); }

void ThetaSchedule::advance() {
  theta_ = next(theta_);
  inverse_sum_ += 1.0L / theta_;
  ++t_;
}

long double ThetaSchedule::identity_residual() const {
  return std::fabs(inverse_sum_ - 1.0L / (theta_ * theta_));
}

bool ThetaSchedule::within_rate_bound() const {
  return theta_ <= 2.0L / static_cast<long double>(t_ + 2) * (1.0L + 1e-15L);
}

// ---------------------------------------------------------------------------

double StepConfig::eta() const {
  if (eta_scale > 0.0) return eta_scale;
  return smoothing.l0 / (radius_R * std::sqrt(static_cast<double>(m)));
}

void StepConfig::validate() const {
  if (m < 1) throw ConfigError("step config: m must be >= 1");
  if (T < 1) throw ConfigError("step config: T must be >= 1");
  if (!(radius_R > 0.0) || !std::isfinite(radius_R)) throw ConfigError("step config: R must be positive");
  if (!(lipschitz_scale > 0.0)) throw ConfigError("step config: lipschitz_scale must be positive");
  if (!(smoothing.base_radius > 0.0)) throw ConfigError("step config: smoothing radius must be positive");
}

double eta_schedule(std::int64_t t, const StepConfig& cfg) {
  if (t < 0) throw ConfigError("eta_schedule: t must be >= 0");
  return cfg.eta() * std::sqrt(static_cast<double>(t + 1));
}

double lipschitz_schedule(double theta_t, const StepConfig& cfg) {
  return cfg.lipschitz_scale * cfg.smoothing.l1_const / smoothing_radius(cfg.smoothing, theta_t);
}

AccelState AccelState::start(const Vector& x0) {
  AccelState s;
  s.x = x0;
  s.y = x0;
  s.z = x0;
  s.dual.s = Vector::Zero(x0.size());
  s.dual.A = 0.0;
  s.dual.c = 1.0;
  return s;
}

AccelState accel_step(const AccelState& state, const StochasticProblem& problem,
                      const Geometry& geom, const StepConfig& cfg, std::uint64_t seed,
                      StepInfo* info) {
  const double theta = state.theta.theta();
  if (std::fabs(static_cast<double>(state.theta.inverse_sum()) - state.dual.A - 1.0 / theta) >
      1e-9 * (1.0 + state.dual.A))
    throw ConfigError("accel_step: dual accumulator does not match theta schedule");

  AccelState next = state;
  const double u = smoothing_radius(cfg.smoothing, theta);
  next.y = (1.0 - theta) * state.x + theta * state.z;

  const SmoothedGradient sg = smoothed_gradient(problem, next.y, u, cfg.m, cfg.smoothing,
                                                SampleKey{seed, static_cast<std::uint64_t>(state.t)},
                                                cfg.threads);
  if (!sg.g.allFinite()) {
    std::ostringstream msg;
    msg << "accel_step: non-finite gradient estimate at t=" << state.t;
    throw NumericError(msg.str());
  }
  next.dual.s += sg.g / theta;
  next.dual.A += 1.0 / theta;

  next.theta.advance();
  const double theta_next_v = next.theta.theta();
  const double L_next = lipschitz_schedule(theta_next_v, cfg);
  const double eta_next = eta_schedule(state.t + 1, cfg);
  next.dual.c = L_next + eta_next / theta_next_v;

  const long double residual = next.theta.identity_residual();
  if (residual > std::max(1e-9L, 1e-15L * next.theta.inverse_sum()) || !next.theta.within_rate_bound())
    throw NumericError("accel_step: theta identities violated");
  // after t+1 accumulations A = sum_{tau <= t} 1/theta_tau = 1/theta_t^2
  if (std::fabs(next.dual.A - 1.0 / (theta * theta)) > 1e-9 * next.dual.A)
    throw NumericError("accel_step: sum 1/theta != 1/theta^2");

  next.z = solve_z_update(geom, next.dual);
  next.x = (1.0 - theta) * state.x + theta * next.z;
  next.t = state.t + 1;
  next.oracle_calls = state.oracle_calls + sg.oracle_calls;

  if (info) *info = StepInfo{u, L_next, eta_next, theta};
  return next;
}

namespace {

using Clock = std::chrono::steady_clock;

double composite_value(const StochasticProblem& problem, const Geometry& geom, const Vector& x) {
  return problem.exact_objective(x) + geom.regularizer_value(x);
}

void check_divergence(double gap, double initial_gap, const RunOptions& opts, std::int64_t t) {
  if (!std::isfinite(gap) || (initial_gap > 0.0 && gap > opts.divergence_factor * initial_gap)) {
    std::ostringstream msg;
    msg << "run diverged at t=" << t << " (gap " << gap << ", initial " << initial_gap << ")";
    throw NumericError(msg.str());
  }
}

}  // namespace

RunTrace run_accelerated(const StochasticProblem& problem, const Geometry& geom,
                         const StepConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
  cfg.validate();
  const Eigen::Index d = problem.dimension();
  const Vector x0 = opts.x0 ? *opts.x0 : geom.psi_minimizer(d);
  if (x0.size() != d) throw ConfigError("run_accelerated: x0 has wrong dimension");
  if (!geom.contains(x0)) throw ConfigError("run_accelerated: x0 outside the domain");

  RunTrace trace;
  trace.metadata["method"] = "accelerated";
  trace.metadata["seed"] = std::to_string(seed);
  trace.metadata["m"] = std::to_string(cfg.m);
  trace.metadata["T"] = std::to_string(cfg.T);
  trace.metadata["R"] = std::to_string(cfg.radius_R);
  trace.metadata["eta"] = std::to_string(cfg.eta());
  trace.metadata["u"] = std::to_string(cfg.smoothing.base_radius);
  trace.metadata["smoothing"] = to_string(cfg.smoothing.kind);
  trace.metadata["schedule"] = to_string(cfg.smoothing.schedule);
  trace.metadata["geometry"] = geom.describe();
  trace.metadata["psi_anchor"] = "origin";
  trace.metadata["f_ref"] = std::to_string(opts.f_ref);

  const double initial_gap = composite_value(problem, geom, x0) - opts.f_ref;
  trace.initial_gap = initial_gap;
  AccelState state = AccelState::start(x0);
  std::int64_t elapsed_ns = 0;
  const std::int64_t every = std::max<std::int64_t>(1, opts.eval_every);

  for (std::int64_t t = 0; t < cfg.T; ++t) {
    StepInfo info;
    const auto t0 = Clock::now();
    state = accel_step(state, problem, geom, cfg, seed, &info);
    elapsed_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

    if (state.t % every != 0 && state.t != cfg.T) continue;
    if (opts.check_feasibility && (!geom.contains(state.x) || !geom.contains(state.z))) {
      std::ostringstream msg;
      msg << "run_accelerated: infeasible iterate at t=" << state.t;
      throw NumericError(msg.str());
    }
    const double gap = composite_value(problem, geom, state.x) - opts.f_ref;
    check_divergence(gap, initial_gap, opts, state.t);
    trace.rows.push_back({state.t, info.u, info.L_next, info.eta_next, gap, state.oracle_calls, elapsed_ns});
    if (opts.stop_at_gap && gap <= *opts.stop_at_gap) break;
    if (opts.max_wall_ns && elapsed_ns >= *opts.max_wall_ns) break;
  }
  trace.x_final = state.x;
  trace.z_final = state.z;
  return trace;
}

RunTrace run_dual_averaging(const StochasticProblem& problem, const Geometry& geom,
                            const DualAveragingConfig& cfg, std::uint64_t seed,
                            const RunOptions& opts) {
  if (cfg.m < 1 || cfg.T < 1) throw ConfigError("dual averaging: m and T must be >= 1");
  if (!(cfg.l0 > 0.0) || !(cfg.radius_R > 0.0) || !(cfg.stepsize_scale > 0.0))
    throw ConfigError("dual averaging: l0, R and stepsize scale must be positive");
  const Eigen::Index d = problem.dimension();
  const Vector x0 = opts.x0 ? *opts.x0 : geom.psi_minimizer(d);
  if (!geom.contains(x0)) throw ConfigError("dual averaging: x0 outside the domain");

  RunTrace trace;
  trace.metadata["method"] = "dual_averaging";
  trace.metadata["seed"] = std::to_string(seed);
  trace.metadata["m"] = std::to_string(cfg.m);
  trace.metadata["T"] = std::to_string(cfg.T);
  trace.metadata["R"] = std::to_string(cfg.radius_R);
  trace.metadata["stepsize_scale"] = std::to_string(cfg.stepsize_scale);
  trace.metadata["report"] = cfg.report_average ? "average" : "last";
  trace.metadata["geometry"] = geom.describe();
  trace.metadata["f_ref"] = std::to_string(opts.f_ref);

  const double initial_gap = composite_value(problem, geom, x0) - opts.f_ref;
  trace.initial_gap = initial_gap;
  DualState dual{Vector::Zero(d), 0.0, 1.0};
  Vector x = x0;
  Vector average = Vector::Zero(d);
  std::uint64_t calls = 0;
  std::int64_t elapsed_ns = 0;
  const std::int64_t every = std::max<std::int64_t>(1, opts.eval_every);

  for (std::int64_t t = 0; t < cfg.T; ++t) {
    const auto t0 = Clock::now();
    const SmoothedGradient sg =
        averaged_subgradient(problem, x, cfg.m, SampleKey{seed, static_cast<std::uint64_t>(t)}, cfg.threads);
    if (!sg.g.allFinite()) throw NumericError("dual averaging: non-finite gradient estimate");
    dual.s += sg.g;
    dual.A += 1.0;
    const double alpha = cfg.stepsize_scale * cfg.radius_R / (cfg.l0 * std::sqrt(static_cast<double>(t + 1)));
    dual.c = 1.0 / alpha;
    x = solve_z_update(geom, dual);
    calls += sg.oracle_calls;
    const std::int64_t iter = t + 1;
    average += (x - average) / static_cast<double>(iter);
    elapsed_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

    if (iter % every != 0 && iter != cfg.T) continue;
    if (opts.check_feasibility && !geom.contains(x)) throw NumericError("dual averaging: infeasible iterate");
    const double gap = composite_value(problem, geom, cfg.report_average ? average : x) - opts.f_ref;
    check_divergence(gap, initial_gap, opts, iter);
    trace.rows.push_back({iter, 0.0, 0.0, 1.0 / alpha, gap, calls, elapsed_ns});
    if (opts.stop_at_gap && gap <= *opts.stop_at_gap) break;
    if (opts.max_wall_ns && elapsed_ns >= *opts.max_wall_ns) break;
  }
  trace.x_final = cfg.report_average ? average : x;
  trace.z_final = x;
  return trace;
}

}  // namespace randsmooth
