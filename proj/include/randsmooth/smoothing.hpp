#ifndef RANDSMOOTH_SMOOTHING_HPP
#define RANDSMOOTH_SMOOTHING_HPP

#include "randsmooth/core.hpp"
#include "randsmooth/problem.hpp"
#include "randsmooth/rng.hpp"

#include <cstdint>
#include <string>

namespace randsmooth {

enum class SmoothingKind { uniform_l2_ball, uniform_linf_ball, gaussian };
enum class ScheduleKind {
  anytime,  // u_t = theta_t * u
  fixed,    // u_t = u
};

SmoothingKind parse_smoothing_kind(const std::string& s);
ScheduleKind parse_schedule_kind(const std::string& s);
std::string to_string(SmoothingKind k);
std::string to_string(ScheduleKind k);

/// Smoothing distribution, radius and schedule together with the constants
/// they imply for an L0-Lipschitz objective in dimension `dim`.
///
/// `l0` is measured in the norm the distribution is matched to: l2 for the
/// uniform-ball and Gaussian kinds, l1 (gradients in linf) for the cube.
struct SmoothingSpec {
  SmoothingKind kind = SmoothingKind::uniform_l2_ball;
  double base_radius = 1.0;
  ScheduleKind schedule = ScheduleKind::anytime;
  double l0 = 1.0;
  double l1_const = 1.0;
  Eigen::Index dim = 1;
  /// For single-index oracles, draw only the scalar <a_i, Z> from its exact
  /// marginal instead of the full vector Z (l2 ball and Gaussian kinds).
  bool directional = true;

  static SmoothingSpec make(SmoothingKind kind, double base_radius, ScheduleKind schedule,
                            double l0, Eigen::Index dim);

  /// Upper bound on f_u(x) - f(x) at radius u.
  double uniform_gap(double u) const;

  /// The primal norm in which l1_const / u bounds the gradient Lipschitz constant.
  Norm primal_norm() const { return kind == SmoothingKind::uniform_linf_ball ? Norm::l1() : Norm::l2(); }
};

/// One draw of Z at unit scale: uniform on the unit l2 ball, uniform on
/// [-1, 1]^d, or standard normal.
Vector sample_perturbation(const SmoothingSpec& spec, Eigen::Index d, RngStream& rng);
/// The same draw written into z (size d).
void sample_perturbation_into(const SmoothingSpec& spec, RngStream& rng, Vector& z);

/// <e, Z> for a fixed unit vector e and Z of unit shape in dimension d:
/// standard normal, or the first coordinate of a uniform point in the unit
/// d-ball. The cube has no closed form and is rejected.
double sample_projection(const SmoothingSpec& spec, Eigen::Index d, RngStream& rng);

/// Whether smoothed_gradient takes the single-index shortcut.
bool uses_projection(const SmoothingSpec& spec, const StochasticProblem& problem);

/// u_t for the current theta_t.
double smoothing_radius(const SmoothingSpec& spec, double theta_t);

struct SmoothedGradient {
  Vector g;
  int m = 0;
  double u_t = 0.0;
  std::uint64_t oracle_calls = 0;
};

/// Identifies the random draws of one iteration: sample i uses
/// substream(seed, t, i, StreamTag::sample).
struct SampleKey {
  std::uint64_t seed = 0;
  std::uint64_t t = 0;
};

/// Mean of m subgradients g_i in dF(y + u_t Z_i; xi_i) with i.i.d. Z_i and
/// components xi_i. Sums are reduced in fixed-size blocks in index order, so
/// the result does not depend on `threads`. When uses_projection holds, only
/// <a_i, Z_i> is drawn; the estimator has the same distribution.
SmoothedGradient smoothed_gradient(const StochasticProblem& problem, const Vector& y, double u_t,
                                   int m, const SmoothingSpec& spec, SampleKey key,
                                   unsigned threads = 1);

/// Mean of m subgradients at y itself (no perturbation); the multi-query
/// oracle used by plain dual averaging.
SmoothedGradient averaged_subgradient(const StochasticProblem& problem, const Vector& y, int m,
                                      SampleKey key, unsigned threads = 1);

}  // namespace randsmooth

#endif
