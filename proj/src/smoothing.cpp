#include "randsmooth/smoothing.hpp"
#include "randsmooth/parallel.hpp"

#include <boost/random/chi_squared_distribution.hpp>

#include <cmath>
#include <vector>

namespace randsmooth {

void StochasticProblem::add_offset_subgradient(const Vector&, std::uint64_t, double, Vector&,
                                               const std::function<double(double)>&) const {
  throw Error(name() + ": oracle is not single-index");
}

SmoothingKind parse_smoothing_kind(const std::string& s) {
  if (s == "uniform_l2_ball" || s == "l2") return SmoothingKind::uniform_l2_ball;
  if (s == "uniform_linf_ball" || s == "linf") return SmoothingKind::uniform_linf_ball;
  if (s == "gaussian" || s == "normal") return SmoothingKind::gaussian;
  throw ConfigError("unknown smoothing kind: " + s);
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "anytime") return ScheduleKind::anytime;
  if (s == "fixed") return ScheduleKind::fixed;
  throw ConfigError("unknown schedule kind: " + s);
}

std::string to_string(SmoothingKind k) {
  switch (k) {
    case SmoothingKind::uniform_l2_ball: return "uniform_l2_ball";
    case SmoothingKind::uniform_linf_ball: return "uniform_linf_ball";
    case SmoothingKind::gaussian: return "gaussian";
  }
  return "?";
}

std::string to_string(ScheduleKind k) { return k == ScheduleKind::anytime ? "anytime" : "fixed"; }

SmoothingSpec SmoothingSpec::make(SmoothingKind kind, double base_radius, ScheduleKind schedule,
                                  double l0, Eigen::Index dim) {
  if (!(base_radius > 0.0) || !std::isfinite(base_radius))
    throw ConfigError("smoothing: base radius must be positive");
  if (!(l0 > 0.0)) throw ConfigError("smoothing: l0 must be positive");
  if (dim < 1) throw ConfigError("smoothing: dimension must be >= 1");
  SmoothingSpec s;
  s.kind = kind;
  s.base_radius = base_radius;
  s.schedule = schedule;
  s.l0 = l0;
  s.dim = dim;
  switch (kind) {
    case SmoothingKind::uniform_l2_ball: s.l1_const = l0 * std::sqrt(static_cast<double>(dim)); break;
    case SmoothingKind::uniform_linf_ball: s.l1_const = l0; break;
    case SmoothingKind::gaussian: s.l1_const = l0; break;
  }
  return s;
}

double SmoothingSpec::uniform_gap(double u) const {
  const auto d = static_cast<double>(dim);
  switch (kind) {
    case SmoothingKind::uniform_l2_ball: return l0 * u;
    case SmoothingKind::uniform_linf_ball: return l0 * d * u / 2.0;
    case SmoothingKind::gaussian: return l0 * u * std::sqrt(d);
  }
  return 0.0;
}

void sample_perturbation_into(const SmoothingSpec& spec, RngStream& rng, Vector& z) {
  const Eigen::Index d = z.size();
  if (d < 1) throw ConfigError("sample_perturbation: d must be >= 1");
  switch (spec.kind) {
    case SmoothingKind::gaussian:
      for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
      break;
    case SmoothingKind::uniform_linf_ball:
      for (Eigen::Index j = 0; j < d; ++j) z[j] = 2.0 * rng.uniform() - 1.0;
      break;
    case SmoothingKind::uniform_l2_ball: {
      double n2 = 0.0;
      do {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
        n2 = z.squaredNorm();
      } while (n2 == 0.0);
      const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      z *= radius / std::sqrt(n2);
      break;
    }
  }
}

Vector sample_perturbation(const SmoothingSpec& spec, Eigen::Index d, RngStream& rng) {
  if (d < 1) throw ConfigError("sample_perturbation: d must be >= 1");
  Vector z(d);
  sample_perturbation_into(spec, rng, z);
  return z;
}

double sample_projection(const SmoothingSpec& spec, Eigen::Index d, RngStream& rng) {
  if (d < 1) throw ConfigError("sample_projection: d must be >= 1");
  switch (spec.kind) {
    case SmoothingKind::gaussian: return rng.normal();
    case SmoothingKind::uniform_l2_ball: {
      // First coordinate of a uniform ball point: radius U^{1/d} times
      // G / ||(G, rest)|| with ||rest||^2 ~ chi^2_{d-1}.
      const double g = rng.normal();
      const double rest = d > 1 ? boost::random::chi_squared_distribution<double>(static_cast<double>(d - 1))(rng) : 0.0;
      const double len = std::sqrt(g * g + rest);
      const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      return len > 0.0 ? radius * g / len : 0.0;
    }
    case SmoothingKind::uniform_linf_ball: break;
  }
  throw ConfigError("sample_projection: no closed-form marginal for the cube");
}

bool uses_projection(const SmoothingSpec& spec, const StochasticProblem& problem) {
  return spec.directional && spec.kind != SmoothingKind::uniform_linf_ball && problem.single_index();
}

double smoothing_radius(const SmoothingSpec& spec, double theta_t) {
  if (!(theta_t > 0.0 && theta_t <= 1.0)) throw ConfigError("smoothing_radius: theta outside (0, 1]");
  return spec.schedule == ScheduleKind::anytime ? theta_t * spec.base_radius : spec.base_radius;
}

namespace {

constexpr int kBlock = 32;

// Shared reduction: block b accumulates samples [b*kBlock, (b+1)*kBlock),
// blocks are then summed in index order.
template <typename Sample>
Vector blocked_mean(const StochasticProblem& problem, int m, SampleKey key, unsigned threads, Sample&& sample) {
  const Eigen::Index d = problem.dimension();
  const int blocks = (m + kBlock - 1) / kBlock;
  std::vector<Vector> partial(static_cast<std::size_t>(blocks), Vector::Zero(d));
  auto run_block = [&](std::size_t b) {
    Vector& acc = partial[b];
    Vector buffer(d);
    const int lo = static_cast<int>(b) * kBlock;
    const int hi = std::min(m, lo + kBlock);
    for (int i = lo; i < hi; ++i) {
      RngStream rng = substream(key.seed, key.t, static_cast<std::uint64_t>(i), StreamTag::sample);
      const std::uint64_t component = problem.draw(rng);
      sample(rng, component, buffer, acc);
    }
  };
  // Spawning threads only pays off with enough blocks.
  parallel_for(static_cast<std::size_t>(blocks), blocks >= 8 ? threads : 1u, run_block);
  Vector g = Vector::Zero(d);
  for (const auto& p : partial) g += p;
  g /= static_cast<double>(m);
  return g;
}

}  // namespace

SmoothedGradient smoothed_gradient(const StochasticProblem& problem, const Vector& y, double u_t,
                                   int m, const SmoothingSpec& spec, SampleKey key, unsigned threads) {
  if (m <= 0) throw ConfigError("smoothed_gradient: m must be positive");
  if (!(u_t >= 0.0) || !std::isfinite(u_t)) throw ConfigError("smoothed_gradient: invalid radius");
  require_finite(y, "smoothed_gradient: query point");
  Vector g;
  if (uses_projection(spec, problem)) {
    const Eigen::Index d = problem.dimension();
    g = blocked_mean(problem, m, key, threads, [&](RngStream& rng, std::uint64_t component, Vector&, Vector& acc) {
      const std::function<double(double)> offset = [&](double len) {
        return u_t * len * sample_projection(spec, d, rng);
      };
      problem.add_offset_subgradient(y, component, 1.0, acc, offset);
    });
  } else {
    g = blocked_mean(problem, m, key, threads, [&](RngStream& rng, std::uint64_t component, Vector& point, Vector& acc) {
      sample_perturbation_into(spec, rng, point);
      point = y + u_t * point;
      problem.add_subgradient(point, component, 1.0, acc);
    });
  }
  return {std::move(g), m, u_t, static_cast<std::uint64_t>(m)};
}

SmoothedGradient averaged_subgradient(const StochasticProblem& problem, const Vector& y, int m,
                                      SampleKey key, unsigned threads) {
  if (m <= 0) throw ConfigError("averaged_subgradient: m must be positive");
  require_finite(y, "averaged_subgradient: query point");
  Vector g = blocked_mean(problem, m, key, threads, 
                           [&](RngStream&, std::uint64_t component, Vector&, Vector& acc) {
                             problem.add_subgradient(y, component, 1.0, acc);
                           });
  return {std::move(g), m, 0.0, static_cast<std::uint64_t>(m)};
}

}  // namespace randsmooth
