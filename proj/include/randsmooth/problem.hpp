#ifndef RANDSMOOTH_PROBLEM_HPP
#define RANDSMOOTH_PROBLEM_HPP

#include "randsmooth/core.hpp"
#include "randsmooth/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace randsmooth {

/// Stochastic subgradient oracle for f(x) = (1/n) sum_i F(x; i).
///
/// Implementations hold immutable data after construction and must be safe
/// to call concurrently from several threads.
class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dimension() const = 0;
  virtual std::uint64_t component_count() const = 0;

  /// Uniform component draw.
  std::uint64_t draw(RngStream& rng) const { return rng.below(component_count()); }

  /// out += weight * g with g in the subdifferential of F(.; component) at x.
  virtual void add_subgradient(const Vector& x, std::uint64_t component, double weight,
                               Vector& out) const = 0;

  /// True when F(x; i) depends on x only through <a_i, x> for some
  /// direction a_i, so a perturbed query x + z needs only <a_i, z>.
  virtual bool single_index() const { return false; }

  /// Single-index problems only: out += weight * g with g a subgradient of
  /// F(.; component) at x + z, where <a_i, z> = offset(||a_i||_2).
  virtual void add_offset_subgradient(const Vector& x, std::uint64_t component, double weight, Vector& out,
                                      const std::function<double(double)>& offset) const;

  Vector subgradient(const Vector& x, std::uint64_t component) const {
    Vector g = Vector::Zero(dimension());
    add_subgradient(x, component, 1.0, g);
    return g;
  }

  /// The finite average (1/n) sum_i F(x; i).
  virtual double exact_objective(const Vector& x) const = 0;

  /// Bound on the dual norm of any oracle output, for the given dual norm.
  virtual double lipschitz_l0(Norm dual) const = 0;

  /// A known good point (e.g. the planted parameter), when the generator has one.
  virtual std::optional<Vector> planted_solution() const { return std::nullopt; }

  /// Closed-form minimizer, when one exists.
  virtual std::optional<Vector> exact_minimizer() const { return std::nullopt; }

  /// A known lower bound on the objective; a point attaining it is optimal.
  virtual double lower_bound() const { return -std::numeric_limits<double>::infinity(); }
};

}  // namespace randsmooth

#endif
