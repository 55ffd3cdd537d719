#ifndef RANDSMOOTH_TESTS_TOY_PROBLEMS_HPP
#define RANDSMOOTH_TESTS_TOY_PROBLEMS_HPP

#include "randsmooth/problem.hpp"

#include <cmath>

namespace rstest {

/// f(x) = ||x||_1 or ||x||_2 as a one-component stochastic problem.
class NormObjective final : public randsmooth::StochasticProblem {
 public:
  enum Kind { l1, l2 };
  NormObjective(Kind kind, Eigen::Index d) : kind_(kind), d_(d) {}

  std::string name() const override { return kind_ == l1 ? "l1_norm" : "l2_norm"; }
  Eigen::Index dimension() const override { return d_; }
  std::uint64_t component_count() const override { return 1; }
  void add_subgradient(const randsmooth::Vector& x, std::uint64_t, double weight,
                       randsmooth::Vector& out) const override {
    if (kind_ == l1) {
      out += weight * x.unaryExpr([](double v) { return randsmooth::sign(v); });
    } else {
      const double n = x.norm();
      if (n > 0.0) out += weight * x / n;
    }
  }
  double exact_objective(const randsmooth::Vector& x) const override {
    return kind_ == l1 ? x.lpNorm<1>() : x.norm();
  }
  double lipschitz_l0(randsmooth::Norm dual) const override {
    const auto d = static_cast<double>(d_);
    if (kind_ == l2) return dual.kind == randsmooth::NormKind::l1 ? std::sqrt(d) : 1.0;
    switch (dual.kind) {
      case randsmooth::NormKind::linf: return 1.0;
      case randsmooth::NormKind::l2: return std::sqrt(d);
      case randsmooth::NormKind::l1: return d;
      case randsmooth::NormKind::lp: return std::pow(d, 1.0 / dual.p);
    }
    return d;
  }
  double lower_bound() const override { return 0.0; }

 private:
  Kind kind_;
  Eigen::Index d_;
};

/// F identically 0: every oracle output is the zero vector.
class ZeroObjective final : public randsmooth::StochasticProblem {
 public:
  explicit ZeroObjective(Eigen::Index d) : d_(d) {}
  std::string name() const override { return "zero"; }
  Eigen::Index dimension() const override { return d_; }
  std::uint64_t component_count() const override { return 3; }
  void add_subgradient(const randsmooth::Vector&, std::uint64_t, double, randsmooth::Vector&) const override {}
  double exact_objective(const randsmooth::Vector&) const override { return 0.0; }
  double lipschitz_l0(randsmooth::Norm) const override { return 1.0; }

 private:
  Eigen::Index d_;
};

}  // namespace rstest

#endif
