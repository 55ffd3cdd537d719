#ifndef RANDSMOOTH_PROX_HPP
#define RANDSMOOTH_PROX_HPP

#include "randsmooth/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace randsmooth {

// ---------------------------------------------------------------------------
// Elementary proximal maps
// ---------------------------------------------------------------------------

/// Euclidean projection onto {x >= 0, sum(x) <= C}. Sort-based, O(d log d).
template <typename Derived>
typename Derived::PlainObject project_simplex(const Eigen::MatrixBase<Derived>& v,
                                              typename Derived::Scalar C) {
  using Scalar = typename Derived::Scalar;
  using Plain = typename Derived::PlainObject;
  if (!(C > Scalar(0))) throw ConfigError("project_simplex: C must be positive");
  Plain clipped = v.cwiseMax(Scalar(0));
  if (clipped.sum() <= C) return clipped;

  const Plain dense = v;
  std::vector<Scalar> sorted(dense.data(), dense.data() + dense.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar cumulative = 0;
  Scalar tau = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const Scalar candidate = (cumulative - C) / static_cast<Scalar>(k + 1);
    if (sorted[k] - candidate > Scalar(0)) tau = candidate;
    else break;
  }
  return (v.array() - tau).max(Scalar(0)).matrix();
}

/// argmin_x <s, x> + (c/2)||x||^2 over lo <= x <= hi, i.e. clamp(-s/c).
template <typename D1, typename D2, typename D3>
typename D1::PlainObject prox_box(const Eigen::MatrixBase<D1>& s, typename D1::Scalar c,
                                  const Eigen::MatrixBase<D2>& lo, const Eigen::MatrixBase<D3>& hi) {
  if (!(c > 0)) throw ConfigError("prox_box: c must be positive");
  if (lo.size() != s.size() || hi.size() != s.size()) throw ConfigError("prox_box: size mismatch");
  if ((lo.array() > hi.array()).any()) throw ConfigError("prox_box: lo > hi");
  return (-s / c).cwiseMax(lo).cwiseMin(hi);
}

/// Coordinatewise soft threshold sign(v) * max(|v| - t, 0).
template <typename Derived>
typename Derived::PlainObject soft_threshold(const Eigen::MatrixBase<Derived>& v,
                                             typename Derived::Scalar t) {
  return (v.array().sign() * (v.array().abs() - t).max(typename Derived::Scalar(0))).matrix();
}

/// psi(x) = ||x||_p^2 / (2 (p - 1)).
template <typename Derived>
typename Derived::Scalar lp_psi(const Eigen::MatrixBase<Derived>& x, double p) {
  const auto n = norm(x, Norm::lp(p));
  return n * n / (2.0 * (p - 1.0));
}

/// Gradient of lp_psi: ||x||_p^{2-p} sign(x) |x|^{p-1} / (p - 1).
template <typename Derived>
typename Derived::PlainObject lp_psi_gradient(const Eigen::MatrixBase<Derived>& x, double p) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = norm(x, Norm::lp(p));
  if (n == Scalar(0)) return Derived::PlainObject::Zero(x.size());
  // divide by n first to keep |x/n| <= 1
  const auto scaled = (x.array() / n);
  return (n * scaled.sign() * scaled.abs().pow(p - 1.0) / (p - 1.0)).matrix();
}

/// Inverse of lp_psi_gradient: the x with grad psi(x) = theta, equivalently
/// the unconstrained minimizer of <-theta, x> + psi(x). With q = p/(p-1),
/// x = (p - 1) ||theta||_q^{2-q} sign(theta) |theta|^{q-1}.
template <typename Derived>
typename Derived::PlainObject lp_link(const Eigen::MatrixBase<Derived>& theta, double p) {
  using Scalar = typename Derived::Scalar;
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("lp_link: p must lie in (1, 2]");
  const double q = conjugate_exponent(p);
  const Scalar n = norm(theta, Norm::lp(q));
  if (n == Scalar(0)) return Derived::PlainObject::Zero(theta.size());
  const auto scaled = (theta.array() / n);
  return ((p - 1.0) * n * scaled.sign() * scaled.abs().pow(q - 1.0)).matrix();
}

/// Projection of a symmetric matrix onto {X psd, tr(X) <= C}: eigenvalues are
/// projected onto the simplex and the eigenvectors kept. O(d^3).
SymMatrix prox_psd_trace(const SymMatrix& V, double C);

// ---------------------------------------------------------------------------
// Geometry and the z-update
// ---------------------------------------------------------------------------

enum class PsiKind { euclidean_half_sq, lp_norm_sq };
enum class DomainKind { unconstrained, l2_ball, box, simplex_ineq, psd_trace };
enum class RegularizerKind { none, l1 };

struct GeometryDomain {
  DomainKind kind = DomainKind::unconstrained;
  double radius = 0.0;  // l2_ball
  Vector lo, hi;        // box
  double bound = 0.0;   // simplex_ineq / psd_trace: C
};

/// Prox function, feasible set and regularizer of the z-update. Only the
/// combinations solve_z_update can handle exactly are constructible.
class Geometry {
 public:
  using Domain = GeometryDomain;

  static Geometry euclidean(Domain domain = {}, RegularizerKind reg = RegularizerKind::none,
                            double lambda = 0.0);
  static Geometry lp(double p, RegularizerKind reg = RegularizerKind::none, double lambda = 0.0);
  /// p = 1 + 1/log(d), the choice for sparse geometry in dimension d >= 3.
  static double default_lp_exponent(Eigen::Index d);

  static Domain unconstrained() { return {}; }
  static Domain l2_ball(double radius);
  static Domain box(Vector lo, Vector hi);
  static Domain simplex(double C);
  static Domain psd_trace(double C);

  PsiKind psi_kind() const { return psi_; }
  double p() const { return p_; }
  const Domain& domain() const { return domain_; }
  RegularizerKind regularizer() const { return reg_; }
  double lambda() const { return lambda_; }

  double psi(const Vector& x) const;
  double regularizer_value(const Vector& x) const;
  /// Norm in which psi is 1-strongly convex.
  Norm matched_norm() const { return psi_ == PsiKind::euclidean_half_sq ? Norm::l2() : Norm::lp(p_); }
  bool contains(const Vector& x, double tol = 1e-9) const;
  /// Largest matched-norm length of a feasible point; infinite if unbounded.
  double domain_radius(Eigen::Index d) const;
  /// argmin of psi over the domain; the default starting point.
  Vector psi_minimizer(Eigen::Index d) const;
  std::string describe() const;

 private:
  PsiKind psi_ = PsiKind::euclidean_half_sq;
  double p_ = 2.0;
  Domain domain_;
  RegularizerKind reg_ = RegularizerKind::none;
  double lambda_ = 0.0;
};

/// Accumulated linear term of the z-update:
///   s = sum_tau g_tau / theta_tau,  A = sum_tau 1 / theta_tau,
///   c = L_{t+1} + eta_{t+1} / theta_{t+1}.
struct DualState {
  Vector s;
  double A = 0.0;
  double c = 1.0;
};

/// Exact minimizer of <s, x> + A r(x) + c psi(x) over the domain.
Vector solve_z_update(const Geometry& geom, const DualState& state);

}  // namespace randsmooth

#endif
