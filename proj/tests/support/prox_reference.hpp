#ifndef RANDSMOOTH_TESTS_PROX_REFERENCE_HPP
#define RANDSMOOTH_TESTS_PROX_REFERENCE_HPP

#include "randsmooth/prox.hpp"

#include <functional>
#include <vector>

// Reference minimizers built from different algorithms than the library:
// KKT enumeration, bisection on multipliers, coordinate descent with
// bisection on one-sided derivatives, and zooming grid search.
namespace rstest {

using randsmooth::Matrix;
using randsmooth::Vector;

/// Projection onto {x >= 0, sum x <= C} by trying every support set and
/// keeping the point that satisfies the KKT conditions. d <= 12.
Vector simplex_kkt(const Vector& v, double C);

/// The same projection by bisection on the multiplier of the sum constraint,
/// in long double.
Vector simplex_bisection(const Vector& v, double C);

/// Projection onto {X psd, tr X <= C}: long double eigendecomposition and
/// bisection on the trace multiplier.
Matrix psd_trace_reference(const Matrix& V, double C);

/// Largest violation of feasibility and of the variational inequality
/// <V - X, Y - X> <= 0 for all feasible Y. For a feasible X the distance to
/// the projection is at most sqrt of the returned value.
double psd_trace_certificate(const Matrix& V, const Matrix& X, double C);

/// Minimizer of a convex function of one variable on [lo, hi] (either may be
/// infinite), from its one-sided derivatives. `slope(t, +1)` is the right
/// derivative, `slope(t, -1)` the left one.
double minimize_convex_1d(const std::function<double(double, int)>& slope, double lo, double hi);

/// Independent minimizer of <s, x> + A r(x) + c psi(x) over the domain.
Vector z_update_reference(const randsmooth::Geometry& geom, const randsmooth::DualState& state);

/// The z-update objective, evaluated without the library's helpers.
double z_update_objective(const randsmooth::Geometry& geom, const randsmooth::DualState& state,
                          const Vector& x);

/// Independent feasibility test.
bool feasible(const randsmooth::Geometry& geom, const Vector& x, double tol = 1e-12);

/// Minimizes `f` over `feasible` points of [center - half, center + half]^n
/// (n <= 3) on grids of `points` per axis, zooming in around the best point
/// after each level.
Vector grid_minimize(const std::function<double(const Vector&)>& f,
                     const std::function<bool(const Vector&)>& feasible, Vector center, double half,
                     int points = 200, int levels = 4);

/// Minimizes `f` over the box [lo, hi] (dimension <= 3) on grids of `points`
/// per axis, zooming in around the best point after each level and clipping
/// the window to the box. Curved feasible sets are handled by gridding a
/// parametrization whose boundary is a box face.
Vector grid_minimize_box(const std::function<double(const Vector&)>& f, const Vector& lo, const Vector& hi,
                         int points = 200, int levels = 5);

/// One geometry per constructible combination of psi, domain and
/// regularizer in dimension d; with `matrix_domain` the psd-trace domains,
/// for d a packed size.
std::vector<randsmooth::Geometry> all_geometries(Eigen::Index d, bool matrix_domain);

/// Polar map (r, phi) -> (r cos phi, r sin phi).
Vector polar_point(const Vector& rphi);

/// (s, w, phi) -> packed R(phi) diag(w s, (1 - w) s) R(phi)^T: every 2 x 2 psd
/// matrix with trace s.
Vector psd2_point(const Vector& swphi);

/// grad psi for psi(x) = ||x||_p^2 / (2 (p - 1)), in long double.
Vector lp_psi_gradient_reference(const Vector& x, double p);

}  // namespace rstest

#endif
