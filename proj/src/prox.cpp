#include "randsmooth/prox.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace randsmooth {

SymMatrix prox_psd_trace(const SymMatrix& V, double C) {
  if (!(C > 0.0)) throw ConfigError("prox_psd_trace: C must be positive");
  require_finite(V.packed(), "prox_psd_trace");
  const Matrix dense = V.to_dense();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dense);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "prox_psd_trace: eigensolver failed (d=" << dense.rows()
        << ", max|entry|=" << dense.cwiseAbs().maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  const Vector lambda = project_simplex(eig.eigenvalues(), C);
  const Matrix& Q = eig.eigenvectors();
  return SymMatrix::from_dense(Q * lambda.asDiagonal() * Q.transpose());
}

// ---------------------------------------------------------------------------

Geometry::Domain Geometry::l2_ball(double radius) {
  if (!(radius > 0.0)) throw ConfigError("l2_ball: radius must be positive");
  Domain d;
  d.kind = DomainKind::l2_ball;
  d.radius = radius;
  return d;
}

Geometry::Domain Geometry::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw ConfigError("box: bound sizes differ");
  if ((lo.array() > hi.array()).any()) throw ConfigError("box: lo > hi");
  Domain d;
  d.kind = DomainKind::box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Geometry::Domain Geometry::simplex(double C) {
  if (!(C > 0.0)) throw ConfigError("simplex: C must be positive");
  Domain d;
  d.kind = DomainKind::simplex_ineq;
  d.bound = C;
  return d;
}

Geometry::Domain Geometry::psd_trace(double C) {
  if (!(C > 0.0)) throw ConfigError("psd_trace: C must be positive");
  Domain d;
  d.kind = DomainKind::psd_trace;
  d.bound = C;
  return d;
}

Geometry Geometry::euclidean(Domain domain, RegularizerKind reg, double lambda) {
  if (reg == RegularizerKind::l1) {
    if (!(lambda >= 0.0)) throw ConfigError("l1 regularizer: lambda must be >= 0");
    if (domain.kind == DomainKind::l2_ball || domain.kind == DomainKind::psd_trace)
      throw ConfigError("unsupported geometry: l1 regularizer with l2_ball/psd_trace domain");
  }
  Geometry g;
  g.psi_ = PsiKind::euclidean_half_sq;
  g.domain_ = std::move(domain);
  g.reg_ = reg;
  g.lambda_ = reg == RegularizerKind::l1 ? lambda : 0.0;
  return g;
}

Geometry Geometry::lp(double p, RegularizerKind reg, double lambda) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("lp geometry: p must lie in (1, 2]");
  if (reg == RegularizerKind::l1 && !(lambda >= 0.0))
    throw ConfigError("l1 regularizer: lambda must be >= 0");
  Geometry g;
  g.psi_ = PsiKind::lp_norm_sq;
  g.p_ = p;
  g.reg_ = reg;
  g.lambda_ = reg == RegularizerKind::l1 ? lambda : 0.0;
  return g;
}

double Geometry::default_lp_exponent(Eigen::Index d) {
  if (d < 3) throw ConfigError("default_lp_exponent: needs d >= 3");
  return 1.0 + 1.0 / std::log(static_cast<double>(d));
}

double Geometry::psi(const Vector& x) const {
  return psi_ == PsiKind::euclidean_half_sq ? 0.5 * x.squaredNorm() : lp_psi(x, p_);
}

double Geometry::regularizer_value(const Vector& x) const {
  return reg_ == RegularizerKind::l1 ? lambda_ * x.lpNorm<1>() : 0.0;
}

bool Geometry::contains(const Vector& x, double tol) const {
  if (!x.allFinite()) return false;
  switch (domain_.kind) {
    case DomainKind::unconstrained: return true;
    case DomainKind::l2_ball: return x.norm() <= domain_.radius + tol;
    case DomainKind::box:
      return x.size() == domain_.lo.size() && (x.array() >= domain_.lo.array() - tol).all() &&
             (x.array() <= domain_.hi.array() + tol).all();
    case DomainKind::simplex_ineq: return x.minCoeff() >= -tol && x.sum() <= domain_.bound + tol;
    case DomainKind::psd_trace: {
      const SymMatrix X(SymMatrix::dim_from_packed(x.size()), x);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(X.to_dense(), Eigen::EigenvaluesOnly);
      return eig.eigenvalues().minCoeff() >= -tol && X.trace() <= domain_.bound + tol;
    }
  }
  return false;
}

double Geometry::domain_radius(Eigen::Index d) const {
  (void)d;
  switch (domain_.kind) {
    case DomainKind::unconstrained: return std::numeric_limits<double>::infinity();
    case DomainKind::l2_ball: return domain_.radius;
    case DomainKind::box: {
      const Vector far = domain_.lo.cwiseAbs().cwiseMax(domain_.hi.cwiseAbs());
      return norm(far, matched_norm());
    }
    // a nonnegative vector (or psd matrix) with sum (trace) C has l2 (Frobenius) norm <= C
    case DomainKind::simplex_ineq:
    case DomainKind::psd_trace: return domain_.bound;
  }
  return std::numeric_limits<double>::infinity();
}

Vector Geometry::psi_minimizer(Eigen::Index d) const {
  DualState zero{Vector::Zero(d), 0.0, 1.0};
  return solve_z_update(*this, zero);
}

std::string Geometry::describe() const {
  std::ostringstream os;
  os << (psi_ == PsiKind::euclidean_half_sq ? "euclidean" : "lp(p=" + std::to_string(p_) + ")");
  switch (domain_.kind) {
    case DomainKind::unconstrained: os << "/unconstrained"; break;
    case DomainKind::l2_ball: os << "/l2_ball(" << domain_.radius << ")"; break;
    case DomainKind::box: os << "/box"; break;
    case DomainKind::simplex_ineq: os << "/simplex(" << domain_.bound << ")"; break;
    case DomainKind::psd_trace: os << "/psd_trace(" << domain_.bound << ")"; break;
  }
  if (reg_ == RegularizerKind::l1) os << "/l1(" << lambda_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

Vector solve_z_update(const Geometry& geom, const DualState& state) {
  if (!(state.c > 0.0) || !std::isfinite(state.c)) throw NumericError("solve_z_update: c must be positive");
  require_finite(state.s, "solve_z_update: s");
  const double c = state.c;
  const double shrink = geom.regularizer() == RegularizerKind::l1 ? state.A * geom.lambda() : 0.0;
  const auto& dom = geom.domain();

  if (geom.psi_kind() == PsiKind::lp_norm_sq) {
    // Shrinking the linear term by A*lambda before the link handles the l1
    // term: on each coordinate either |s_j| <= A*lambda and x_j = 0, or x_j
    // has the sign of -s_j and the subgradient of |x_j| is fixed.
    const Vector s = shrink > 0.0 ? Vector(soft_threshold(state.s, shrink)) : state.s;
    return lp_link(Vector(-s / c), geom.p());
  }

  switch (dom.kind) {
    case DomainKind::unconstrained:
      if (shrink > 0.0) return -soft_threshold(state.s, shrink) / c;
      return -state.s / c;
    case DomainKind::l2_ball:
      return -state.s / std::max(c, state.s.norm() / dom.radius);
    case DomainKind::box: {
      if (dom.lo.size() != state.s.size()) throw ConfigError("solve_z_update: box size mismatch");
      // separable: clamp of each coordinate's unconstrained minimizer
      const Vector s = shrink > 0.0 ? Vector(soft_threshold(state.s, shrink)) : state.s;
      return prox_box(s, c, dom.lo, dom.hi);
    }
    case DomainKind::simplex_ineq: {
      // on x >= 0 the l1 term is linear: lambda * sum(x)
      const Vector s = (state.s.array() + shrink).matrix();
      return project_simplex(Vector(-s / c), dom.bound);
    }
    case DomainKind::psd_trace: {
      const Eigen::Index d = SymMatrix::dim_from_packed(state.s.size());
      return prox_psd_trace(SymMatrix(d, -state.s / c), dom.bound).packed();
    }
  }
  throw ConfigError("solve_z_update: unsupported geometry");
}

}  // namespace randsmooth
