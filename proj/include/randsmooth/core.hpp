#ifndef RANDSMOOTH_CORE_HPP
#define RANDSMOOTH_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace randsmooth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on invalid arguments or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterate or oracle output stops being finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class NormKind { l1, l2, linf, lp };

/// A norm selector; `p` is only read for NormKind::lp.
struct Norm {
  NormKind kind = NormKind::l2;
  double p = 2.0;

  static Norm l1() { return {NormKind::l1, 1.0}; }
  static Norm l2() { return {NormKind::l2, 2.0}; }
  static Norm linf() { return {NormKind::linf, INFINITY}; }
  static Norm lp(double p) { return {NormKind::lp, p}; }

  /// The dual norm (q with 1/p + 1/q = 1).
  Norm dual() const {
    switch (kind) {
      case NormKind::l1: return linf();
      case NormKind::linf: return l1();
      case NormKind::l2: return l2();
      case NormKind::lp: return lp(p / (p - 1.0));
    }
    return l2();
  }
};

/// Conjugate exponent q of p, 1/p + 1/q = 1.
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (!v.allFinite()) throw NumericError(std::string(what) + ": non-finite entry");
}

/// sign with sign(0) = 0.
template <typename Scalar>
Scalar sign(Scalar v) {
  return static_cast<Scalar>((Scalar(0) < v) - (v < Scalar(0)));
}

template <typename Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& v, Norm which) {
  using Scalar = typename Derived::Scalar;
  require_finite(v, "norm");
  switch (which.kind) {
    case NormKind::l1: return v.template lpNorm<1>();
    case NormKind::l2: return v.norm();
    case NormKind::linf: return v.size() == 0 ? Scalar(0) : v.template lpNorm<Eigen::Infinity>();
    case NormKind::lp: {
      if (!(which.p > 1.0)) throw ConfigError("norm: lp requires p > 1");
      const Scalar amax = v.size() == 0 ? Scalar(0) : v.template lpNorm<Eigen::Infinity>();
      if (amax == Scalar(0)) return Scalar(0);
      // scaled to avoid overflow of |v|^p
      const Scalar p = static_cast<Scalar>(which.p);
      return amax * std::pow((v.array().abs() / amax).pow(p).sum(), Scalar(1) / p);
    }
  }
  return Scalar(0);
}

/// Symmetric d x d matrix stored as a scaled packed upper triangle (svec):
/// diagonal entries as-is, off-diagonal entries multiplied by sqrt(2), so
/// that the Euclidean inner product of two packings equals tr(AB). This lets
/// matrix iterates live in a plain Vector.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::Index dim) : dim_(dim), packed_(Vector::Zero(packed_size(dim))) {}
  SymMatrix(Eigen::Index dim, Vector packed);

  static Eigen::Index packed_size(Eigen::Index dim) { return dim * (dim + 1) / 2; }
  /// Inverse of packed_size; throws if `size` is not triangular.
  static Eigen::Index dim_from_packed(Eigen::Index size);

  /// Packs the upper triangle of `m`; the lower triangle is ignored.
  static SymMatrix from_dense(const Matrix& m);
  Matrix to_dense() const;

  Eigen::Index dim() const { return dim_; }
  const Vector& packed() const { return packed_; }
  Vector& packed() { return packed_; }

  double operator()(Eigen::Index i, Eigen::Index j) const;
  double trace() const;

 private:
  Eigen::Index dim_ = 0;
  Vector packed_;
};

/// Index of (i, j), i <= j, inside a packed upper triangle (column-major).
inline Eigen::Index packed_index(Eigen::Index i, Eigen::Index j) { return j * (j + 1) / 2 + i; }

}  // namespace randsmooth

#endif
