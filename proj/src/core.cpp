#include "randsmooth/core.hpp"

#include <cmath>

namespace randsmooth {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

SymMatrix::SymMatrix(Eigen::Index dim, Vector packed) : dim_(dim), packed_(std::move(packed)) {
  if (packed_.size() != packed_size(dim)) throw ConfigError("SymMatrix: packed size mismatch");
}

Eigen::Index SymMatrix::dim_from_packed(Eigen::Index size) {
  const auto d = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * size + 1.0) - 1.0) / 2.0));
  if (packed_size(d) != size) throw ConfigError("SymMatrix: size is not triangular");
  return d;
}

SymMatrix SymMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("SymMatrix: matrix not square");
  SymMatrix out(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) out.packed_[packed_index(i, j)] = kSqrt2 * m(i, j);
    out.packed_[packed_index(j, j)] = m(j, j);
  }
  return out;
}

Matrix SymMatrix::to_dense() const {
  Matrix m(dim_, dim_);
  for (Eigen::Index j = 0; j < dim_; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = packed_[packed_index(i, j)] / kSqrt2;
      m(i, j) = v;
      m(j, i) = v;
    }
    m(j, j) = packed_[packed_index(j, j)];
  }
  return m;
}

double SymMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
  if (i > j) std::swap(i, j);
  const double v = packed_[packed_index(i, j)];
  return i == j ? v : v / kSqrt2;
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < dim_; ++j) s += packed_[packed_index(j, j)];
  return s;
}

}  // namespace randsmooth
