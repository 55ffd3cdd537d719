#ifndef RANDSMOOTH_PROBLEMS_HPP
#define RANDSMOOTH_PROBLEMS_HPP

#include "randsmooth/core.hpp"
#include "randsmooth/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace randsmooth {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// f(x) = (1/n) ||Ax - b||_1 with rows of fixed l2 norm L0.
class RobustRegression final : public StochasticProblem {
 public:
  RobustRegression(RowMatrix A, Vector b, Vector planted, double noise_sd);

  std::string name() const override { return "robust_regression"; }
  Eigen::Index dimension() const override { return A_.cols(); }
  std::uint64_t component_count() const override { return static_cast<std::uint64_t>(A_.rows()); }
  /// out += weight * sign(<a_i, x> - b_i) a_i, sign(0) = 0.
  void add_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out) const override;
  bool single_index() const override { return true; }
  void add_offset_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out,
                              const std::function<double(double)>& offset) const override;
  double exact_objective(const Vector& x) const override;
  double lipschitz_l0(Norm dual) const override;
  std::optional<Vector> planted_solution() const override { return planted_; }
  double lower_bound() const override { return 0.0; }

  const RowMatrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double row_norm() const { return row_norm_; }
  double noise_sd() const { return noise_sd_; }

 private:
  RowMatrix A_;
  Vector b_;
  Vector planted_;
  double noise_sd_;
  double row_norm_;
};

/// Rows uniform on the radius-L0 sphere, b = A w + N(0, noise_sd^2) with
/// w ~ N(0, I).
RobustRegression gen_robust_regression(std::int64_t n, std::int64_t d, double noise_sd, double L0,
                                       std::uint64_t seed);

/// f(x) = (1/n) sum_i ||x - a_i||_1 with a_i in {-1, +1}^d.
class L1Centroid final : public StochasticProblem {
 public:
  explicit L1Centroid(RowMatrix points);

  std::string name() const override { return "l1_centroid"; }
  Eigen::Index dimension() const override { return points_.cols(); }
  std::uint64_t component_count() const override { return static_cast<std::uint64_t>(points_.rows()); }
  /// out += weight * sign(x - a_i), sign(0) = 0.
  void add_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out) const override;
  /// Evaluated per coordinate from the fraction of +1 entries; O(d).
  double exact_objective(const Vector& x) const override;
  double lipschitz_l0(Norm dual) const override;
  /// Coordinatewise median (0 on exact ties).
  std::optional<Vector> exact_minimizer() const override;
  double lower_bound() const override { return 0.0; }

  const RowMatrix& points() const { return points_; }
  const Vector& plus_fraction() const { return plus_fraction_; }

 private:
  RowMatrix points_;
  Vector plus_fraction_;
};

/// Entry (i, j) is +1 with probability 1/sqrt(j) (1-based column j), else -1.
L1Centroid gen_l1_centroid(std::int64_t n, std::int64_t d, std::uint64_t seed);

/// f(X) = (1/C(n,2)) sum_{i<j} |<a_i - a_j, X (a_i - a_j)> - b_ij| over
/// symmetric X, flattened as a SymMatrix packing.
class MetricLearning final : public StochasticProblem {
 public:
  MetricLearning(RowMatrix points, Vector targets, double trace_bound, Vector planted);

  std::string name() const override { return "metric_learning"; }
  /// Length of the packed parameter, d(d+1)/2.
  Eigen::Index dimension() const override { return SymMatrix::packed_size(points_.cols()); }
  std::uint64_t component_count() const override { return static_cast<std::uint64_t>(targets_.size()); }
  void add_subgradient(const Vector& x, std::uint64_t pair, double weight, Vector& out) const override;
  /// a_ij = svec((a_i - a_j)(a_i - a_j)^T), with ||a_ij||_2 = ||a_i - a_j||^2.
  bool single_index() const override { return true; }
  void add_offset_subgradient(const Vector& x, std::uint64_t pair, double weight, Vector& out,
                              const std::function<double(double)>& offset) const override;
  /// Uses the Gram matrix A X A^T: O(n d^2 + n^2 d).
  double exact_objective(const Vector& x) const override;
  /// For l2 (Frobenius): max_{i<j} ||a_i - a_j||^2.
  double lipschitz_l0(Norm dual) const override;
  std::optional<Vector> planted_solution() const override { return planted_; }
  double lower_bound() const override { return 0.0; }

  Eigen::Index point_dim() const { return points_.cols(); }
  Eigen::Index point_count() const { return points_.rows(); }
  double trace_bound() const { return trace_bound_; }
  const RowMatrix& points() const { return points_; }
  const Vector& targets() const { return targets_; }
  /// b_ij for i < j.
  double target(Eigen::Index i, Eigen::Index j) const;
  /// Component index -> (i, j), i < j.
  std::pair<Eigen::Index, Eigen::Index> pair_of(std::uint64_t k) const;
  std::uint64_t index_of(Eigen::Index i, Eigen::Index j) const;

  /// The signed rank-one subgradient of pair (i, j) at X.
  SymMatrix oracle(const SymMatrix& X, Eigen::Index i, Eigen::Index j) const;

 private:
  RowMatrix points_;
  Vector targets_;
  double trace_bound_;
  Vector planted_;
  double max_pair_sq_ = 0.0;

  void accumulate(const Vector& x, std::uint64_t pair, double weight, Vector& out,
                  const std::function<double(double)>* offset) const;
};

/// Standard normal points; b_ij = ||a_i - a_j||^2_{X0} for a planted psd X0
/// of the given rank with tr(X0) = trace_bound / 2, plus optional noise
/// clamped at 0.
MetricLearning gen_metric_learning(std::int64_t n, std::int64_t d, std::uint64_t seed,
                                   double trace_bound = 1.0, int rank = 2, double noise_sd = 0.0);

// ---------------------------------------------------------------------------
// Serialization: <stem>.bin holds named float64 arrays, <stem>.meta.csv the
// key/value metadata (problem kind, sizes, reference optimum, ...).
// ---------------------------------------------------------------------------

using Metadata = std::map<std::string, std::string>;

struct LoadedProblem {
  std::unique_ptr<StochasticProblem> problem;
  Metadata metadata;
};

void save_problem(const StochasticProblem& problem, const std::filesystem::path& stem,
                  const Metadata& extra = {});
LoadedProblem load_problem(const std::filesystem::path& stem);

}  // namespace randsmooth

#endif
