#include "randsmooth/problems.hpp"
#include "randsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace randsmooth {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

double max_row_norm(const RowMatrix& A, Norm dual) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) best = std::max(best, norm(A.row(i).transpose(), dual));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Robust regression

RobustRegression::RobustRegression(RowMatrix A, Vector b, Vector planted, double noise_sd)
    : A_(std::move(A)), b_(std::move(b)), planted_(std::move(planted)), noise_sd_(noise_sd) {
  if (A_.rows() < 1 || A_.cols() < 1) throw ConfigError("robust regression: empty design");
  if (b_.size() != A_.rows() || planted_.size() != A_.cols())
    throw ConfigError("robust regression: size mismatch");
  row_norm_ = max_row_norm(A_, Norm::l2());
}

void RobustRegression::add_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out) const {
  const auto row = A_.row(static_cast<Eigen::Index>(i));
  const double s = sign(row.dot(x) - b_[static_cast<Eigen::Index>(i)]);
  if (s != 0.0) out.noalias() += (weight * s) * row.transpose();
}

void RobustRegression::add_offset_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out,
                                              const std::function<double(double)>& offset) const {
  const auto row = A_.row(static_cast<Eigen::Index>(i));
  const double s = sign(row.dot(x) + offset(row.norm()) - b_[static_cast<Eigen::Index>(i)]);
  if (s != 0.0) out.noalias() += (weight * s) * row.transpose();
}

double RobustRegression::exact_objective(const Vector& x) const {
  return (A_ * x - b_).lpNorm<1>() / static_cast<double>(A_.rows());
}

double RobustRegression::lipschitz_l0(Norm dual) const {
  return dual.kind == NormKind::l2 ? row_norm_ : max_row_norm(A_, dual);
}

RobustRegression gen_robust_regression(std::int64_t n, std::int64_t d, double noise_sd, double L0,
                                       std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("gen_robust_regression: n and d must be >= 1");
  if (!(L0 > 0.0) || !(noise_sd >= 0.0)) throw ConfigError("gen_robust_regression: bad L0 or noise");
  RngStream rng = substream(seed, 0, 0, StreamTag::data);
  RowMatrix A(n, d);
  for (std::int64_t i = 0; i < n; ++i) {
    double n2 = 0.0;
    do {
      for (std::int64_t j = 0; j < d; ++j) A(i, j) = rng.normal();
      n2 = A.row(i).squaredNorm();
    } while (n2 == 0.0);
    A.row(i) *= L0 / std::sqrt(n2);
  }
  Vector w(d);
  for (std::int64_t j = 0; j < d; ++j) w[j] = rng.normal();
  Vector b = A * w;
  for (std::int64_t i = 0; i < n; ++i) b[i] += noise_sd * rng.normal();
  return RobustRegression(std::move(A), std::move(b), std::move(w), noise_sd);
}

// ---------------------------------------------------------------------------
// l1 centroid

L1Centroid::L1Centroid(RowMatrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) throw ConfigError("l1 centroid: empty point set");
  if (!((points_.array() == 1.0) || (points_.array() == -1.0)).all())
    throw ConfigError("l1 centroid: entries must be +1 or -1");
  plus_fraction_ = ((points_.array() + 1.0) * 0.5).colwise().mean().transpose();
}

void L1Centroid::add_subgradient(const Vector& x, std::uint64_t i, double weight, Vector& out) const {
  const auto row = points_.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index j = 0; j < x.size(); ++j) out[j] += weight * sign(x[j] - row[j]);
}

double L1Centroid::exact_objective(const Vector& x) const {
  const auto p = plus_fraction_.array();
  return (p * (x.array() - 1.0).abs() + (1.0 - p) * (x.array() + 1.0).abs()).sum();
}

double L1Centroid::lipschitz_l0(Norm dual) const {
  const auto d = static_cast<double>(points_.cols());
  switch (dual.kind) {
    case NormKind::linf: return 1.0;
    case NormKind::l2: return std::sqrt(d);
    case NormKind::l1: return d;
    case NormKind::lp: return std::pow(d, 1.0 / dual.p);
  }
  return d;
}

std::optional<Vector> L1Centroid::exact_minimizer() const {
  const Eigen::Index n = points_.rows();
  Vector x(points_.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto plus = std::llround(plus_fraction_[j] * static_cast<double>(n));
    x[j] = 2 * plus > n ? 1.0 : (2 * plus < n ? -1.0 : 0.0);
  }
  return x;
}

L1Centroid gen_l1_centroid(std::int64_t n, std::int64_t d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("gen_l1_centroid: n and d must be >= 1");
  RngStream rng = substream(seed, 0, 0, StreamTag::data);
  RowMatrix pts(n, d);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < d; ++j)
      pts(i, j) = rng.uniform() < 1.0 / std::sqrt(static_cast<double>(j + 1)) ? 1.0 : -1.0;
  return L1Centroid(std::move(pts));
}

// ---------------------------------------------------------------------------
// Metric learning

MetricLearning::MetricLearning(RowMatrix points, Vector targets, double trace_bound, Vector planted)
    : points_(std::move(points)), targets_(std::move(targets)), trace_bound_(trace_bound),
      planted_(std::move(planted)) {
  const Eigen::Index n = points_.rows();
  if (n < 2) throw ConfigError("metric learning: need at least two points");
  if (targets_.size() != n * (n - 1) / 2) throw ConfigError("metric learning: target count mismatch");
  if (!(trace_bound_ > 0.0)) throw ConfigError("metric learning: trace bound must be positive");
  if ((targets_.array() < 0.0).any()) throw ConfigError("metric learning: negative target");
  if (planted_.size() != dimension()) throw ConfigError("metric learning: planted size mismatch");
  const Matrix gram = points_ * points_.transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      max_pair_sq_ = std::max(max_pair_sq_, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
}

std::uint64_t MetricLearning::index_of(Eigen::Index i, Eigen::Index j) const {
  const Eigen::Index n = points_.rows();
  if (!(0 <= i && i < j && j < n)) throw ConfigError("metric learning: pair must satisfy i < j < n");
  return static_cast<std::uint64_t>(i * (2 * n - i - 1) / 2 + (j - i - 1));
}

std::pair<Eigen::Index, Eigen::Index> MetricLearning::pair_of(std::uint64_t k) const {
  const Eigen::Index n = points_.rows();
  const auto offset = [n](Eigen::Index i) { return static_cast<std::uint64_t>(i * (2 * n - i - 1) / 2); };
  Eigen::Index lo = 0, hi = n - 1;  // offset(lo) <= k < offset(hi)
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (offset(mid) <= k) lo = mid;
    else hi = mid;
  }
  return {lo, lo + 1 + static_cast<Eigen::Index>(k - offset(lo))};
}

double MetricLearning::target(Eigen::Index i, Eigen::Index j) const {
  if (i > j) std::swap(i, j);
  return targets_[static_cast<Eigen::Index>(index_of(i, j))];
}

void MetricLearning::add_subgradient(const Vector& x, std::uint64_t k, double weight, Vector& out) const {
  accumulate(x, k, weight, out, nullptr);
}

void MetricLearning::add_offset_subgradient(const Vector& x, std::uint64_t k, double weight, Vector& out,
                                            const std::function<double(double)>& offset) const {
  accumulate(x, k, weight, out, &offset);
}

void MetricLearning::accumulate(const Vector& x, std::uint64_t k, double weight, Vector& out,
                                const std::function<double(double)>* offset) const {
  const auto [i, j] = pair_of(k);
  const Eigen::Index d = points_.cols();
  const Vector v = (points_.row(i) - points_.row(j)).transpose();
  // <svec(X), svec(v v^T)> = v^T X v
  double quad = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::Index base = c * (c + 1) / 2;
    double col = 0.0;
    for (Eigen::Index r = 0; r < c; ++r) col += x[base + r] * v[r];
    quad += kSqrt2 * col * v[c] + x[base + c] * v[c] * v[c];
  }
  if (offset) quad += (*offset)(v.squaredNorm());
  const double s = sign(quad - targets_[static_cast<Eigen::Index>(k)]);
  if (s == 0.0) return;
  const double w = weight * s;
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::Index base = c * (c + 1) / 2;
    const double wc = w * kSqrt2 * v[c];
    for (Eigen::Index r = 0; r < c; ++r) out[base + r] += wc * v[r];
    out[base + c] += w * v[c] * v[c];
  }
}

SymMatrix MetricLearning::oracle(const SymMatrix& X, Eigen::Index i, Eigen::Index j) const {
  Vector g = Vector::Zero(dimension());
  add_subgradient(X.packed(), index_of(std::min(i, j), std::max(i, j)), 1.0, g);
  return SymMatrix(point_dim(), std::move(g));
}

double MetricLearning::exact_objective(const Vector& x) const {
  const Eigen::Index n = points_.rows();
  const Matrix X = SymMatrix(point_dim(), x).to_dense();
  const Matrix AX = points_ * X;
  const Matrix G = AX * points_.transpose();
  double total = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j, ++k)
      total += std::fabs(G(i, i) + G(j, j) - 2.0 * G(i, j) - targets_[k]);
  return total / static_cast<double>(targets_.size());
}

double MetricLearning::lipschitz_l0(Norm dual) const {
  if (dual.kind != NormKind::l2) throw ConfigError("metric learning: only the Frobenius bound is available");
  return max_pair_sq_;
}

MetricLearning gen_metric_learning(std::int64_t n, std::int64_t d, std::uint64_t seed,
                                   double trace_bound, int rank, double noise_sd) {
  if (n < 2 || d < 1) throw ConfigError("gen_metric_learning: need n >= 2, d >= 1");
  if (rank < 1 || rank > d) throw ConfigError("gen_metric_learning: rank must lie in [1, d]");
  RngStream rng = substream(seed, 0, 0, StreamTag::data);
  RowMatrix pts(n, d);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < d; ++j) pts(i, j) = rng.normal();
  Matrix factors(d, rank);
  for (std::int64_t j = 0; j < d; ++j)
    for (int r = 0; r < rank; ++r) factors(j, r) = rng.normal();
  Matrix X0 = factors * factors.transpose();
  X0 *= 0.5 * trace_bound / X0.trace();

  const Matrix AX = pts * X0;
  const Matrix G = AX * pts.transpose();
  Vector targets(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j, ++k) {
      const double exact = G(i, i) + G(j, j) - 2.0 * G(i, j);
      targets[k] = std::max(0.0, noise_sd > 0.0 ? exact + noise_sd * rng.normal() : exact);
    }
  return MetricLearning(std::move(pts), std::move(targets), trace_bound, SymMatrix::from_dense(X0).packed());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr char kMagic[4] = {'R', 'S', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

struct NamedArray {
  std::string name;
  Matrix data;  // column-major
};

void write_arrays(const std::filesystem::path& path, const std::vector<NamedArray>& arrays) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  auto put_u32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
  auto put_u64 = [&](std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
  os.write(kMagic, 4);
  put_u32(kVersion);
  put_u32(static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    put_u32(static_cast<std::uint32_t>(a.name.size()));
    os.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put_u64(static_cast<std::uint64_t>(a.data.rows()));
    put_u64(static_cast<std::uint64_t>(a.data.cols()));
    os.write(reinterpret_cast<const char*>(a.data.data()),
             static_cast<std::streamsize>(a.data.size() * sizeof(double)));
  }
  if (!os) throw Error("write failed: " + path.string());
}

std::map<std::string, Matrix> read_arrays(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  auto get = [&](auto& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw Error("truncated problem file: " + path.string());
  };
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error("not a problem file: " + path.string());
  std::uint32_t version = 0, count = 0;
  get(version);
  if (version != kVersion) throw Error("unsupported problem file version");
  get(count);
  std::map<std::string, Matrix> out;
  for (std::uint32_t a = 0; a < count; ++a) {
    std::uint32_t len = 0;
    get(len);
    std::string name(len, '\0');
    is.read(name.data(), len);
    std::uint64_t rows = 0, cols = 0;
    get(rows);
    get(cols);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!is) throw Error("truncated problem file: " + path.string());
    out.emplace(std::move(name), std::move(m));
  }
  return out;
}

void write_metadata(const std::filesystem::path& path, const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "key,value\n";
  for (const auto& [k, v] : meta) os << k << ',' << v << '\n';
}

Metadata read_metadata(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  Metadata meta;
  std::string line;
  std::getline(is, line);
  if (line != "key,value") throw Error("bad metadata header in " + path.string());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("bad metadata line: " + line);
    meta[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return meta;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const Matrix& require(const std::map<std::string, Matrix>& arrays, const std::string& name) {
  const auto it = arrays.find(name);
  if (it == arrays.end()) throw Error("problem file lacks array '" + name + "'");
  return it->second;
}

}  // namespace

void save_problem(const StochasticProblem& problem, const std::filesystem::path& stem,
                  const Metadata& extra) {
  Metadata meta = extra;
  meta["kind"] = problem.name();
  meta["dimension"] = std::to_string(problem.dimension());
  meta["components"] = std::to_string(problem.component_count());
  meta["format_version"] = std::to_string(kVersion);
  std::vector<NamedArray> arrays;
  if (const auto* rr = dynamic_cast<const RobustRegression*>(&problem)) {
    arrays.push_back({"A", rr->A()});
    arrays.push_back({"b", rr->b()});
    arrays.push_back({"planted", *rr->planted_solution()});
    meta["noise_sd"] = format_double(rr->noise_sd());
    meta["row_norm"] = format_double(rr->row_norm());
  } else if (const auto* lc = dynamic_cast<const L1Centroid*>(&problem)) {
    arrays.push_back({"points", lc->points()});
  } else if (const auto* ml = dynamic_cast<const MetricLearning*>(&problem)) {
    arrays.push_back({"points", ml->points()});
    arrays.push_back({"targets", ml->targets()});
    arrays.push_back({"planted", *ml->planted_solution()});
    meta["trace_bound"] = format_double(ml->trace_bound());
  } else {
    throw Error("save_problem: unknown problem type " + problem.name());
  }
  write_arrays(std::filesystem::path(stem.string() + ".bin"), arrays);
  write_metadata(std::filesystem::path(stem.string() + ".meta.csv"), meta);
}

LoadedProblem load_problem(const std::filesystem::path& stem) {
  LoadedProblem out;
  out.metadata = read_metadata(std::filesystem::path(stem.string() + ".meta.csv"));
  const auto arrays = read_arrays(std::filesystem::path(stem.string() + ".bin"));
  const std::string kind = out.metadata.at("kind");
  if (kind == "robust_regression") {
    out.problem = std::make_unique<RobustRegression>(RowMatrix(require(arrays, "A")), Vector(require(arrays, "b")),
                                                     Vector(require(arrays, "planted")),
                                                     std::stod(out.metadata.at("noise_sd")));
  } else if (kind == "l1_centroid") {
    out.problem = std::make_unique<L1Centroid>(RowMatrix(require(arrays, "points")));
  } else if (kind == "metric_learning") {
    out.problem = std::make_unique<MetricLearning>(RowMatrix(require(arrays, "points")),
                                                   Vector(require(arrays, "targets")),
                                                   std::stod(out.metadata.at("trace_bound")),
                                                   Vector(require(arrays, "planted")));
  } else {
    throw Error("load_problem: unknown kind " + kind);
  }
  return out;
}

}  // namespace randsmooth
