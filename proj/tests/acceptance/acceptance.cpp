// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all ten
//   acceptance --only 4,6 run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include "randsmooth/harness.hpp"
#include "randsmooth/optimizer.hpp"
#include "randsmooth/parallel.hpp"
#include "randsmooth/prox.hpp"
#include "randsmooth/smoothing.hpp"

#include "prox_reference.hpp"
#include "quadrature.hpp"
#include "toy_problems.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace randsmooth;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates named checks; the first failures are kept for the report.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (ok) return;
    ++failed_;
    if (failed_ <= 3) failures_ += (failures_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {true, summary};
    std::ostringstream os;
    os << summary << " | " << failed_ << "/" << count_ << " checks failed: " << failures_;
    return {false, os.str()};
  }

 private:
  int count_ = 0, failed_ = 0;
  std::string failures_;
};

std::string num(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::mt19937_64& gen() {
  static std::mt19937_64 g(20240601);
  return g;
}

Vector random_vector(Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (auto& x : v) x = n(gen());
  return v;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen()); }

constexpr SmoothingKind kKinds[] = {SmoothingKind::uniform_l2_ball, SmoothingKind::uniform_linf_ball,
                                    SmoothingKind::gaussian};

SmoothingSpec spec_for(const StochasticProblem& p, SmoothingKind kind, double u) {
  SmoothingSpec probe;
  probe.kind = kind;
  return SmoothingSpec::make(kind, u, ScheduleKind::anytime, p.lipschitz_l0(probe.primal_norm().dual()),
                             p.dimension());
}

// ---------------------------------------------------------------------------

Outcome theta_identities() {
  ThetaSchedule s;
  long double worst = s.identity_residual();
  bool bound = true;
  while (s.t() < 10000) {
    s.advance();
    worst = std::max(worst, s.identity_residual());
    bound = bound && s.theta() <= 2.0 / static_cast<double>(s.t() + 2);
  }
  Checks c;
  c.expect(worst <= 1e-9L, "identity residual " + num(static_cast<double>(worst)));
  c.expect(bound, "theta_t > 2/(t+2)");
  return c.outcome("t <= 1e4: max |sum 1/theta - 1/theta^2| = " + num(static_cast<double>(worst)) +
                   ", theta_t <= 2/(t+2) throughout");
}

Outcome smoothing_sandwich() {
  Checks c;
  double worst_low = 0.0, worst_high = -INFINITY;
  for (auto norm : {rstest::NormObjective::l1, rstest::NormObjective::l2})
    for (Eigen::Index d = 1; d <= 2; ++d) {
      const rstest::NormObjective f(norm, d);
      for (SmoothingKind kind : kKinds)
        for (int k = 0; k < 100; ++k) {
          const Vector x = random_vector(d);
          const double u = uniform(0.1, 1.5);
          const double excess = rstest::smoothed_value(f, x, u, kind) - f.exact_objective(x);
          const double bound = spec_for(f, kind, u).uniform_gap(u);
          worst_low = std::min(worst_low, excess);
          worst_high = std::max(worst_high, excess - bound);
          // f_u = f exactly when f is linear on the support; quadrature then returns 0 up to rounding
          c.expect(excess >= -1e-12 && excess <= bound + 1e-6,
                   f.name() + " d=" + std::to_string(d) + " " + to_string(kind) + " excess " + num(excess) +
                       " bound " + num(bound));
        }
    }
  return c.outcome("1200 points: min(f_u - f) = " + num(worst_low) + ", max(f_u - f - gap) = " + num(worst_high));
}

Outcome gradient_smoothness() {
  Checks c;
  double worst = -INFINITY;
  for (auto norm : {rstest::NormObjective::l1, rstest::NormObjective::l2}) {
    const rstest::NormObjective f(norm, 2);
    const auto fv = [&](const Vector& x) { return f.exact_objective(x); };
    for (SmoothingKind kind : kKinds)
      for (int k = 0; k < 200; ++k) {
        const double u = uniform(0.2, 1.0);
        // pairs straddling the kinks, where the gradient turns fastest
        const Vector x = random_vector(2, u);
        const Vector dir = random_vector(2).normalized();
        const Vector y = x + uniform(0.05, 2.0) * u * dir;
        const SmoothingSpec spec = spec_for(f, kind, u);
        const Norm primal = spec.primal_norm();
        const Vector gx = rstest::smoothed_gradient_quadrature(fv, x, u, kind);
        const Vector gy = rstest::smoothed_gradient_quadrature(fv, y, u, kind);
        const double ratio = randsmooth::norm(gx - gy, primal.dual()) / randsmooth::norm(x - y, primal);
        const double bound = spec.l1_const / u;
        worst = std::max(worst, ratio / bound);
        c.expect(ratio <= bound + 1e-3, f.name() + " " + to_string(kind) + " ratio " + num(ratio) + " > " + num(bound));
      }
  }
  return c.outcome("1200 pairs in d=2: max ratio / (l1_const/u) = " + num(worst));
}

Outcome variance_law() {
  const auto p = gen_robust_regression(1000, 50, std::sqrt(0.1), 1.0, 7);
  const Vector y = 0.5 * *p.planted_solution() + 0.3 * random_vector(50);
  const double u = 0.5;
  SmoothingSpec spec = SmoothingSpec::make(SmoothingKind::uniform_l2_ball, u, ScheduleKind::anytime, 1.0, 50);
  const Vector exact = rstest::l1_regression_smoothed_gradient(p.A(), p.b(), y, u, SmoothingKind::uniform_l2_ball);

  std::vector<double> ms, mse;
  for (int m = 1; m <= 256; m *= 2) {
    double acc = 0.0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep)
      acc += (smoothed_gradient(p, y, u, m, spec, SampleKey{static_cast<std::uint64_t>(m), rep}).g - exact).squaredNorm();
    ms.push_back(m);
    mse.push_back(acc / 1000.0);
  }
  // least squares for v(m) = c / m
  double num_c = 0.0, den = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    num_c += mse[i] / ms[i];
    den += 1.0 / (ms[i] * ms[i]);
    mean += mse[i];
  }
  const double cfit = num_c / den;
  mean /= static_cast<double>(ms.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sse += std::pow(mse[i] - cfit / ms[i], 2);
    sst += std::pow(mse[i] - mean, 2);
  }
  const double r2 = 1.0 - sse / sst;
  const double ratio = mse[0] / mse[4];
  Checks c;
  c.expect(r2 >= 0.95, "R^2 " + num(r2));
  c.expect(ratio >= 12.0 && ratio <= 20.0, "Var(1)/Var(16) " + num(ratio));
  c.expect(mse[0] <= 1.0 + 0.1, "Var(1) above L0^2");
  return c.outcome("c = " + num(cfit) + ", R^2 = " + num(r2, 6) + ", Var(1)/Var(16) = " + num(ratio) +
                   ", Var(1) = " + num(mse[0]) + " (L0^2 = 1)");
}

Outcome prox_equivalence() {
  Checks c;
  double worst_ref = 0.0, worst_grid = 0.0;
  auto ref_check = [&](double err, const std::string& what) {
    worst_ref = std::max(worst_ref, err);
    c.expect(err <= 1e-8, what + " " + num(err));
  };
  auto grid_check = [&](double err, const std::string& what) {
    worst_grid = std::max(worst_grid, err);
    c.expect(err <= 1e-3, what + " " + num(err));
  };

  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index d = 1 + trial % 6;
    const Vector v = random_vector(d);
    const double C = 0.1 + (trial % 7) * 0.4;
    const Vector x = project_simplex(v, C);
    ref_check((x - rstest::simplex_kkt(v, C)).cwiseAbs().maxCoeff(), "simplex vs KKT");
    ref_check((x - rstest::simplex_bisection(v, C)).cwiseAbs().maxCoeff(), "simplex vs bisection");
  }
  for (Eigen::Index d = 1; d <= 2; ++d) {
    const Vector v = random_vector(d);
    const Vector g = rstest::grid_minimize([&](const Vector& x) { return (x - v).squaredNorm(); },
                                           [](const Vector& x) { return x.minCoeff() >= 0 && x.sum() <= 1.0; },
                                           Vector::Constant(d, 0.5), 0.5);
    grid_check((project_simplex(v, 1.0) - g).cwiseAbs().maxCoeff(), "simplex grid");
  }

  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    Matrix V = Matrix::NullaryExpr(n, n, [] { return std::normal_distribution<double>(0.0, 1.0)(gen()); });
    V = (0.5 * (V + V.transpose())).eval();
    const double C = 0.5 + trial % 3;
    const Matrix X = prox_psd_trace(SymMatrix::from_dense(V), C).to_dense();
    ref_check((X - rstest::psd_trace_reference(V, C)).cwiseAbs().maxCoeff(), "psd vs reference");
    ref_check(rstest::psd_trace_certificate(V, X, C), "psd certificate");
  }
  {
    Matrix V = Matrix::NullaryExpr(2, 2, [] { return std::normal_distribution<double>(0.0, 1.0)(gen()); });
    V = (0.5 * (V + V.transpose())).eval();
    const Vector v = SymMatrix::from_dense(V).packed();
    const Vector t = rstest::grid_minimize_box([&](const Vector& q) { return (rstest::psd2_point(q) - v).squaredNorm(); },
                                               Vector{{0.0, 0.0, -M_PI / 2}}, Vector{{1.0, 1.0, M_PI}}, 200, 3);
    grid_check((prox_psd_trace(SymMatrix::from_dense(V), 1.0).packed() - rstest::psd2_point(t)).cwiseAbs().maxCoeff(),
               "psd grid");
  }

  int combos = 0;
  auto state = [](Eigen::Index d) { return DualState{random_vector(d, 1.5), uniform(0.2, 3.0), uniform(0.2, 3.0)}; };
  for (Eigen::Index d = 1; d <= 4; ++d)
    for (const auto& geom : rstest::all_geometries(d, false)) {
      ++combos;
      for (int trial = 0; trial < 20; ++trial) {
        const DualState st = state(d);
        const Vector x = solve_z_update(geom, st);
        ref_check((x - rstest::z_update_reference(geom, st)).cwiseAbs().maxCoeff(), geom.describe());
        c.expect(rstest::feasible(geom, x, 1e-12), geom.describe() + " infeasible");
      }
      if (d > 2) continue;
      const DualState st = state(d);
      const Vector x = solve_z_update(geom, st);
      const auto objective = [&](const Vector& q) { return rstest::z_update_objective(geom, st, q); };
      Vector g;
      if (geom.domain().kind == DomainKind::l2_ball && d == 2) {
        const double r = geom.domain().radius;
        g = rstest::polar_point(rstest::grid_minimize_box([&](const Vector& q) { return objective(rstest::polar_point(q)); },
                                                          Vector{{0.0, -M_PI}}, Vector{{r, M_PI}}));
      } else {
        g = rstest::grid_minimize(objective, [&](const Vector& q) { return rstest::feasible(geom, q, 0.0); },
                                  Vector::Zero(d), 2.0 * (1.0 + x.cwiseAbs().maxCoeff()));
      }
      grid_check((x - g).cwiseAbs().maxCoeff(), geom.describe() + " grid");
    }
  for (Eigen::Index n = 1; n <= 4; ++n) {
    const Eigen::Index d = SymMatrix::packed_size(n);
    for (const auto& geom : rstest::all_geometries(d, true)) {
      ++combos;
      for (int trial = 0; trial < 20; ++trial) {
        const DualState st = state(d);
        ref_check((solve_z_update(geom, st) - rstest::z_update_reference(geom, st)).cwiseAbs().maxCoeff(),
                  geom.describe());
      }
    }
  }

  double worst_link = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 3 + trial % 40;
    const Vector t = random_vector(d, 2.0);
    for (double p : {1.1, 1.5, Geometry::default_lp_exponent(d)}) {
      const double err = (rstest::lp_psi_gradient_reference(lp_link(t, p), p) - t).cwiseAbs().maxCoeff() /
                         (1.0 + t.cwiseAbs().maxCoeff());
      worst_link = std::max(worst_link, err);
      c.expect(err <= 1e-9, "lp_link round trip " + num(err));
    }
  }
  for (Eigen::Index d = 1; d <= 2; ++d) {
    const Vector t = random_vector(d);
    const Vector x = lp_link(t, 1.5);
    const Vector g = rstest::grid_minimize([&](const Vector& y) { return lp_psi(y, 1.5) - t.dot(y); },
                                           [](const Vector&) { return true; }, Vector::Zero(d),
                                           2.0 * (1.0 + x.cwiseAbs().maxCoeff()));
    grid_check((x - g).cwiseAbs().maxCoeff(), "lp_link grid");
  }
  return c.outcome(std::to_string(combos) + " z-update geometries; max reference error " + num(worst_ref) +
                   ", max grid error " + num(worst_grid) + ", lp_link round trip " + num(worst_link));
}

// ---------------------------------------------------------------------------
// Experiment criteria

struct Table1 {
  std::vector<int> m;
  std::vector<double> median;
  bool complete = false;
};

double median_of(const TEpsResult& res, int m, const std::string& method) {
  for (const auto& cell : res.summary)
    if (cell.m == m && cell.method == method) return cell.stats.median;
  return NAN;
}

Table1& table1_data(unsigned threads) {
  static Table1 table;
  if (table.complete) return table;
  ExperimentConfig cfg;
  cfg.problem.kind = "robust_regression";
  cfg.problem.d = 50;
  cfg.m_list = {1, 2, 3, 5, 20, 100, 1000, 10000};
  cfg.T = 20000;
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  cfg.threads = threads;
  const TEpsResult res = run_t_eps(cfg);
  if (res.unstable_reference) throw ReferenceInstability("table 1 reference optimum unstable");
  for (int m : cfg.m_list) {
    table.m.push_back(m);
    table.median.push_back(median_of(res, m, "accelerated"));
  }
  table.complete = true;
  return table;
}

Outcome table1_shape(unsigned threads) {
  const Table1& t = table1_data(threads);
  std::map<int, double> med;
  std::ostringstream os;
  for (std::size_t i = 0; i < t.m.size(); ++i) {
    med[t.m[i]] = t.median[i];
    os << (i ? " " : "median T(eps, m): ") << "m=" << t.m[i] << ":" << t.median[i];
  }
  Checks c;
  for (std::size_t i = 1; i < t.m.size(); ++i)
    c.expect(t.median[i] <= t.median[i - 1], "increase at m=" + std::to_string(t.m[i]));
  const double r5 = med[1] / med[5], r20 = med[1] / med[20];
  const double plateau = std::fabs(med[1000] - med[10000]) / med[1000];
  c.expect(r5 >= 3.0 && r5 <= 8.0, "T(1)/T(5) " + num(r5));
  c.expect(r20 >= 5.0, "T(1)/T(20) " + num(r20));
  c.expect(plateau <= 0.15, "plateau " + num(plateau));
  os << "; T1/T5 = " << num(r5) << ", T1/T20 = " << num(r20) << ", plateau = " << num(plateau);
  return c.outcome(os.str());
}

Outcome two_regime(unsigned threads) {
  const Table1& t = table1_data(threads);
  const std::vector<double> m(t.m.begin(), t.m.end());
  const TwoRegimeFit fit = fit_two_regime(m, t.median);
  Checks c;
  c.expect(fit.r2 >= 0.9, "R^2 " + num(fit.r2));
  return c.outcome("max(a/m, b) with a = " + num(fit.a) + ", b = " + num(fit.b) + ": R^2 = " + num(fit.r2));
}

Outcome smoothing_necessity(unsigned threads) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::compare;
  cfg.problem.kind = "l1_centroid";
  cfg.problem.n = 1000;
  cfg.problem.d = 50;
  cfg.m_list = {1, 64};
  cfg.T = 20000;
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  cfg.threads = threads;
  const TEpsResult res = compare_smoothed_vs_plain(cfg);
  if (res.unstable_reference) throw ReferenceInstability("l1 centroid reference optimum unstable");
  const double acc1 = median_of(res, 1, "accelerated"), da1 = median_of(res, 1, "dual_averaging");
  const double acc64 = median_of(res, 64, "accelerated"), da64 = median_of(res, 64, "dual_averaging");
  const double ratio1 = std::max(acc1, da1) / std::min(acc1, da1);
  Checks c;
  c.expect(acc64 < da64, "m=64 smoothed " + num(acc64) + " >= plain " + num(da64));
  c.expect(ratio1 <= 2.0, "m=1 ratio " + num(ratio1) + " > 2");
  std::ostringstream os;
  os << "median T(eps): m=1 smoothed " << acc1 << " vs plain " << da1 << " (ratio " << num(ratio1) << "), m=64 smoothed "
     << acc64 << " vs plain " << da64;
  return c.outcome(os.str());
}

Outcome metric_saturation(unsigned) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::timing;
  cfg.problem.kind = "metric_learning";
  cfg.problem.n = 300;
  cfg.problem.d = 100;
  cfg.problem.noise_sd = 0.0;
  cfg.domain = DomainKind::psd_trace;
  cfg.domain_bound = 1.0;
  cfg.m_list = {2, 32, 64, 128};
  cfg.T = 1000000;
  cfg.eval_every = 10;
  cfg.time_budget_s = 8.0;
  cfg.seeds = {1, 2, 3, 4, 5};
  const TraceResult res = run_traces(cfg, true);
  if (res.unstable_reference) throw ReferenceInstability("metric learning reference optimum unstable");

  std::map<int, std::vector<const RunTrace*>> by_m;
  std::vector<double> initial;
  for (const auto& r : res.runs) {
    by_m[r.m].push_back(&r.trace);
    initial.push_back(r.trace.initial_gap);
  }
  std::vector<double> times;
  for (int k = 1; k <= 40; ++k) times.push_back(cfg.time_budget_s * k / 40.0);
  const GapBand b64 = gap_band(by_m[64], times), b128 = gap_band(by_m[128], times);

  Checks c;
  int inside = 0, intersect = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    intersect += b64.q1[k] <= b128.q3[k] && b128.q1[k] <= b64.q3[k];
    const bool ok = b64.median[k] >= b128.q1[k] && b64.median[k] <= b128.q3[k] && b128.median[k] >= b64.q1[k] &&
                    b128.median[k] <= b64.q3[k];
    inside += ok;
    c.expect(ok, "bands apart at " + num(times[k]) + " s: m=64 " + num(b64.median[k]) + " [" + num(b64.q1[k]) + ", " +
                     num(b64.q3[k]) + "], m=128 " + num(b128.median[k]) + " [" + num(b128.q1[k]) + ", " +
                     num(b128.q3[k]) + "]");
  }
  const double g0 = quantile(initial, 0.5);
  std::ostringstream slower;
  for (double frac : {0.5, 0.3, 0.2, 0.1}) {
    auto median_time = [&](int m) {
      std::vector<double> t;
      for (const RunTrace* tr : by_m[m]) t.push_back(time_to_gap(*tr, frac * g0));
      return quantile(t, 0.5);
    };
    const double t2 = median_time(2), t32 = median_time(32);
    c.expect(t2 > t32, "m=2 not slower at gap " + num(frac) + " g0");
    slower << (slower.tellp() ? ", " : "") << num(frac) << "g0: " << num(t2, 3) << "s vs " << num(t32, 3) << "s";
  }
  return c.outcome("d=100: m=64 and m=128 medians inside each other's IQR at " + std::to_string(inside) + "/" +
                   std::to_string(times.size()) + " times (bands intersect at " + std::to_string(intersect) +
                   "); time to gap m=2 vs m=32: " + slower.str());
}

Outcome fixed_vs_anytime(unsigned threads) {
  const int m = 20;
  const std::int64_t T = 1000;
  std::vector<double> any(20), fix(20);
  std::vector<char> unstable(20, 0);
  parallel_for(20, threads, [&](std::size_t k) {
    const std::uint64_t seed = k + 1;
    ExperimentConfig cfg;
    cfg.problem.kind = "robust_regression";
    cfg.problem.d = 50;
    const auto p = make_problem(cfg.problem, seed);
    const Geometry geom = make_geometry(cfg, p->dimension());
    ReferenceOptions ro;
    ro.seed = seed;
    const Reference ref = reference_optimum(*p, geom, ro);
    if (!ref.stable) unstable[k] = 1;
    RunOptions opts;
    opts.f_ref = ref.f;
    opts.eval_every = T;
    any[k] = run_accelerated(*p, geom, make_step_config(cfg, *p, ref.R, m, T), seed, opts).final_gap();
    cfg.schedule = ScheduleKind::fixed;
    fix[k] = run_accelerated(*p, geom, make_step_config(cfg, *p, ref.R, m, T), seed, opts).final_gap();
  });
  if (std::count(unstable.begin(), unstable.end(), 1)) throw ReferenceInstability("robust regression reference unstable");
  const double ma = quantile(any, 0.5), mf = quantile(fix, 0.5);
  const double ratio = std::max(ma, mf) / std::min(ma, mf);
  Checks c;
  c.expect(ratio <= 2.0, "ratio " + num(ratio));
  return c.outcome("m=20, T=1000: median final gap anytime " + num(ma) + ", fixed u = theta_T u " + num(mf) +
                   " (ratio " + num(ratio) + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-10"};
  std::vector<int> only;
  unsigned threads = 1;
  app.add_option("--only", only, "Criteria to run")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_option("--threads", threads, "Worker threads for independent seeds")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"theta-sequence identities", theta_identities},
      {"smoothing sandwich", smoothing_sandwich},
      {"gradient smoothness", gradient_smoothness},
      {"variance law", variance_law},
      {"prox oracle equivalence", prox_equivalence},
      {"Table 1 shape", [&] { return table1_shape(threads); }},
      {"two-regime fit", [&] { return two_regime(threads); }},
      {"smoothing necessity", [&] { return smoothing_necessity(threads); }},
      {"metric-learning saturation", [&] { return metric_saturation(threads); }},
      {"fixed vs anytime radius", [&] { return fixed_vs_anytime(threads); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !out.pass;
    std::printf("criterion %2d %s  %-27s (%6.1f s)  %s\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
