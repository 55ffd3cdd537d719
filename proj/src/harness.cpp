#include "randsmooth/harness.hpp"
#include "randsmooth/parallel.hpp"
#include "randsmooth/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace randsmooth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) throw ConfigError("config key '" + key + "': value must be finite");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse_number<std::uint64_t>(key, item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(key, trim(item.substr(0, dash)));
    const auto hi = parse_number<std::uint64_t>(key, trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError("config key '" + key + "': empty range " + item);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

DomainKind parse_domain(const std::string& s) {
  if (s == "unconstrained") return DomainKind::unconstrained;
  if (s == "l2_ball") return DomainKind::l2_ball;
  if (s == "box") return DomainKind::box;
  if (s == "simplex") return DomainKind::simplex_ineq;
  if (s == "psd_trace") return DomainKind::psd_trace;
  throw ConfigError("unknown domain '" + s + "'");
}

RegularizerKind parse_regularizer(const std::string& s) {
  if (s == "none") return RegularizerKind::none;
  if (s == "l1") return RegularizerKind::l1;
  throw ConfigError("unknown regularizer '" + s + "'");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::uint64_t derived_seed(std::uint64_t seed, StreamTag tag, std::uint64_t salt = 0) {
  return substream(seed, salt, 0, tag)();
}

double composite_value(const StochasticProblem& problem, const Geometry& geom, const Vector& x) {
  return problem.exact_objective(x) + geom.regularizer_value(x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::unique_ptr<StochasticProblem> make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.kind == "robust_regression")
    return std::make_unique<RobustRegression>(gen_robust_regression(spec.n, spec.d, spec.noise_sd, spec.L0, seed));
  if (spec.kind == "l1_centroid") return std::make_unique<L1Centroid>(gen_l1_centroid(spec.n, spec.d, seed));
  if (spec.kind == "metric_learning")
    return std::make_unique<MetricLearning>(
        gen_metric_learning(spec.n, spec.d, seed, spec.trace_bound, spec.rank, spec.noise_sd));
  throw ConfigError("unknown problem '" + spec.kind + "'");
}

ExperimentMode parse_mode(const std::string& s) {
  if (s == "t_eps") return ExperimentMode::t_eps;
  if (s == "trace") return ExperimentMode::trace;
  if (s == "timing") return ExperimentMode::timing;
  if (s == "compare") return ExperimentMode::compare;
  throw ConfigError("unknown mode '" + s + "'");
}

std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::t_eps: return "t_eps";
    case ExperimentMode::trace: return "trace";
    case ExperimentMode::timing: return "timing";
    case ExperimentMode::compare: return "compare";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (m_list.empty()) throw ConfigError("m list must not be empty");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 1) throw ConfigError("m values must be >= 1");
    if (i > 0 && m_list[i] <= m_list[i - 1]) throw ConfigError("m list must be strictly ascending");
  }
  if (seeds.empty()) throw ConfigError("seed list must not be empty");
  if (T < 4) throw ConfigError("T must be >= 4");
  if (eps && !(*eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(eps_fraction > 0.0 && eps_fraction < 1.0)) throw ConfigError("eps_fraction must lie in (0, 1)");
  if (u && !(*u > 0.0)) throw ConfigError("u must be positive");
  if (eta && !(*eta > 0.0)) throw ConfigError("eta must be positive");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (reference_budget < 100000) throw ConfigError("reference_budget must be >= 1e5 oracle calls");
  if (stepsize_grid.empty()) throw ConfigError("stepsize grid must not be empty");
  for (double s : stepsize_grid)
    if (!(s > 0.0)) throw ConfigError("stepsizes must be positive");
  if (!(time_budget_s > 0.0)) throw ConfigError("time_budget_s must be positive");
  if (problem.n < 1 || problem.d < 1) throw ConfigError("problem n and d must be >= 1");
  if (psi != "euclidean" && psi != "lp") throw ConfigError("psi must be euclidean or lp");
  // Surfaces unsupported geometry combinations before any run starts.
  (void)make_geometry(*this, problem.kind == "metric_learning" ? SymMatrix::packed_size(problem.d) : problem.d);
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "mode") cfg.mode = parse_mode(val);
      else if (key == "problem") cfg.problem.kind = val;
      else if (key == "n") cfg.problem.n = parse_number<std::int64_t>(key, val);
      else if (key == "d") cfg.problem.d = parse_number<std::int64_t>(key, val);
      else if (key == "noise_sd") cfg.problem.noise_sd = parse_number<double>(key, val);
      else if (key == "L0") cfg.problem.L0 = parse_number<double>(key, val);
      else if (key == "trace_bound") cfg.problem.trace_bound = parse_number<double>(key, val);
      else if (key == "rank") cfg.problem.rank = parse_number<int>(key, val);
      else if (key == "psi") cfg.psi = val;
      else if (key == "lp_exponent") cfg.lp_exponent = parse_number<double>(key, val);
      else if (key == "domain") cfg.domain = parse_domain(val);
      else if (key == "domain_bound") cfg.domain_bound = parse_number<double>(key, val);
      else if (key == "regularizer") cfg.regularizer = parse_regularizer(val);
      else if (key == "lambda") cfg.lambda = parse_number<double>(key, val);
      else if (key == "smoothing") cfg.smoothing = parse_smoothing_kind(val);
      else if (key == "schedule") cfg.schedule = parse_schedule_kind(val);
      else if (key == "u") cfg.u = parse_number<double>(key, val);
      else if (key == "eta") cfg.eta = parse_number<double>(key, val);
      else if (key == "m") {
        cfg.m_list.clear();
        for (const auto& item : split(val, ',')) cfg.m_list.push_back(parse_number<int>(key, item));
      } else if (key == "T") cfg.T = parse_number<std::int64_t>(key, val);
      else if (key == "eps_fraction") cfg.eps_fraction = parse_number<double>(key, val);
      else if (key == "eps") cfg.eps = parse_number<double>(key, val);
      else if (key == "seeds") cfg.seeds = parse_seeds(key, val);
      else if (key == "eval_every") cfg.eval_every = parse_number<std::int64_t>(key, val);
      else if (key == "reference_budget") cfg.reference_budget = parse_number<std::int64_t>(key, val);
      else if (key == "stepsize_grid") {
        cfg.stepsize_grid.clear();
        for (const auto& item : split(val, ',')) cfg.stepsize_grid.push_back(parse_number<double>(key, item));
      } else if (key == "time_budget_s") cfg.time_budget_s = parse_number<double>(key, val);
      else if (key == "threads") cfg.threads = parse_number<unsigned>(key, val);
      else if (key == "out_dir") cfg.out_dir = val;
      else if (key == "problem_cache") cfg.problem_cache = val;
      else if (key == "baseline_report") {
        if (val != "average" && val != "last") throw ConfigError("baseline_report must be average or last");
        cfg.baseline_report_average = val == "average";
      } else if (key == "record_time") cfg.record_time = parse_bool(key, val);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

Geometry make_geometry(const ExperimentConfig& cfg, Eigen::Index d) {
  if (cfg.psi == "lp") {
    if (cfg.domain != DomainKind::unconstrained) throw ConfigError("lp geometry supports only the unconstrained domain");
    const double p = cfg.lp_exponent > 0.0 ? cfg.lp_exponent : Geometry::default_lp_exponent(d);
    return Geometry::lp(p, cfg.regularizer, cfg.lambda);
  }
  Geometry::Domain dom;
  switch (cfg.domain) {
    case DomainKind::unconstrained: dom = Geometry::unconstrained(); break;
    case DomainKind::l2_ball: dom = Geometry::l2_ball(cfg.domain_bound); break;
    case DomainKind::box:
      dom = Geometry::box(Vector::Constant(d, -cfg.domain_bound), Vector::Constant(d, cfg.domain_bound));
      break;
    case DomainKind::simplex_ineq: dom = Geometry::simplex(cfg.domain_bound); break;
    case DomainKind::psd_trace: dom = Geometry::psd_trace(cfg.domain_bound); break;
  }
  return Geometry::euclidean(dom, cfg.regularizer, cfg.lambda);
}

double default_smoothing_radius(SmoothingKind kind, double R, Eigen::Index d) {
  const auto dd = static_cast<double>(d);
  switch (kind) {
    case SmoothingKind::uniform_l2_ball: return R * std::pow(dd, 0.25);
    case SmoothingKind::gaussian: return R * std::pow(dd, -0.25);
    case SmoothingKind::uniform_linf_ball: return R * std::sqrt(dd * std::max(1.0, std::log(dd)));
  }
  return R;
}

StepConfig make_step_config(const ExperimentConfig& cfg, const StochasticProblem& problem, double R, int m,
                            std::int64_t T) {
  const Eigen::Index d = problem.dimension();
  SmoothingSpec probe;
  probe.kind = cfg.smoothing;
  const double l0 = problem.lipschitz_l0(probe.primal_norm().dual());
  double u = cfg.u ? *cfg.u : default_smoothing_radius(cfg.smoothing, R, d);
  if (cfg.schedule == ScheduleKind::fixed && !cfg.u) {
    // Horizon-aware radius: the anytime radius at the last iteration, ~2u/T.
    ThetaSchedule th;
    for (std::int64_t t = 0; t < T; ++t) th.advance();
    u *= th.theta();
  }
  StepConfig sc;
  sc.smoothing = SmoothingSpec::make(cfg.smoothing, u, cfg.schedule, l0, d);
  sc.eta_scale = cfg.eta ? *cfg.eta : 0.0;
  sc.m = m;
  sc.T = T;
  sc.radius_R = R;
  sc.threads = 1;
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Reference optimum

Reference reference_optimum(const StochasticProblem& problem, const Geometry& geom, const ReferenceOptions& opts) {
  if (opts.budget < 100000) throw ConfigError("reference budget must be >= 1e5 oracle calls");
  const Eigen::Index d = problem.dimension();
  const Vector x0 = geom.psi_minimizer(d);
  const Norm nrm = geom.matched_norm();

  Reference ref;
  ref.f_x0 = composite_value(problem, geom, x0);
  ref.x = x0;
  ref.f = ref.f_x0;
  ref.source = "start";
  bool optimal = false;

  auto consider = [&](const std::optional<Vector>& x, const char* source) {
    if (!x || x->size() != d || !geom.contains(*x)) return;
    const double v = composite_value(problem, geom, *x);
    // a closed-form minimizer wins ties so that it is recognised as optimal
    if (v < ref.f || (v == ref.f && std::string(source) == "exact")) {
      ref.f = v;
      ref.x = *x;
      ref.source = source;
    }
  };
  if (const auto xm = problem.exact_minimizer();
      xm && geom.domain().kind == DomainKind::unconstrained && geom.regularizer() == RegularizerKind::none) {
    consider(xm, "exact");
    optimal = ref.source == "exact";
  } else {
    consider(xm, "exact");
  }
  consider(problem.planted_solution(), "planted");
  // Rounding in the objective leaves an attaining point at ~1e-16 above the bound.
  if (!optimal && ref.f <= problem.lower_bound() + 1e-12 * std::max(1.0, std::fabs(ref.f_x0))) {
    optimal = true;
    ref.source = "lower_bound";
  }

  const double radius = geom.domain_radius(d);
  auto distance_estimate = [&] {
    if (std::isfinite(radius)) return radius;
    const double r = norm(ref.x - x0, nrm);
    return r > 0.0 ? r : 1.0;
  };

  if (optimal) {
    ref.budget_values.fill(ref.f);
  } else {
    SmoothingSpec probe;
    probe.kind = opts.smoothing;
    const double l0 = problem.lipschitz_l0(probe.primal_norm().dual());
    for (int k = 0; k < 3; ++k) {
      StepConfig sc;
      sc.m = opts.m;
      sc.T = std::max<std::int64_t>(4, (opts.budget << k) / opts.m);
      sc.radius_R = distance_estimate();
      sc.smoothing = SmoothingSpec::make(opts.smoothing, default_smoothing_radius(opts.smoothing, sc.radius_R, d),
                                         ScheduleKind::anytime, l0, d);
      sc.threads = opts.threads;
      const std::uint64_t run_seed = derived_seed(opts.seed, StreamTag::reference, static_cast<std::uint64_t>(k));
      const std::int64_t every = std::max<std::int64_t>(1, sc.T / 400);
      AccelState st = AccelState::start(x0);
      for (std::int64_t t = 0; t < sc.T; ++t) {
        st = accel_step(st, problem, geom, sc, run_seed);
        if (st.t % every != 0 && st.t != sc.T) continue;
        const double v = composite_value(problem, geom, st.x);
        if (v < ref.f) {
          ref.f = v;
          ref.x = st.x;
          ref.source = "accelerated";
        }
      }
      ref.budget_values[static_cast<std::size_t>(k)] = ref.f;
    }
  }

  ref.R = distance_estimate();
  ref.eps = opts.eps ? *opts.eps : opts.eps_fraction * (ref.f_x0 - ref.f);
  ref.stable = optimal || std::fabs(ref.budget_values[1] - ref.budget_values[2]) < ref.eps / 10.0;
  if (!(ref.eps > 0.0)) ref.stable = false;
  return ref;
}

// ---------------------------------------------------------------------------
// Measurements

TEps measure_T_eps(const StochasticProblem& problem, const Geometry& geom, const StepConfig& cfg,
                   const Reference& ref, std::uint64_t seed) {
  if (!ref.stable) throw ReferenceInstability("measure_T_eps: reference optimum is not stable");
  RunOptions opts;
  opts.f_ref = ref.f;
  opts.stop_at_gap = ref.eps;
  const RunTrace trace = run_accelerated(problem, geom, cfg, seed, opts);
  const std::int64_t hit = trace.first_hit(ref.eps);
  return hit >= 0 ? TEps{hit, true} : TEps{cfg.T, false};
}

TEps measure_T_eps_dual_averaging(const StochasticProblem& problem, const Geometry& geom,
                                  const DualAveragingConfig& cfg, const Reference& ref, std::uint64_t seed) {
  if (!ref.stable) throw ReferenceInstability("measure_T_eps: reference optimum is not stable");
  RunOptions opts;
  opts.f_ref = ref.f;
  opts.stop_at_gap = ref.eps;
  const RunTrace trace = run_dual_averaging(problem, geom, cfg, seed, opts);
  const std::int64_t hit = trace.first_hit(ref.eps);
  return hit >= 0 ? TEps{hit, true} : TEps{cfg.T, false};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return NAN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

SummaryStats summarize(std::vector<double> values) {
  SummaryStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  } else {
    s.std = 0.0;
  }
  s.median = quantile(values, 0.5);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  return s;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Instance {
  std::unique_ptr<StochasticProblem> problem;
  Reference ref;
};

std::string instance_key(const ExperimentConfig& cfg, const Geometry& geom, std::uint64_t seed) {
  std::ostringstream os;
  os << cfg.problem.kind << '|' << cfg.problem.n << '|' << cfg.problem.d << '|' << fmt(cfg.problem.noise_sd) << '|'
     << fmt(cfg.problem.L0) << '|' << fmt(cfg.problem.trace_bound) << '|' << cfg.problem.rank << '|' << seed << '|'
     << geom.describe() << '|' << to_string(cfg.smoothing) << '|' << cfg.reference_budget << '|'
     << fmt(cfg.eps_fraction) << '|' << (cfg.eps ? fmt(*cfg.eps) : "auto");
  return os.str();
}

std::string format_exact(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Generates (or loads from the cache) the instance for one seed, with its
/// reference optimum.
Instance obtain_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Instance inst;
  const Eigen::Index dim =
      cfg.problem.kind == "metric_learning" ? SymMatrix::packed_size(cfg.problem.d) : cfg.problem.d;
  const Geometry geom = make_geometry(cfg, dim);
  const std::string key = instance_key(cfg, geom, seed);
  std::filesystem::path stem;
  if (!cfg.problem_cache.empty()) {
    stem = cfg.problem_cache / ("instance_" + std::to_string(seed));
    if (std::filesystem::exists(stem.string() + ".meta.csv")) {
      LoadedProblem loaded = load_problem(stem);
      const auto& meta = loaded.metadata;
      if (meta.count("instance_key") && meta.at("instance_key") == csv_safe(key)) {
        inst.problem = std::move(loaded.problem);
        Reference& r = inst.ref;
        r.f = std::stod(meta.at("f_ref"));
        r.f_x0 = std::stod(meta.at("f_x0"));
        r.eps = std::stod(meta.at("eps"));
        r.R = std::stod(meta.at("R"));
        r.stable = meta.at("stable") == "1";
        r.source = meta.at("ref_source");
        for (int k = 0; k < 3; ++k) r.budget_values[k] = std::stod(meta.at("budget_value_" + std::to_string(k)));
        return inst;
      }
    }
  }
  inst.problem = make_problem(cfg.problem, seed);
  ReferenceOptions ro;
  ro.budget = cfg.reference_budget;
  ro.eps_fraction = cfg.eps_fraction;
  ro.eps = cfg.eps;
  ro.smoothing = cfg.smoothing;
  ro.seed = seed;
  inst.ref = reference_optimum(*inst.problem, geom, ro);
  if (!stem.empty()) {
    std::filesystem::create_directories(cfg.problem_cache);
    Metadata meta{{"instance_key", csv_safe(key)},
                  {"seed", std::to_string(seed)},
                  {"f_ref", format_exact(inst.ref.f)},
                  {"f_x0", format_exact(inst.ref.f_x0)},
                  {"eps", format_exact(inst.ref.eps)},
                  {"R", format_exact(inst.ref.R)},
                  {"stable", inst.ref.stable ? "1" : "0"},
                  {"ref_source", inst.ref.source}};
    for (int k = 0; k < 3; ++k) meta["budget_value_" + std::to_string(k)] = format_exact(inst.ref.budget_values[k]);
    save_problem(*inst.problem, stem, meta);
  }
  return inst;
}

TEpsCell make_cell(const std::vector<TEpsRecord>& records, int m, const std::string& method, double scale) {
  TEpsCell cell;
  cell.m = m;
  cell.method = method;
  cell.stepsize_scale = scale;
  std::vector<double> values;
  for (const auto& r : records) {
    if (r.m != m || r.method != method || r.stepsize_scale != scale || r.status != "ok") continue;
    values.push_back(static_cast<double>(r.T));
    if (r.reached) ++cell.reached;
  }
  cell.stats = summarize(std::move(values));
  return cell;
}

/// Per-seed worker shared by run_t_eps and compare: fills `out` with one
/// record per (m, method, stepsize).
void t_eps_for_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool with_baseline,
                    std::vector<TEpsRecord>& out) {
  auto base = [&](int m, const std::string& method, double scale) {
    TEpsRecord r;
    r.seed = seed;
    r.m = m;
    r.method = method;
    r.stepsize_scale = scale;
    return r;
  };
  std::vector<TEpsRecord> skeleton;
  for (int m : cfg.m_list) {
    skeleton.push_back(base(m, "accelerated", 0.0));
    if (with_baseline)
      for (double s : cfg.stepsize_grid) skeleton.push_back(base(m, "dual_averaging", s));
  }
  try {
    const Instance inst = obtain_instance(cfg, seed);
    const Geometry geom = make_geometry(cfg, inst.problem->dimension());
    for (auto& r : skeleton) {
      r.eps = inst.ref.eps;
      r.f_ref = inst.ref.f;
      r.R = inst.ref.R;
    }
    if (!inst.ref.stable) {
      for (auto& r : skeleton) r.status = "unstable_reference";
      out = std::move(skeleton);
      return;
    }
    for (auto& r : skeleton) {
      try {
        TEps te;
        if (r.method == "accelerated") {
          const StepConfig sc = make_step_config(cfg, *inst.problem, inst.ref.R, r.m, cfg.T);
          te = measure_T_eps(*inst.problem, geom, sc, inst.ref, seed);
        } else {
          DualAveragingConfig dc;
          dc.m = r.m;
          dc.T = cfg.T;
          dc.l0 = inst.problem->lipschitz_l0(geom.matched_norm().dual());
          dc.radius_R = inst.ref.R;
          dc.stepsize_scale = r.stepsize_scale;
          dc.report_average = cfg.baseline_report_average;
          te = measure_T_eps_dual_averaging(*inst.problem, geom, dc, inst.ref, seed);
        }
        r.T = te.T;
        r.reached = te.reached;
      } catch (const Error& e) {
        r.status = csv_safe(std::string("error: ") + e.what());
      }
    }
  } catch (const Error& e) {
    for (auto& r : skeleton) r.status = csv_safe(std::string("error: ") + e.what());
  }
  out = std::move(skeleton);
}

TEpsResult collect(const ExperimentConfig& cfg, std::vector<std::vector<TEpsRecord>>& per_seed, bool baseline) {
  TEpsResult result;
  for (auto& rows : per_seed)
    for (auto& r : rows) {
      if (r.status == "unstable_reference") result.unstable_reference = true;
      result.records.push_back(std::move(r));
    }
  for (int m : cfg.m_list) {
    result.summary.push_back(make_cell(result.records, m, "accelerated", 0.0));
    if (!baseline) continue;
    std::optional<TEpsCell> best;
    for (double s : cfg.stepsize_grid) {
      TEpsCell c = make_cell(result.records, m, "dual_averaging", s);
      if (!best || (c.stats.median < best->stats.median)) best = c;
    }
    result.summary.push_back(*best);
  }
  return result;
}

}  // namespace

TEpsResult run_t_eps(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<TEpsRecord>> per_seed(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads,
               [&](std::size_t k) { t_eps_for_seed(cfg, cfg.seeds[k], false, per_seed[k]); });
  return collect(cfg, per_seed, false);
}

TEpsResult compare_smoothed_vs_plain(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.problem.kind != "l1_centroid") throw ConfigError("compare mode expects the l1_centroid problem");
  std::vector<std::vector<TEpsRecord>> per_seed(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads,
               [&](std::size_t k) { t_eps_for_seed(cfg, cfg.seeds[k], true, per_seed[k]); });
  return collect(cfg, per_seed, true);
}

TraceResult run_traces(const ExperimentConfig& cfg, bool timed) {
  cfg.validate();
  std::vector<std::vector<TraceRecord>> per_seed(cfg.seeds.size());
  std::vector<char> unstable(cfg.seeds.size(), 0);
  auto work = [&](std::size_t k) {
    const std::uint64_t seed = cfg.seeds[k];
    const Instance inst = obtain_instance(cfg, seed);
    if (!inst.ref.stable) {
      unstable[k] = 1;
      return;
    }
    const Geometry geom = make_geometry(cfg, inst.problem->dimension());
    for (int m : cfg.m_list) {
      const StepConfig sc = make_step_config(cfg, *inst.problem, inst.ref.R, m, cfg.T);
      RunOptions opts;
      opts.f_ref = inst.ref.f;
      opts.eval_every = cfg.eval_every;
      if (timed) opts.max_wall_ns = static_cast<std::int64_t>(cfg.time_budget_s * 1e9);
      TraceRecord rec{seed, m, run_accelerated(*inst.problem, geom, sc, seed, opts)};
      rec.trace.metadata["eps"] = fmt(inst.ref.eps);
      rec.trace.metadata["R_source"] = inst.ref.source;
      per_seed[k].push_back(std::move(rec));
    }
  };
  // Timed runs go one at a time so they do not compete for cores.
  parallel_for(cfg.seeds.size(), timed ? 1u : cfg.threads, work);
  TraceResult result;
  for (std::size_t k = 0; k < per_seed.size(); ++k) {
    if (unstable[k]) result.unstable_reference = true;
    for (auto& r : per_seed[k]) result.runs.push_back(std::move(r));
  }
  return result;
}

GapBand gap_band(const std::vector<const RunTrace*>& traces, const std::vector<double>& times_s) {
  GapBand band;
  band.times_s = times_s;
  for (double tau : times_s) {
    const auto limit = static_cast<std::int64_t>(tau * 1e9);
    std::vector<double> gaps;
    for (const RunTrace* tr : traces) {
      double g = tr->initial_gap;
      for (const auto& row : tr->rows) {
        if (row.wall_ns > limit) break;
        g = row.gap;
      }
      gaps.push_back(g);
    }
    band.q1.push_back(quantile(gaps, 0.25));
    band.median.push_back(quantile(gaps, 0.5));
    band.q3.push_back(quantile(gaps, 0.75));
  }
  return band;
}

double time_to_gap(const RunTrace& trace, double gap) {
  for (const auto& row : trace.rows)
    if (row.gap <= gap) return static_cast<double>(row.wall_ns) * 1e-9;
  return kInf;
}

TwoRegimeFit fit_two_regime(const std::vector<double>& m, const std::vector<double>& T) {
  if (m.size() != T.size() || m.size() < 2) throw ConfigError("fit_two_regime: need >= 2 paired points");
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m[a] < m[b]; });
  const double mean_T = std::accumulate(T.begin(), T.end(), 0.0) / static_cast<double>(T.size());
  double sst = 0.0;
  for (double v : T) sst += (v - mean_T) * (v - mean_T);

  TwoRegimeFit best;
  double best_sse = kInf;
  const std::size_t n = order.size();
  for (std::size_t k = 0; k <= n; ++k) {
    // points order[0..k) follow a/m, the rest b
    double num = 0.0, den = 0.0, rest = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double inv = 1.0 / m[order[i]];
      num += T[order[i]] * inv;
      den += inv * inv;
    }
    for (std::size_t i = k; i < n; ++i) rest += T[order[i]];
    const double a = den > 0.0 ? num / den : 0.0;
    const double b = k < n ? rest / static_cast<double>(n - k) : 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred = std::max(a / m[i], b);
      sse += (T[i] - pred) * (T[i] - pred);
    }
    if (sse < best_sse) {
      best_sse = sse;
      best.a = a;
      best.b = b;
    }
  }
  best.r2 = sst > 0.0 ? 1.0 - best_sse / sst : (best_sse == 0.0 ? 1.0 : 0.0);
  return best;
}

// ---------------------------------------------------------------------------
// Output

void write_t_eps_csv(const TEpsResult& result, std::ostream& per_seed, std::ostream& summary) {
  per_seed << "seed,m,method,stepsize_scale,T_eps,reached,eps,f_ref,R,status\n";
  for (const auto& r : result.records)
    per_seed << r.seed << ',' << r.m << ',' << r.method << ',' << fmt(r.stepsize_scale) << ',' << r.T << ','
             << (r.reached ? 1 : 0) << ',' << fmt(r.eps) << ',' << fmt(r.f_ref) << ',' << fmt(r.R) << ',' << r.status
             << '\n';
  summary << "m,method,stepsize_scale,seeds,reached,mean,std,median,q1,q3\n";
  for (const auto& c : result.summary)
    summary << c.m << ',' << c.method << ',' << fmt(c.stepsize_scale) << ',' << c.stats.count << ',' << c.reached << ','
            << fmt(c.stats.mean) << ',' << fmt(c.stats.std) << ',' << fmt(c.stats.median) << ',' << fmt(c.stats.q1)
            << ',' << fmt(c.stats.q3) << '\n';
}

void write_traces_csv(const TraceResult& result, std::ostream& os, bool with_time) {
  os << "seed,m,t,u,L,eta,gap,oracle_calls" << (with_time ? ",wall_ns" : "") << '\n';
  for (const auto& run : result.runs)
    for (const auto& r : run.trace.rows) {
      os << run.seed << ',' << run.m << ',' << r.t << ',' << fmt(r.u) << ',' << fmt(r.L) << ',' << fmt(r.eta) << ','
         << fmt(r.gap) << ',' << r.oracle_calls;
      if (with_time) os << ',' << r.wall_ns;
      os << '\n';
    }
}

void write_timing_summary(const TraceResult& result, std::ostream& os) {
  std::vector<int> ms;
  std::vector<double> initial;
  for (const auto& run : result.runs) {
    if (std::find(ms.begin(), ms.end(), run.m) == ms.end()) ms.push_back(run.m);
    initial.push_back(run.trace.initial_gap);
  }
  const double g0 = quantile(initial, 0.5);
  os << "m,gap_fraction,gap,runs,reached,median_time_s,q1_time_s,q3_time_s\n";
  for (int m : ms)
    for (double frac : {0.5, 0.2, 0.1, 0.05, 0.02}) {
      std::vector<double> times;
      std::size_t reached = 0;
      for (const auto& run : result.runs) {
        if (run.m != m) continue;
        const double t = time_to_gap(run.trace, frac * g0);
        if (std::isfinite(t)) ++reached;
        times.push_back(t);
      }
      const SummaryStats s = summarize(times);
      os << m << ',' << fmt(frac) << ',' << fmt(frac * g0) << ',' << times.size() << ',' << reached << ','
         << fmt(s.median) << ',' << fmt(s.q1) << ',' << fmt(s.q3) << '\n';
    }
}

bool run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(cfg.out_dir / name);
    if (!os) throw Error("cannot write " + (cfg.out_dir / name).string());
    return os;
  };
  bool unstable = false;
  switch (cfg.mode) {
    case ExperimentMode::t_eps:
    case ExperimentMode::compare: {
      const bool cmp = cfg.mode == ExperimentMode::compare;
      const TEpsResult res = cmp ? compare_smoothed_vs_plain(cfg) : run_t_eps(cfg);
      auto per_seed = open(cmp ? "compare.csv" : "t_eps.csv");
      auto summary = open(cmp ? "compare_summary.csv" : "t_eps_summary.csv");
      write_t_eps_csv(res, per_seed, summary);
      for (const auto& c : res.summary)
        log << "m=" << c.m << ' ' << c.method << (c.method == "dual_averaging" ? " scale=" + fmt(c.stepsize_scale) : "")
            << "  mean " << fmt(c.stats.mean) << "  std " << fmt(c.stats.std) << "  median " << fmt(c.stats.median)
            << "  reached " << c.reached << '/' << c.stats.count << '\n';
      unstable = res.unstable_reference;
      break;
    }
    case ExperimentMode::trace: {
      const TraceResult res = run_traces(cfg, false);
      auto os = open("traces.csv");
      write_traces_csv(res, os, cfg.record_time);
      log << "wrote " << res.runs.size() << " traces\n";
      unstable = res.unstable_reference;
      break;
    }
    case ExperimentMode::timing: {
      const TraceResult res = run_traces(cfg, true);
      auto os = open("timing_traces.csv");
      write_traces_csv(res, os, true);
      auto sum = open("timing_summary.csv");
      write_timing_summary(res, sum);
      log << "wrote " << res.runs.size() << " timed traces\n";
      unstable = res.unstable_reference;
      break;
    }
  }
  if (unstable) log << "reference optimum unstable for at least one seed\n";
  return !unstable;
}

}  // namespace randsmooth
