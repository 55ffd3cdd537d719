// randsmooth: command-line driver for the experiment harness.
//
//   randsmooth run --config <path>
//   randsmooth table1 --d 50 --seeds 20
//   randsmooth compare-smoothing
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 reference optimum unstable.

#include "randsmooth/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kUnstable = 3;

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<std::uint64_t>(i));
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace randsmooth;

  CLI::App app{"Accelerated randomized-smoothing experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  app.add_option("--seed", seed, "Seed (run: single seed; table1/compare: first of the seed range)");
  app.add_option("--out-dir", out_dir, "Directory for CSV output");
  app.add_option("--threads", threads, "Worker threads for independent seeds")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  run->add_option("--config", config_path, "key = value config file")->required();

  auto* table1 = app.add_subcommand("table1", "T(eps, m) on robust regression over the Table 1 m grid");
  std::int64_t table_d = 50;
  int table_seeds = 20;
  std::int64_t table_T = 20000;
  table1->add_option("--d", table_d, "Dimension")->check(CLI::PositiveNumber);
  table1->add_option("--seeds", table_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  table1->add_option("--T", table_T, "Iteration cap per run")->check(CLI::Range(4, 100000000));

  auto* compare = app.add_subcommand("compare-smoothing", "Smoothed accelerated method vs dual averaging on the l1 centroid");
  std::int64_t cmp_d = 50;
  int cmp_seeds = 20;
  compare->add_option("--d", cmp_d, "Dimension")->check(CLI::PositiveNumber);
  compare->add_option("--seeds", cmp_seeds, "Number of seeds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    ExperimentConfig cfg;
    if (*run) {
      cfg = load_config(config_path);
      if (seed) cfg.seeds = {*seed};
    } else if (*table1) {
      cfg.mode = ExperimentMode::t_eps;
      cfg.problem.kind = "robust_regression";
      cfg.problem.d = table_d;
      cfg.m_list = {1, 2, 3, 5, 20, 100, 1000, 10000};
      cfg.T = table_T;
      cfg.seeds = seed_range(seed.value_or(1), table_seeds);
      cfg.out_dir = "out/table1";
    } else {
      cfg.mode = ExperimentMode::compare;
      cfg.problem.kind = "l1_centroid";
      cfg.problem.d = cmp_d;
      cfg.m_list = {1, 2, 4, 8, 16, 32, 64};
      cfg.T = 20000;
      cfg.seeds = seed_range(seed.value_or(1), cmp_seeds);
      cfg.out_dir = "out/compare";
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (app.count("--threads")) cfg.threads = threads;
    cfg.validate();

    const bool stable = run_experiment(cfg, std::cout);
    std::cout << "output written to " << cfg.out_dir.string() << '\n';
    return stable ? kOk : kUnstable;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ReferenceInstability& e) {
    std::cerr << "reference optimum unstable: " << e.what() << '\n';
    return kUnstable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
