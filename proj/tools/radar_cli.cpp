// Command-line front end: `run` executes an experiment from a config file
// plus flag overrides, `fit` recomputes rate reports from existing traces,
// `prox-check` validates the closed-form kernel against the numerical
// minimizer, and `selftest` runs the full acceptance suite.

#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "radar/errors.hpp"
#include "radar/format.hpp"
#include "radar/harness.hpp"
#include "radar/selfcheck.hpp"
#include "radar/validation.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_option(CLI::App* cmd, RunOptions& options,
                         const std::string& flag, const std::string& key,
                         const std::string& help) {
  auto handler = [&options, key](const std::string& value) {
    options.overrides.emplace_back(key, value);
  };
  cmd->add_option_function<std::string>(flag, handler, help);
}

int do_run(const RunOptions& options) {
  radar::ExperimentSpec spec;
  if (!options.config_path.empty()) {
    spec = radar::parse_config_file(options.config_path);
  }
  for (const auto& [key, value] : options.overrides) {
    radar::apply_config_entry(spec, key, value);
  }
  if (spec.algorithms.empty()) {
    // full baseline comparison by default
    for (const char* name :
         {"radar", "radar_const", "eda", "rda", "sgd"}) {
      spec.algorithms.push_back(radar::algorithm_from_name(name));
    }
  }
  const radar::ExperimentResult result = radar::run_experiment(spec);
  std::cout << "wrote " << result.files_written.size() << " files to "
            << spec.out_dir << "\n";
  for (const radar::AlgorithmSummary& summary : result.summaries) {
    std::cout << "  " << summary.algorithm << ": final mean error "
              << radar::format_double(summary.final_mean_error)
              << ", trailing-decade slope "
              << radar::format_double(summary.slope_trailing_decade) << "\n";
  }
  return 0;
}

int do_fit(const std::string& dir) {
  const auto summaries = radar::fit_from_directory(dir);
  std::cout << "algorithm,slope_trailing_decade,final_mean_error_l2_sq\n";
  for (const radar::AlgorithmSummary& summary : summaries) {
    std::cout << summary.algorithm << ','
              << radar::format_double(summary.slope_trailing_decade) << ','
              << radar::format_double(summary.final_mean_error) << "\n";
  }
  return 0;
}

int do_prox_check(const std::vector<int>& dims, int count,
                  std::uint64_t seed, bool force_p2) {
  bool ok = true;
  for (int d : dims) {
    const radar::ProxCheckStats stats =
        radar::run_prox_check(d, count, seed, force_p2);
    const bool pass = stats.max_linf_gap <= 1e-6 &&
                      stats.max_objective_gap <= 1e-8 &&
                      stats.max_feasibility_excess <= 1e-9;
    ok = ok && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " d=" << d << " instances="
              << stats.instances
              << " max_linf_gap=" << radar::format_double(stats.max_linf_gap)
              << " max_objective_gap="
              << radar::format_double(stats.max_objective_gap)
              << " max_feasibility_excess="
              << radar::format_double(stats.max_feasibility_excess) << "\n";
  }
  return ok ? 0 : 2;
}

int do_selftest(const std::string& out_dir) {
  const auto results = radar::run_acceptance_suite(out_dir, std::cout);
  for (const radar::CriterionResult& criterion : results) {
    if (!criterion.passed) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealed epoch dual-averaging benchmark harness"};
  app.require_subcommand(1);

  RunOptions run_options;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run an experiment and write trace/summary "
                                "CSVs");
  run_cmd->add_option("--config", run_options.config_path,
                      "key=value config file");
  add_override_option(run_cmd, run_options, "--out", "out",
                      "output directory");
  add_override_option(run_cmd, run_options, "--seed", "seed", "master seed");
  add_override_option(run_cmd, run_options, "--trials", "trials",
                      "trials per algorithm");
  add_override_option(run_cmd, run_options, "--algo", "algo",
                      "comma list: radar,radar_const,eda,rda,sgd");
  add_override_option(run_cmd, run_options, "--dim", "dim",
                      "problem dimension");
  add_override_option(run_cmd, run_options, "--budget", "budget",
                      "total iteration budget T");
  add_override_option(run_cmd, run_options, "--epoch-mode", "epoch-mode",
                      "theoretical | oracle-halving");
  add_override_option(run_cmd, run_options, "--sparsity", "sparsity",
                      "nonzeros in the target (0 = ceil(ln d))");
  add_override_option(run_cmd, run_options, "--loss", "loss",
                      "least_squares | logistic");
  add_override_option(run_cmd, run_options, "--b", "b",
                      "covariate bound B");
  add_override_option(run_cmd, run_options, "--noise-sq", "noise_sq",
                      "observation noise variance");
  add_override_option(run_cmd, run_options, "--c1", "c1",
                      "epoch length constant");
  add_override_option(run_cmd, run_options, "--r1", "r1",
                      "initial radius (0 = ||theta*||_1)");
  add_override_option(run_cmd, run_options, "--gamma", "gamma",
                      "curvature constant (0 = derived)");
  add_override_option(run_cmd, run_options, "--tau", "tau",
                      "curvature tolerance");
  add_override_option(run_cmd, run_options, "--omega", "omega",
                      "confidence parameter (0 = sqrt(ln d))");
  add_override_option(run_cmd, run_options, "--stride", "stride",
                      "trace sampling stride (0 = budget/500)");
  add_override_option(run_cmd, run_options, "--pool", "pool",
                      "finite pool size (0 = fresh samples)");
  add_override_option(run_cmd, run_options, "--workers", "workers",
                      "parallel trial cap (0 = RADAR_WORKERS or hardware)");
  add_override_option(run_cmd, run_options, "--target-magnitude",
                      "target-magnitude", "nonzero magnitude of theta*");
  add_override_option(run_cmd, run_options, "--sgd-step-scale",
                      "sgd-step-scale", "SGD step is scale/t (0 = 1/gamma)");

  std::string fit_dir;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "recompute trailing-decade slopes from written traces");
  fit_cmd->add_option("--out", fit_dir, "directory containing *.trace.csv")
      ->required();

  std::vector<int> prox_dims{3, 10, 50};
  int prox_count = 100;
  std::uint64_t prox_seed = 20120924;
  bool prox_p2 = false;
  CLI::App* prox_cmd = app.add_subcommand(
      "prox-check", "closed-form prox step vs numerical minimizer");
  prox_cmd->add_option("--dims", prox_dims, "dimensions to check");
  prox_cmd->add_option("--count", prox_count, "instances per dimension");
  prox_cmd->add_option("--seed", prox_seed, "seed");
  prox_cmd->add_flag("--p2", prox_p2, "force the p = 2 geometry");

  std::string selftest_dir = "selftest_out";
  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run the acceptance suite");
  selftest_cmd->add_option("--out", selftest_dir,
                           "scratch directory for artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_options);
    if (fit_cmd->parsed()) return do_fit(fit_dir);
    if (prox_cmd->parsed()) {
      return do_prox_check(prox_dims, prox_count, prox_seed, prox_p2);
    }
    if (selftest_cmd->parsed()) return do_selftest(selftest_dir);
  } catch (const radar::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const radar::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
