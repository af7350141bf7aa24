#include "radar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "radar/errors.hpp"
#include "radar/format.hpp"
#include "radar/rng.hpp"
#include "radar/schedule.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

namespace {

constexpr std::uint64_t kTargetTag = 0x7461;  // theta_star stream
constexpr std::uint64_t kOracleTag = 0x6f72;  // per-trial oracle streams
constexpr std::uint64_t kPoolTag = 0x706f;    // finite-pool generation

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>* files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("write failed for '" + path + "'");
  if (files != nullptr) files->push_back(path);
}

}  // namespace

std::uint64_t target_seed(std::uint64_t master) {
  return derive_seed(master, kTargetTag);
}

std::uint64_t oracle_seed(std::uint64_t master, int trial) {
  return derive_seed(master, kOracleTag,
                     static_cast<std::uint64_t>(trial) + 1);
}

void validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> bad;
  if (spec.dimension < 3) bad.push_back("dimension (must be >= 3)");
  if (spec.sparsity < 0 || spec.sparsity > spec.dimension) {
    bad.push_back("sparsity (must be in [0, dimension])");
  }
  if (spec.algorithms.empty()) bad.push_back("algorithms (need at least one)");
  if (spec.trials < 1) bad.push_back("trials (must be >= 1)");
  if (spec.total_budget < 1) bad.push_back("budget (must be >= 1)");
  if (!(spec.covariate_bound > 0.0)) bad.push_back("b (must be > 0)");
  if (spec.noise_std_sq < 0.0) bad.push_back("noise_sq (must be >= 0)");
  if (!(spec.c1 > 0.0)) bad.push_back("c1 (must be > 0)");
  if (spec.r1 < 0.0) bad.push_back("r1 (must be >= 0)");
  if (spec.tau < 0.0) bad.push_back("tau (must be >= 0)");
  if (spec.trace_stride < 0) bad.push_back("stride (must be >= 0)");
  if (spec.pool_size < 0) bad.push_back("pool (must be >= 0)");
  if (spec.workers < 0) bad.push_back("workers (must be >= 0)");
  if (!bad.empty()) {
    std::string msg = "invalid experiment spec:";
    for (const std::string& field : bad) msg += " " + field + ";";
    throw validation_error(msg);
  }
}

ResolvedExperiment resolve_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  ResolvedExperiment resolved;

  const double log_dim = std::log(static_cast<double>(spec.dimension));
  const int sparsity =
      spec.sparsity > 0 ? spec.sparsity
                        : static_cast<int>(std::ceil(log_dim));

  Rng target_rng(target_seed(spec.seed));
  ProblemInstance instance;
  instance.d = spec.dimension;
  instance.s = sparsity;
  instance.covariate_bound = spec.covariate_bound;
  instance.noise_std_sq = spec.noise_std_sq;
  instance.loss = spec.loss;
  instance.theta_star = make_sparse_target(spec.dimension, sparsity,
                                           target_rng, spec.target_magnitude);
  resolved.r1 = spec.r1 > 0.0 ? spec.r1 : l1_norm(instance.theta_star);

  ProblemConstants constants;
  constants.loss = spec.loss;
  constants.log_dim = log_dim;
  constants.sparsity = sparsity;
  constants.tau = spec.tau;
  constants.covariate_bound = spec.covariate_bound;
  constants.noise_std_sq = spec.noise_std_sq;
  constants.omega = spec.omega > 0.0 ? spec.omega : std::sqrt(log_dim);
  // Uniform[-B, B] coordinates give Sigma = (B^2/3) I.
  const double sigma_min =
      spec.cov_min_eig > 0.0
          ? spec.cov_min_eig
          : spec.covariate_bound * spec.covariate_bound / 3.0;
  constants.cov_min_eig = sigma_min;
  if (spec.loss == LossKind::least_squares) {
    constants.gamma = spec.gamma > 0.0 ? spec.gamma : sigma_min;
  } else {
    const LogisticConstants logistic =
        logistic_constants(spec.covariate_bound, resolved.r1, sigma_min);
    constants.lipschitz_g =
        spec.lipschitz_g > 0.0 ? spec.lipschitz_g : logistic.g;
    constants.noise_sigma =
        spec.noise_sigma > 0.0 ? spec.noise_sigma : logistic.sigma;
    constants.gamma = spec.gamma > 0.0 ? spec.gamma : logistic.gamma;
  }

  resolved.instance = std::move(instance);
  resolved.constants = constants;
  resolved.trace_stride =
      spec.trace_stride > 0 ? spec.trace_stride
                            : RunTrace::default_stride(spec.total_budget);
  return resolved;
}

int resolve_worker_count(const ExperimentSpec& spec, int jobs) {
  int workers = spec.workers;
  if (workers == 0) {
    if (const char* env = std::getenv("RADAR_WORKERS")) {
      workers = std::atoi(env);
    }
  }
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (workers < 1) workers = 1;
  return std::min(workers, std::max(jobs, 1));
}

double fit_rate(const std::vector<std::pair<std::int64_t, double>>& points) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [iteration, error] : points) {
    if (iteration >= 1 && error > 0.0) {
      usable.emplace_back(static_cast<double>(iteration), error);
    }
  }
  if (usable.size() < 3) {
    throw computation_error("fit_rate: need at least 3 positive points");
  }
  double lo = usable.front().first, hi = usable.front().first;
  for (const auto& [it, err] : usable) {
    lo = std::min(lo, it);
    hi = std::max(hi, it);
  }
  if (hi < 10.0 * lo) {
    throw computation_error(
        "fit_rate: iterations must span at least one decade");
  }

  const double window_lo = hi / 10.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& [it, err] : usable) {
    if (it < window_lo) continue;
    const double x = std::log(it);
    const double y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) {
    throw computation_error(
        "fit_rate: fewer than 3 points in the trailing decade");
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) {
    throw computation_error("fit_rate: degenerate abscissae");
  }
  return (n * sxy - sx * sy) / denom;
}

AlgorithmSummary summarize(const std::string& algorithm,
                           const std::vector<RunTrace>& traces) {
  if (traces.empty()) {
    throw computation_error("summarize: no traces");
  }
  // Common iteration grid across trials; epoch-boundary audit rows are
  // trial-specific and drop out of the intersection.
  std::set<std::int64_t> grid;
  for (const TracePoint& point : traces.front().points) {
    grid.insert(point.iteration);
  }
  for (std::size_t t = 1; t < traces.size(); ++t) {
    std::set<std::int64_t> seen;
    for (const TracePoint& point : traces[t].points) {
      seen.insert(point.iteration);
    }
    std::set<std::int64_t> merged;
    for (std::int64_t it : grid) {
      if (seen.count(it)) merged.insert(it);
    }
    grid.swap(merged);
  }
  if (grid.empty()) {
    throw computation_error("summarize: traces for '" + algorithm +
                            "' share no grid points (mismatched grids)");
  }

  AlgorithmSummary summary;
  summary.algorithm = algorithm;

  std::vector<std::pair<std::int64_t, double>> mean_series;
  for (std::int64_t iteration : grid) {
    double sum = 0.0, sum_sq = 0.0;
    for (const RunTrace& trace : traces) {
      // Grid membership was established above; find the row.
      const auto it = std::find_if(
          trace.points.begin(), trace.points.end(),
          [iteration](const TracePoint& p) { return p.iteration == iteration; });
      sum += it->error_l2_sq;
      sum_sq += it->error_l2_sq * it->error_l2_sq;
    }
    const double n = static_cast<double>(traces.size());
    const double mean = sum / n;
    double stderr_error = 0.0;
    if (traces.size() > 1) {
      const double variance =
          std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
      stderr_error = std::sqrt(variance / n);
    }
    SummaryRow row;
    row.algorithm = algorithm;
    row.iteration = iteration;
    row.mean_error_l2_sq = mean;
    row.stderr_error = stderr_error;
    summary.rows.push_back(row);
    mean_series.emplace_back(iteration, mean);
  }

  double slope = std::numeric_limits<double>::quiet_NaN();
  try {
    slope = fit_rate(mean_series);
  } catch (const computation_error&) {
    // Short smoke runs cannot support a fit; the summary still stands.
  }
  summary.slope_trailing_decade = slope;
  for (SummaryRow& row : summary.rows) row.slope_trailing_decade = slope;
  summary.final_mean_error = summary.rows.back().mean_error_l2_sq;
  return summary;
}

namespace {

std::string summaries_to_csv(const std::vector<AlgorithmSummary>& summaries) {
  std::ostringstream out;
  out << "algorithm,iteration,mean_error_l2_sq,stderr,slope_trailing_decade\n";
  for (const AlgorithmSummary& summary : summaries) {
    for (const SummaryRow& row : summary.rows) {
      out << row.algorithm << ',' << row.iteration << ','
          << format_double(row.mean_error_l2_sq) << ','
          << format_double(row.stderr_error) << ','
          << format_double(row.slope_trailing_decade) << '\n';
    }
  }
  return out.str();
}

std::string ratefit_to_csv(const std::vector<AlgorithmSummary>& summaries) {
  std::ostringstream out;
  out << "algorithm,slope_trailing_decade,final_mean_error_l2_sq\n";
  for (const AlgorithmSummary& summary : summaries) {
    out << summary.algorithm << ','
        << format_double(summary.slope_trailing_decade) << ','
        << format_double(summary.final_mean_error) << '\n';
  }
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const ResolvedExperiment resolved = resolve_experiment(spec);
  if (spec.out_dir.empty()) {
    throw validation_error("invalid experiment spec: out (must be set);");
  }

  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) {
    throw io_error("cannot create output directory '" + spec.out_dir +
                   "': " + ec.message());
  }

  const int n_algos = static_cast<int>(spec.algorithms.size());
  const int jobs = n_algos * spec.trials;

  ExperimentResult result;
  result.results.assign(static_cast<std::size_t>(n_algos), {});
  for (auto& per_algo : result.results) {
    per_algo.resize(static_cast<std::size_t>(spec.trials));
  }
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(jobs));

  // Optional shared finite pool, generated from its own seed stream and
  // persisted for reproducibility.
  std::vector<Sample> pool;
  if (spec.pool_size > 0) {
    Rng pool_rng(derive_seed(spec.seed, kPoolTag));
    pool.reserve(static_cast<std::size_t>(spec.pool_size));
    for (std::int64_t i = 0; i < spec.pool_size; ++i) {
      pool.push_back(spec.loss == LossKind::least_squares
                         ? sample_ls(resolved.instance, pool_rng)
                         : sample_logistic(resolved.instance, pool_rng));
    }
    std::ostringstream pool_csv;
    write_pool_csv(pool_csv, pool);
    write_file(spec.out_dir + "/pool.csv", pool_csv.str(),
               &result.files_written);
  }

  auto run_job = [&](int job) {
    const int algo_idx = job / spec.trials;
    const int trial = job % spec.trials;

    AlgorithmConfig config;
    config.kind = spec.algorithms[static_cast<std::size_t>(algo_idx)];
    config.r1 = resolved.r1;
    config.total_budget = spec.total_budget;
    config.epoch_mode = spec.epoch_mode;
    config.constants = resolved.constants;
    config.c1 = spec.c1;
    config.trace_stride = resolved.trace_stride;
    config.sgd_step_scale = spec.sgd_step_scale;

    const std::uint64_t seed = oracle_seed(spec.seed, trial);
    GradientOracle oracle =
        pool.empty() ? GradientOracle(resolved.instance, seed)
                     : GradientOracle(resolved.instance, pool, seed);
    result.results[static_cast<std::size_t>(algo_idx)]
                  [static_cast<std::size_t>(trial)] =
        run_algorithm(oracle, config);
  };

  const int workers = resolve_worker_count(spec, jobs);
  if (workers <= 1) {
    for (int job = 0; job < jobs; ++job) {
      try {
        run_job(job);
      } catch (...) {
        failures[static_cast<std::size_t>(job)] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next_job{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        while (true) {
          const int job = next_job.fetch_add(1);
          if (job >= jobs) return;
          try {
            run_job(job);
          } catch (...) {
            failures[static_cast<std::size_t>(job)] =
                std::current_exception();
          }
        }
      });
    }
    for (std::thread& thread : threads) thread.join();
  }
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Persist per-run artifacts in deterministic order, then aggregate.
  for (int a = 0; a < n_algos; ++a) {
    const std::string name =
        algorithm_name(spec.algorithms[static_cast<std::size_t>(a)]);
    for (int t = 0; t < spec.trials; ++t) {
      const RunResult& run =
          result.results[static_cast<std::size_t>(a)]
                        [static_cast<std::size_t>(t)];
      const std::string base =
          spec.out_dir + "/" + name + "_trial" + std::to_string(t + 1);
      write_file(base + ".trace.csv", trace_to_csv(run.trace, t + 1, name),
                 &result.files_written);
      write_file(base + ".plan.csv", run.plan_used.to_csv(),
                 &result.files_written);
    }
  }

  for (int a = 0; a < n_algos; ++a) {
    const std::string name =
        algorithm_name(spec.algorithms[static_cast<std::size_t>(a)]);
    std::vector<RunTrace> traces;
    traces.reserve(static_cast<std::size_t>(spec.trials));
    for (int t = 0; t < spec.trials; ++t) {
      traces.push_back(result.results[static_cast<std::size_t>(a)]
                                     [static_cast<std::size_t>(t)].trace);
    }
    result.summaries.push_back(summarize(name, traces));
  }

  write_file(spec.out_dir + "/summary.csv", summaries_to_csv(result.summaries),
             &result.files_written);
  write_file(spec.out_dir + "/ratefit.csv", ratefit_to_csv(result.summaries),
             &result.files_written);
  return result;
}

std::vector<AlgorithmSummary> fit_from_directory(const std::string& dir) {
  std::map<std::string, std::vector<RunTrace>> by_algorithm;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) {
    throw io_error("cannot read directory '" + dir + "': " + ec.message());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : it) {
    const std::string filename = entry.path().filename().string();
    if (filename.size() > 10 &&
        filename.substr(filename.size() - 10) == ".trace.csv") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    // algorithm name is the second column of the first data row
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    std::string algorithm = "unknown";
    if (std::getline(lines, line)) {
      const auto first_comma = line.find(',');
      const auto second_comma = line.find(',', first_comma + 1);
      if (first_comma != std::string::npos &&
          second_comma != std::string::npos) {
        algorithm =
            line.substr(first_comma + 1, second_comma - first_comma - 1);
      }
    }
    by_algorithm[algorithm].push_back(trace_from_csv(text));
  }
  if (by_algorithm.empty()) {
    throw computation_error("fit: no .trace.csv files in '" + dir + "'");
  }
  std::vector<AlgorithmSummary> summaries;
  for (auto& [algorithm, traces] : by_algorithm) {
    summaries.push_back(summarize(algorithm, traces));
  }
  return summaries;
}

void apply_config_entry(ExperimentSpec& spec, const std::string& key,
                        const std::string& value) {
  try {
    if (key == "dim") {
      spec.dimension = std::stoi(value);
    } else if (key == "sparsity") {
      spec.sparsity = std::stoi(value);
    } else if (key == "loss") {
      if (value == "least_squares") {
        spec.loss = LossKind::least_squares;
      } else if (value == "logistic") {
        spec.loss = LossKind::logistic;
      } else {
        throw validation_error("config: unknown loss '" + value + "'");
      }
    } else if (key == "b") {
      spec.covariate_bound = std::stod(value);
    } else if (key == "noise_sq") {
      spec.noise_std_sq = std::stod(value);
    } else if (key == "algo") {
      spec.algorithms.clear();
      std::istringstream list(value);
      std::string name;
      while (std::getline(list, name, ',')) {
        if (!name.empty()) spec.algorithms.push_back(algorithm_from_name(name));
      }
    } else if (key == "trials") {
      spec.trials = std::stoi(value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "out") {
      spec.out_dir = value;
    } else if (key == "budget") {
      spec.total_budget = std::stoll(value);
    } else if (key == "stride") {
      spec.trace_stride = std::stoll(value);
    } else if (key == "epoch-mode" || key == "epoch_mode") {
      if (value == "theoretical") {
        spec.epoch_mode = EpochMode::doubling;
      } else if (value == "oracle-halving" || value == "oracle_halving") {
        spec.epoch_mode = EpochMode::oracle_halving;
      } else {
        throw validation_error("config: unknown epoch mode '" + value + "'");
      }
    } else if (key == "c1") {
      spec.c1 = std::stod(value);
    } else if (key == "r1") {
      spec.r1 = std::stod(value);
    } else if (key == "gamma") {
      spec.gamma = std::stod(value);
    } else if (key == "tau") {
      spec.tau = std::stod(value);
    } else if (key == "omega") {
      spec.omega = std::stod(value);
    } else if (key == "cov-min-eig" || key == "cov_min_eig") {
      spec.cov_min_eig = std::stod(value);
    } else if (key == "lipschitz-g" || key == "lipschitz_g") {
      spec.lipschitz_g = std::stod(value);
    } else if (key == "noise-sigma" || key == "noise_sigma") {
      spec.noise_sigma = std::stod(value);
    } else if (key == "target-magnitude" || key == "target_magnitude") {
      spec.target_magnitude = std::stod(value);
    } else if (key == "sgd-step-scale" || key == "sgd_step_scale") {
      spec.sgd_step_scale = std::stod(value);
    } else if (key == "pool") {
      spec.pool_size = std::stoll(value);
    } else if (key == "workers") {
      spec.workers = std::stoi(value);
    } else {
      throw validation_error("config: unknown key '" + key + "'");
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const validation_error*>(&e) != nullptr) throw;
    throw validation_error("config: bad value '" + value + "' for key '" +
                           key + "'");
  } catch (const std::out_of_range&) {
    throw validation_error("config: value out of range for key '" + key +
                           "'");
  }
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  ExperimentSpec spec;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error("config: line " + std::to_string(line_number) +
                             " is not key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    apply_config_entry(spec, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
  return spec;
}

}  // namespace radar
