#include "radar/oracles.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "radar/errors.hpp"
#include "radar/format.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

DenseVector make_sparse_target(int d, int s, Rng& rng, double magnitude) {
  if (s < 1 || s > d) {
    throw validation_error("make_sparse_target: sparsity " +
                           std::to_string(s) + " out of range for d = " +
                           std::to_string(d));
  }
  // Partial Fisher-Yates picks the support uniformly.
  std::vector<int> indices(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) indices[static_cast<std::size_t>(j)] = j;
  DenseVector target(static_cast<std::size_t>(d), 0.0);
  for (int k = 0; k < s; ++k) {
    const std::size_t pick =
        static_cast<std::size_t>(k) +
        rng.uniform_index(static_cast<std::size_t>(d - k));
    std::swap(indices[static_cast<std::size_t>(k)], indices[pick]);
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    target[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])] =
        sign * magnitude;
  }
  return target;
}

Sample sample_ls(const ProblemInstance& instance, Rng& rng) {
  Sample sample;
  sample.x.resize(static_cast<std::size_t>(instance.d));
  const double b = instance.covariate_bound;
  for (double& xj : sample.x) xj = rng.uniform(-b, b);
  double noise = 0.0;
  if (instance.noise_std_sq > 0.0) {
    noise = std::sqrt(instance.noise_std_sq) * rng.normal();
  }
  sample.y = dot(sample.x, instance.theta_star) + noise;
  return sample;
}

Sample sample_logistic(const ProblemInstance& instance, Rng& rng) {
  Sample sample = sample_ls(instance, rng);
  sample.y = sample.y >= 0.0 ? 1.0 : -1.0;
  return sample;
}

DenseVector ls_gradient(const DenseVector& theta, const Sample& sample) {
  const double residual = dot(sample.x, theta) - sample.y;
  return scaled(sample.x, residual);
}

DenseVector logistic_gradient(const DenseVector& theta,
                              const Sample& sample) {
  if (sample.y != 1.0 && sample.y != -1.0) {
    throw validation_error("logistic_gradient: label must be -1 or +1");
  }
  const double margin = sample.y * dot(theta, sample.x);
  // -y sigmoid(-margin); the exp argument is kept nonpositive.
  double factor;
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    factor = -sample.y * e / (1.0 + e);
  } else {
    factor = -sample.y / (1.0 + std::exp(margin));
  }
  return scaled(sample.x, factor);
}

GradientOracle::GradientOracle(ProblemInstance instance, std::uint64_t seed)
    : instance_(std::move(instance)),
      mode_(OracleMode::fresh_sample),
      rng_(seed) {}

GradientOracle::GradientOracle(ProblemInstance instance,
                               std::vector<Sample> pool, std::uint64_t seed)
    : instance_(std::move(instance)),
      mode_(OracleMode::finite_pool),
      pool_(std::move(pool)),
      rng_(seed) {}

Sample GradientOracle::next_sample() {
  if (mode_ == OracleMode::finite_pool) {
    if (pool_.empty()) {
      throw computation_error("GradientOracle: finite pool is empty");
    }
    return pool_[rng_.uniform_index(pool_.size())];
  }
  return instance_.loss == LossKind::least_squares
             ? sample_ls(instance_, rng_)
             : sample_logistic(instance_, rng_);
}

DenseVector GradientOracle::query(const DenseVector& theta) {
  check_same_size(theta, instance_.theta_star, "GradientOracle::query");
  const Sample sample = next_sample();
  ++queries_;
  return instance_.loss == LossKind::least_squares
             ? ls_gradient(theta, sample)
             : logistic_gradient(theta, sample);
}

void write_pool_csv(std::ostream& out, const std::vector<Sample>& pool) {
  if (pool.empty()) return;
  const std::size_t d = pool.front().x.size();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (const Sample& sample : pool) {
    for (double xj : sample.x) out << format_double(xj) << ',';
    out << format_double(sample.y) << '\n';
  }
}

std::vector<Sample> read_pool_csv(std::istream& in, int expected_dim) {
  std::vector<Sample> pool;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("x1,", 0) == 0) continue;  // header row
    }
    std::istringstream fields(line);
    std::string token;
    std::vector<double> values;
    while (std::getline(fields, token, ',')) {
      values.push_back(std::stod(token));
    }
    if (values.size() != static_cast<std::size_t>(expected_dim) + 1) {
      throw io_error("read_pool_csv: row has " +
                     std::to_string(values.size()) + " fields, expected " +
                     std::to_string(expected_dim + 1));
    }
    Sample sample;
    sample.y = values.back();
    values.pop_back();
    sample.x = std::move(values);
    pool.push_back(std::move(sample));
  }
  return pool;
}

}  // namespace radar
