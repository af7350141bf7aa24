#ifndef RADAR_ORACLES_HPP
#define RADAR_ORACLES_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "radar/rng.hpp"
#include "radar/types.hpp"

namespace radar {

struct Sample {
  DenseVector x;
  double y = 0.0;
};

// A synthetic problem with known optimum theta_star. Covariates are i.i.d.
// uniform on [-B, B]; least-squares responses are <x, theta_star> + w with
// w ~ N(0, eta^2), logistic labels are sign(<x, theta_star> + w).
struct ProblemInstance {
  DenseVector theta_star;
  int d = 0;
  int s = 0;                    // nonzeros in theta_star
  double covariate_bound = 1.0; // B
  double noise_std_sq = 0.5;    // eta^2
  LossKind loss = LossKind::least_squares;
};

enum class OracleMode {
  fresh_sample,  // every query draws a new i.i.d. sample
  finite_pool,   // every query draws from a fixed pool with replacement
};

// theta_star with exactly s nonzeros on a uniformly random support; the
// nonzero values are magnitude * (random sign).
DenseVector make_sparse_target(int d, int s, Rng& rng,
                               double magnitude = 1.0);

Sample sample_ls(const ProblemInstance& instance, Rng& rng);
Sample sample_logistic(const ProblemInstance& instance, Rng& rng);

// (⟨x, theta⟩ - y) x
DenseVector ls_gradient(const DenseVector& theta, const Sample& sample);

// -y x / (1 + exp(y ⟨theta, x⟩)), saturation-safe.
DenseVector logistic_gradient(const DenseVector& theta, const Sample& sample);

// Stateful stochastic-subgradient source. Single consumer; distinct
// instances never share state and may run on different threads.
class GradientOracle {
 public:
  // Fresh-sample oracle.
  GradientOracle(ProblemInstance instance, std::uint64_t seed);

  // Finite-pool oracle; queries draw uniformly with replacement.
  GradientOracle(ProblemInstance instance, std::vector<Sample> pool,
                 std::uint64_t seed);

  // Draws one sample and returns the loss gradient at theta.
  DenseVector query(const DenseVector& theta);

  const ProblemInstance& instance() const { return instance_; }
  const DenseVector& target() const { return instance_.theta_star; }
  OracleMode mode() const { return mode_; }
  const std::vector<Sample>& pool() const { return pool_; }
  std::int64_t queries_served() const { return queries_; }

 private:
  Sample next_sample();

  ProblemInstance instance_;
  OracleMode mode_;
  std::vector<Sample> pool_;
  Rng rng_;
  std::int64_t queries_ = 0;
};

// Pool import/export: one sample per row, columns x_1..x_d,y.
void write_pool_csv(std::ostream& out, const std::vector<Sample>& pool);
std::vector<Sample> read_pool_csv(std::istream& in, int expected_dim);

}  // namespace radar

#endif
