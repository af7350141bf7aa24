#ifndef RADAR_ENGINE_HPP
#define RADAR_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radar/geometry.hpp"
#include "radar/oracles.hpp"
#include "radar/types.hpp"

namespace radar {

struct TracePoint {
  std::int64_t iteration = 0;  // global, 1-based
  int epoch = 0;
  double error_l2_sq = 0.0;
  double error_l1 = 0.0;
  double radius = 0.0;
  double lambda = 0.0;
};

// Subsampled record of a run. Points land on the canonical grid
// {1, stride, 2*stride, ...} so traces from runs with equal budgets align
// exactly; epoch boundaries are recorded as extra audit rows.
struct RunTrace {
  std::int64_t stride = 1;
  std::vector<TracePoint> points;

  static std::int64_t default_stride(std::int64_t total_budget,
                                     std::int64_t target_points = 500);
  bool on_grid(std::int64_t iteration) const {
    return iteration == 1 || iteration % stride == 0;
  }
};

// Per-run observer threaded through the epoch loop: samples iterate errors
// onto the trace and audits the ball-feasibility of recorded iterates.
class TraceSink {
 public:
  TraceSink(RunTrace& trace, const DenseVector& theta_star,
            const LpGeometry& geom);

  void begin_epoch(int epoch_index, const DenseVector& center, double radius,
                   double lambda);
  std::int64_t advance() { return ++global_iteration_; }
  void observe(const DenseVector& theta, std::int64_t global_iteration,
               bool force = false);

  std::int64_t global_iteration() const { return global_iteration_; }
  // max over recorded iterates of ||theta - center||_p / radius
  double max_feasibility_ratio() const { return max_feasibility_ratio_; }

 private:
  RunTrace& trace_;
  const DenseVector& theta_star_;
  const LpGeometry& geom_;
  const DenseVector* center_ = nullptr;
  int epoch_index_ = 0;
  double radius_ = 0.0;
  double lambda_ = 0.0;
  std::int64_t global_iteration_ = 0;
  double max_feasibility_ratio_ = 0.0;
};

// Mutable state of one epoch of the dual-averaging recursion.
struct EpochState {
  DenseVector center;       // prox center y_i
  double radius = 0.0;      // R_i
  double lambda = 0.0;      // lambda_i
  double alpha = 0.0;       // step multiplier
  DenseVector mu;           // dual average
  DenseVector theta;        // current iterate
  DenseVector iterate_sum;  // sum of produced iterates
  std::int64_t t = 0;       // iterations taken in this epoch
};

EpochState make_epoch_state(DenseVector center, double radius, double lambda,
                            double alpha);

struct EpochResult {
  DenseVector theta_avg;
  std::int64_t iterations_used = 0;
};

// Early-termination predicate, checked every iteration on the running
// average of the epoch's iterates.
using StopRule =
    std::function<bool(const DenseVector& running_avg, std::int64_t t)>;

// Runs up to T_epoch dual-averaging iterations: query the oracle at theta,
// add the composite subgradient g + lambda * sign(theta) to mu, then map mu
// through the constrained prox step with step alpha/sqrt(t+1). Returns the
// average of the produced iterates and the number of iterations consumed.
// T_epoch < 1 is a no-op returning the center.
EpochResult run_epoch(GradientOracle& oracle, EpochState& state,
                      std::int64_t T_epoch, const LpGeometry& geom,
                      TraceSink* sink, const StopRule* stop = nullptr);

// trial,algorithm,iteration,epoch,error_l2_sq,error_l1,radius,lambda
std::string trace_to_csv(const RunTrace& trace, int trial,
                         const std::string& algorithm);
RunTrace trace_from_csv(const std::string& text);

}  // namespace radar

#endif
