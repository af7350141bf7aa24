#include "radar/engine.hpp"

#include <cmath>
#include <sstream>

#include "radar/errors.hpp"
#include "radar/format.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

std::int64_t RunTrace::default_stride(std::int64_t total_budget,
                                      std::int64_t target_points) {
  if (target_points < 1) target_points = 1;
  const std::int64_t stride = total_budget / target_points;
  return stride < 1 ? 1 : stride;
}

TraceSink::TraceSink(RunTrace& trace, const DenseVector& theta_star,
                     const LpGeometry& geom)
    : trace_(trace), theta_star_(theta_star), geom_(geom) {}

void TraceSink::begin_epoch(int epoch_index, const DenseVector& center,
                            double radius, double lambda) {
  center_ = &center;
  epoch_index_ = epoch_index;
  radius_ = radius;
  lambda_ = lambda;
}

void TraceSink::observe(const DenseVector& theta,
                        std::int64_t global_iteration, bool force) {
  if (!force && !trace_.on_grid(global_iteration)) return;
  if (!trace_.points.empty() &&
      trace_.points.back().iteration == global_iteration) {
    return;  // epoch boundary coinciding with a grid point
  }
  TracePoint point;
  point.iteration = global_iteration;
  point.epoch = epoch_index_;
  point.error_l2_sq = distance_l2_sq(theta, theta_star_);
  point.error_l1 = distance_l1(theta, theta_star_);
  point.radius = radius_;
  point.lambda = lambda_;
  trace_.points.push_back(point);

  if (center_ != nullptr && radius_ > 0.0) {
    const double ratio = distance_lp(theta, *center_, geom_.p) / radius_;
    if (ratio > max_feasibility_ratio_) max_feasibility_ratio_ = ratio;
  }
}

EpochState make_epoch_state(DenseVector center, double radius, double lambda,
                            double alpha) {
  EpochState state;
  state.radius = radius;
  state.lambda = lambda;
  state.alpha = alpha;
  state.mu.assign(center.size(), 0.0);
  state.iterate_sum.assign(center.size(), 0.0);
  state.theta = center;
  state.center = std::move(center);
  state.t = 0;
  return state;
}

EpochResult run_epoch(GradientOracle& oracle, EpochState& state,
                      std::int64_t T_epoch, const LpGeometry& geom,
                      TraceSink* sink, const StopRule* stop) {
  EpochResult result;
  if (T_epoch < 1) {
    result.theta_avg = state.center;
    result.iterations_used = 0;
    return result;
  }

  DenseVector running_avg;
  for (std::int64_t local = 0; local < T_epoch; ++local) {
    DenseVector grad = oracle.query(state.theta);
    if (state.lambda != 0.0) {
      const DenseVector sign = l1_subgradient(state.theta);
      axpy(grad, state.lambda, sign);
    }
    add_inplace(state.mu, grad);

    const double eta =
        state.alpha / std::sqrt(static_cast<double>(local) + 1.0);
    state.theta =
        dual_averaging_step(state.mu, state.center, state.radius, eta, geom);
    add_inplace(state.iterate_sum, state.theta);
    state.t = local + 1;

    if (sink != nullptr) {
      sink->observe(state.theta, sink->advance());
    }
    if (stop != nullptr) {
      running_avg = scaled(state.iterate_sum,
                           1.0 / static_cast<double>(state.t));
      if ((*stop)(running_avg, state.t)) break;
    }
  }

  result.iterations_used = state.t;
  result.theta_avg =
      scaled(state.iterate_sum, 1.0 / static_cast<double>(state.t));
  return result;
}

std::string trace_to_csv(const RunTrace& trace, int trial,
                         const std::string& algorithm) {
  std::ostringstream out;
  out << "trial,algorithm,iteration,epoch,error_l2_sq,error_l1,radius,"
         "lambda\n";
  for (const TracePoint& point : trace.points) {
    out << trial << ',' << algorithm << ',' << point.iteration << ','
        << point.epoch << ',' << format_double(point.error_l2_sq) << ','
        << format_double(point.error_l1) << ',' << format_double(point.radius)
        << ',' << format_double(point.lambda) << '\n';
  }
  return out.str();
}

RunTrace trace_from_csv(const std::string& text) {
  RunTrace trace;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string token;
    std::vector<std::string> cols;
    while (std::getline(fields, token, ',')) cols.push_back(token);
    if (cols.size() != 8) {
      throw io_error("trace_from_csv: expected 8 columns, got " +
                     std::to_string(cols.size()));
    }
    TracePoint point;
    point.iteration = std::stoll(cols[2]);
    point.epoch = std::stoi(cols[3]);
    point.error_l2_sq = std::stod(cols[4]);
    point.error_l1 = std::stod(cols[5]);
    point.radius = std::stod(cols[6]);
    point.lambda = std::stod(cols[7]);
    trace.points.push_back(point);
  }
  return trace;
}

}  // namespace radar
