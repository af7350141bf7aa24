#ifndef RADAR_VECTOR_OPS_HPP
#define RADAR_VECTOR_OPS_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "radar/errors.hpp"
#include "radar/types.hpp"

namespace radar {

// x^y for x > 0 via exp(y log x). Matches std::pow to ~1e-15 relative but
// never takes the multi-precision fallback that makes std::pow
// data-dependently slow on the exponents used here.
inline double pos_pow(double x, double y) {
  return std::exp(y * std::log(x));
}

inline void check_same_size(const DenseVector& a, const DenseVector& b,
                            const char* where) {
  if (a.size() != b.size()) {
    throw validation_error(std::string(where) + ": dimension mismatch (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
  }
}

inline double dot(const DenseVector& a, const DenseVector& b) {
  check_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double l1_norm(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

inline double linf_norm(const DenseVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double l2_norm_sq(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// ||v||_r for r >= 1, scaled by the max entry so large exponents do not
// overflow: coordinates enter as ratios in [0, 1]. Ratios whose power
// would sink below ~1e-64 are skipped; they cannot move the result and
// subnormal pow results are pathologically slow.
inline double lp_norm(const DenseVector& v, double r) {
  const double m = linf_norm(v);
  if (m == 0.0) return 0.0;
  const double cutoff = std::exp(-148.0 / r);
  double s = 0.0;
  for (double x : v) {
    const double ratio = std::fabs(x) / m;
    if (ratio > cutoff) s += pos_pow(ratio, r);
  }
  return m * pos_pow(s, 1.0 / r);
}

inline DenseVector sub(const DenseVector& a, const DenseVector& b) {
  check_same_size(a, b, "sub");
  DenseVector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - b[j];
  return out;
}

inline void add_inplace(DenseVector& a, const DenseVector& b) {
  check_same_size(a, b, "add_inplace");
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
}

// a += c * b
inline void axpy(DenseVector& a, double c, const DenseVector& b) {
  check_same_size(a, b, "axpy");
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += c * b[j];
}

inline DenseVector scaled(const DenseVector& v, double c) {
  DenseVector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = c * v[j];
  return out;
}

inline double distance_lp(const DenseVector& a, const DenseVector& b,
                          double r) {
  check_same_size(a, b, "distance_lp");
  const std::size_t d = a.size();
  double m = 0.0;
  for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  if (m == 0.0) return 0.0;
  const double cutoff = std::exp(-148.0 / r);
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double ratio = std::fabs(a[j] - b[j]) / m;
    if (ratio > cutoff) s += pos_pow(ratio, r);
  }
  return m * pos_pow(s, 1.0 / r);
}

inline double distance_l2_sq(const DenseVector& a, const DenseVector& b) {
  check_same_size(a, b, "distance_l2_sq");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

inline double distance_l1(const DenseVector& a, const DenseVector& b) {
  check_same_size(a, b, "distance_l1");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::fabs(a[j] - b[j]);
  return s;
}

}  // namespace radar

#endif
