#ifndef RADAR_TYPES_HPP
#define RADAR_TYPES_HPP

#include <cstdint>
#include <vector>

namespace radar {

// Dense coordinate vector; the carrier for iterates, dual averages and
// gradients. All kernels are O(d) loops over this representation.
using DenseVector = std::vector<double>;

enum class LossKind {
  least_squares,
  logistic,
};

}  // namespace radar

#endif
