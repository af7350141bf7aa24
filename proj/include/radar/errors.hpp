#ifndef RADAR_ERRORS_HPP
#define RADAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace radar {

// Error taxonomy mirrors the CLI exit codes:
//   validation_error -> 1, computation_error -> 2, io_error -> 3.

// Bad inputs: dimension/sparsity/label/support out of range, shape
// mismatches, malformed experiment specs.
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// Failures while running: empty sample pool, budget too small for a
// schedule, not enough trace data for a fit, mismatched trace grids.
struct computation_error : std::runtime_error {
  explicit computation_error(const std::string& what)
      : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace radar

#endif
