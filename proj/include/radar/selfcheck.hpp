#ifndef RADAR_SELFCHECK_HPP
#define RADAR_SELFCHECK_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace radar {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

// The eight acceptance checks: closed-form prox kernel vs numerical
// minimizer, feasibility and radius chain over a full run, convergence-rate
// windows, the two figure orderings, oracle unbiasedness, schedule
// arithmetic, and byte-level determinism. scratch_dir receives the
// experiment artifacts; one line per criterion goes to log.
std::vector<CriterionResult> run_acceptance_suite(
    const std::string& scratch_dir, std::ostream& log);

}  // namespace radar

#endif
