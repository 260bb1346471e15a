#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

// End-to-end validation suite: ten numbered criteria covering integrator
// sanity, trajectory/master-equation agreement, fluorescence structure,
// dephasing and measurement rates, jump tracking, confidence times, oracle
// equivalences and determinism. All tolerances are pinned here.
namespace combmon {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the requested criteria (all ten when ids is empty). Exceptions are
// caught per criterion and reported as failures.
std::vector<CriterionResult> run_acceptance(uint64_t seed,
                                            const std::vector<int>& ids = {});

// One "criterion N: PASS/FAIL (detail)" line per result; returns the count
// of failures.
int print_acceptance(const std::vector<CriterionResult>& results,
                     std::ostream& os);

}  // namespace combmon
