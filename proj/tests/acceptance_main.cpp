// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "combmon/acceptance.hpp"

int main(int argc, char** argv) {
  uint64_t seed = 20260826;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  auto results = combmon::run_acceptance(seed);
  const int failures = combmon::print_acceptance(results, std::cout);
  std::cout << (failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " ("
            << results.size() - failures << "/" << results.size() << ")\n";
  return failures == 0 ? 0 : 1;
}
