// Runs the eleven acceptance scenarios and prints one PASS/FAIL line each.

#include "cfinsler/scenarios.hpp"

#include <iostream>

int main() {
  const auto results = cfinsler::run_scenario("all");
  int failed = 0;
  for (const auto& r : results) {
    std::cout << cfinsler::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
