// Runs the full verification suite and fails if any criterion fails.

#include <cstdlib>
#include <iostream>

#include "erw/acceptance.hpp"

int main(int argc, char** argv) {
  erw::AcceptanceOptions opts;
  if (const char* t = std::getenv("ERW_THREADS")) opts.threads = std::atoi(t);
  if (argc > 1) opts.threads = std::atoi(argv[1]);
  auto results = erw::run_acceptance(opts, std::cout);
  bool ok = erw::all_passed(results);
  std::cout << (ok ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << std::endl;
  return ok ? 0 : 1;
}
