// Acceptance runner: one line per criterion, nonzero exit if any fails.
//   hypt_acceptance [filter] [seed]
// filter is a comma-separated list of criterion ids or name prefixes.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "hypt/verify.hpp"

int main(int argc, char** argv) {
  hypt::VerifyOptions options;
  if (argc > 1) options.filter = argv[1];
  if (argc > 2) options.seed = std::strtoull(argv[2], nullptr, 10);
  try {
    bool all = true;
    for (const auto& r : hypt::run_verification(options)) {
      all = all && r.passed;
      std::printf("%s criterion %d %s (%.2f s): %s\n", r.passed ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.seconds, r.detail.c_str());
    }
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
