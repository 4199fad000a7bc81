#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hypt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0: no runtime limit
};

struct VerifyOptions {
  /// Comma-separated list of criterion ids or name prefixes; empty runs all.
  std::string filter;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  /// Break the streaming detector while the suite runs (failure-path check).
  bool perturb_detector = false;
};

/// Names of the acceptance criteria, index i holding criterion i + 1.
const std::vector<std::string>& criterion_names();

/// Ids selected by a filter string; throws ErrorCode::kInvalidArgument if a
/// token matches nothing.
std::vector<int> select_criteria(const std::string& filter);

/// Runs the selected criteria in id order. A criterion with a runtime limit
/// fails if it exceeds it.
std::vector<CriterionResult> run_verification(const VerifyOptions& options);

}  // namespace hypt
