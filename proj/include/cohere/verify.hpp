#pragma once

#include <string>
#include <vector>

namespace cohere
{
struct CheckResult
{
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks across all modules (seconds on one core).
std::vector<CheckResult> run_invariant_suite(int threads = 1);

} // namespace cohere
