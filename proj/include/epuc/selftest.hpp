#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epuc/metrics.hpp"

namespace epuc {

struct SelfTestOptions {
  std::uint64_t seed = 20240607;
  unsigned threads = 1;
  /// Stabiliser handed to the empirical C_k path. Only changed to prove the
  /// exact-value checks can fail.
  double epsilon = kCEpsilon;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// End-to-end oracle suite: closed-form values, axiom properties, Taylor
/// fidelity, rank/integral oracles. Deterministic in the options.
std::vector<CheckResult> run_self_test(const SelfTestOptions& options = {});

}  // namespace epuc
