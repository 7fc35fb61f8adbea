#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brake {

struct SelftestOptions {
  /// flips the interaction sign inside the gradient so the gradient check must fail
  bool inject_fault = false;
  std::uint64_t seed = 20240601;
};

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Fast property suites: gap identities, gradient check, projection oracle,
/// Wasserstein closed forms, Verlet drift on a short span, CSV round trips,
/// SVG structure and config digests.
std::vector<SelftestCase> run_selftest(const SelftestOptions& options = {});

}  // namespace brake
