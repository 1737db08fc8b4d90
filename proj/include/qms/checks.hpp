#pragma once
// Self-check suite run by the `check` command.
#include "qms/device.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qms {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Structural and numerical invariants of the library. `params` is used for
/// the pipeline checks (typically the calibrated defaults).
std::vector<CheckResult> run_checks(const PhysicalParams& params, std::uint64_t seed, int threads = 0);

}  // namespace qms
