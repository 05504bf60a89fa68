#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace poik {

struct VerifyOptions {
  bool full = false;       // full: exhaustive desk sweeps (minutes); quick: seconds
  uint64_t seed = 20230909; // sampler checks
};

// Runs the cross-validation suite: three-way pmf agreement (combinatorial
// sums vs recurrence vs series-exponentiation oracle), the pinned-mean median
// and mode formula sweeps, normalization, the boundary-rate round trip, and
// seeded sampler moment checks. Emits one PASS/FAIL line per check through
// `log` and returns the number of failures.
int run_verify(const VerifyOptions& opts, const std::function<void(const std::string&)>& log);

} // namespace poik
