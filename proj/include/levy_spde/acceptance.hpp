#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace levy_spde {

/// Outcome of one acceptance criterion.
struct CriterionOutcome final {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  double seconds = 0.0;
  nlohmann::json details;
};

inline constexpr int kCriterionCount = 9;

/// Runs criterion `id` (1..9). Exceptions are caught and reported as failures.
CriterionOutcome run_criterion(int id, std::uint64_t seed);

/// "PASS  [3] wave closed forms vs quadrature: ... (12.3 s)".
std::string format_outcome(const CriterionOutcome& outcome);

/// Default base seed of the suite.
inline constexpr std::uint64_t kAcceptanceSeed = 20260101;

}  // namespace levy_spde
