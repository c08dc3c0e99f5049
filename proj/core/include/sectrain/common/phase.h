#ifndef SECTRAIN_COMMON_PHASE_H_
#define SECTRAIN_COMMON_PHASE_H_

#include <cstdint>
#include <string_view>

namespace sectrain {

// Protocol phase used to bucket communication and operation costs.
enum class Phase : uint8_t { kSetup = 0, kOffline = 1, kOnline = 2, kNonlinear = 3 };

inline constexpr int kPhaseCount = 4;

constexpr std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kSetup: return "setup";
    case Phase::kOffline: return "offline";
    case Phase::kOnline: return "online";
    case Phase::kNonlinear: return "nonlinear";
  }
  return "unknown";
}

}  // namespace sectrain

#endif  // SECTRAIN_COMMON_PHASE_H_
