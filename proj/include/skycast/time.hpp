#pragma once

#include <cmath>
#include <cstdint>

namespace skycast {

/// Simulation time in integer nanoseconds since run start. All event
/// bookkeeping is integral so that runs are bitwise reproducible; seconds
/// appear only at the configuration and reporting boundary.
using SimTime = std::int64_t;

inline constexpr SimTime kNsPerSec = 1'000'000'000;

inline SimTime secs(double s) { return static_cast<SimTime>(std::llround(s * 1e9)); }

inline double to_secs(SimTime t) { return static_cast<double>(t) * 1e-9; }

inline SimTime millis(double ms) { return static_cast<SimTime>(std::llround(ms * 1e6)); }

inline double to_millis(SimTime t) { return static_cast<double>(t) * 1e-6; }

}  // namespace skycast
