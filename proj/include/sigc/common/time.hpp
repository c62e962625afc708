#pragma once

#include <chrono>
#include <cstdint>

namespace sigc {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::time_point<std::chrono::system_clock, Duration>;

inline Timestamp from_epoch_ms(std::int64_t ms) { return Timestamp(Duration(ms)); }
inline std::int64_t to_epoch_ms(Timestamp t) { return t.time_since_epoch().count(); }

}  // namespace sigc
