#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace probagen {

using Millis = std::chrono::milliseconds;

/// Absolute instant, integer milliseconds since the Unix epoch (UTC).
using Timestamp = std::chrono::sys_time<Millis>;

inline constexpr std::int64_t kMillisPerHour = 3'600'000;

inline double to_seconds(Millis d) { return static_cast<double>(d.count()) / 1000.0; }
inline double to_hours(Millis d) { return static_cast<double>(d.count()) / kMillisPerHour; }

/// Rounds a non-negative number of seconds to whole milliseconds.
Millis from_seconds(double seconds);

/// Accepts `YYYY-MM-DD`, optionally followed by `T` or a space, `HH:MM[:SS[.frac]]`
/// and a `Z` / `+HH:MM` / `+HHMM` offset. Missing offset means UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SS.mmm+00:00`
std::string format_iso8601(Timestamp t);

/// strftime-style parsing. Supported directives: %Y %m %d %H %M %S (accepts a
/// fractional part) %f %z %s %T %F %%. The pseudo-format "ISO8601" defers to
/// parse_iso8601.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);
std::string format_timestamp(Timestamp t, std::string_view format);

/// 0 = Monday ... 6 = Sunday.
unsigned weekday_index(Timestamp t);

/// Hour of day in [0, 24), fractional.
double hour_of_day(Timestamp t);

/// Monday-aligned week counter.
std::int64_t week_index(Timestamp t);

}  // namespace probagen
