#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aqnet {

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86'400;

/// Floor division that rounds toward negative infinity.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  const std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Timestamp t);

/// Accepts `YYYY-MM-DD[T| ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]`. A missing zone
/// designator is read as UTC. Fractional seconds are truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// ISO-8601 text or a plain integer epoch-seconds value.
std::optional<Timestamp> parse_timestamp(std::string_view text);

}  // namespace aqnet
