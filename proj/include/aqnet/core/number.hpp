#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace aqnet {

/// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

/// Strict parse of a finite decimal number; the whole of `text` must be consumed.
std::optional<double> parse_number(std::string_view text) noexcept;

}  // namespace aqnet
