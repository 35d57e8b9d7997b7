#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace anv {

/// Shortest decimal text that parses back to exactly `value`.
/// Locale independent ("1.5", "1e-07", "inf", "nan").
std::string format_real(double value);

/// Strict inverse of format_real; throws std::invalid_argument on trailing
/// garbage or empty input.
double parse_real(std::string_view text);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

} // namespace anv
