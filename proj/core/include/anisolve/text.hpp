#pragma once

// Locale-independent number parsing/formatting and small string helpers
// shared by the config reader and the CSV writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anisolve::text {

std::string_view trim(std::string_view s) noexcept;

/// Splits on `sep`, trimming each field.  Empty fields are kept.
std::vector<std::string> split(std::string_view s, char sep);

/// Splits on runs of whitespace.
std::vector<std::string> split_whitespace(std::string_view s);

/// Accepts an optional leading '+', `inf`, `-inf`; rejects trailing garbage.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_integer(std::string_view s) noexcept;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

}  // namespace anisolve::text
