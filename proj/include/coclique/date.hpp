#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coclique {

// Days since 1970-01-01. The dataset grain is daily; this is the only
// temporal unit in the pipeline.
using DayNumber = int32_t;

// Parses exactly "YYYY-MM-DD" (strict: 10 chars, digit positions, real
// calendar date). Returns nullopt on any deviation.
std::optional<DayNumber> parse_day(std::string_view text);

// Inverse of parse_day; format_day(parse_day(s)) == s for every valid s.
std::string format_day(DayNumber day);

} // namespace coclique
