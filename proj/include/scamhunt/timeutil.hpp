#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace scamhunt {

using Timestamp = std::chrono::sys_seconds;

/// Parses RFC 3339 / ISO 8601 date-times ("2022-02-27T00:43:00Z",
/// "2022-02-27T02:43:00.000+02:00", "2022-02-27 00:43:00") and normalizes
/// to UTC. Fractional seconds are truncated. Returns nullopt on bad input.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_rfc3339(Timestamp t);

/// "YYYY-MM-DD" of the UTC calendar day.
std::string format_date(Timestamp t);

/// Parses "YYYY-MM-DD" into a calendar day.
std::optional<std::chrono::sys_days> parse_date(std::string_view text);

std::string format_date(std::chrono::sys_days d);

}  // namespace scamhunt
