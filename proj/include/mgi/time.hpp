#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mgi {

// Seconds since 1970-01-01T00:00:00 in site-local standard time (no DST).
using Timestamp = std::int64_t;
// Seconds.
using Duration = std::int64_t;

inline constexpr Duration kSecondsPerMinute = 60;
inline constexpr Duration kSecondsPerHour = 3600;
inline constexpr Duration kSecondsPerDay = 86400;

inline constexpr std::string_view kIsoFormat = "%Y-%m-%dT%H:%M:%S";

Timestamp make_timestamp(int year, unsigned month, unsigned day,
                         int hour = 0, int minute = 0, int second = 0);

// Supports %Y %m %d %H %M %S plus literal characters. Returns nullopt on any mismatch.
std::optional<Timestamp> try_parse_timestamp(std::string_view text,
                                             std::string_view format = kIsoFormat);
Timestamp parse_timestamp(std::string_view text, std::string_view format = kIsoFormat);

std::string format_timestamp(Timestamp t);
// Same tokens as try_parse_timestamp.
std::string format_timestamp(Timestamp t, std::string_view format);

// Floor division helpers; negative timestamps are valid.
std::int64_t day_number(Timestamp t);
Duration time_of_day(Timestamp t);
int hour_of_day(Timestamp t);
int calendar_year(Timestamp t);
// 0 = Monday ... 6 = Sunday.
int day_of_week(Timestamp t);

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace mgi
