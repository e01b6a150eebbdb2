#include "mgi/time.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace mgi {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > text.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    pos += count;
    out = value;
    return true;
}

year_month_day civil_from_timestamp(Timestamp t) {
    return year_month_day{sys_days{std::chrono::days{day_number(t)}}};
}

} // namespace

Timestamp make_timestamp(int y, unsigned m, unsigned d, int hh, int mm, int ss) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<Timestamp>(days) * kSecondsPerDay + hh * kSecondsPerHour +
           mm * kSecondsPerMinute + ss;
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text, std::string_view format) {
    int y = 1970, mo = 1, d = 1, h = 0, mi = 0, s = 0;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            const char spec = format[++f];
            bool ok = false;
            switch (spec) {
            case 'Y': ok = read_digits(text, pos, 4, y); break;
            case 'm': ok = read_digits(text, pos, 2, mo); break;
            case 'd': ok = read_digits(text, pos, 2, d); break;
            case 'H': ok = read_digits(text, pos, 2, h); break;
            case 'M': ok = read_digits(text, pos, 2, mi); break;
            case 'S': ok = read_digits(text, pos, 2, s); break;
            case '%': ok = pos < text.size() && text[pos++] == '%'; break;
            default: return std::nullopt;
            }
            if (!ok) return std::nullopt;
        } else {
            if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
            ++pos;
        }
    }
    if (pos != text.size()) return std::nullopt;
    if (h > 23 || mi > 59 || s > 59) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

Timestamp parse_timestamp(std::string_view text, std::string_view format) {
    auto t = try_parse_timestamp(text, format);
    if (!t) {
        throw std::invalid_argument("unparseable timestamp: " + std::string(text));
    }
    return *t;
}

std::string format_timestamp(Timestamp t) {
    const auto ymd = civil_from_timestamp(t);
    const Duration tod = time_of_day(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(tod / kSecondsPerHour),
                  static_cast<int>((tod % kSecondsPerHour) / kSecondsPerMinute),
                  static_cast<int>(tod % kSecondsPerMinute));
    return buf;
}

std::string format_timestamp(Timestamp t, std::string_view format) {
    const auto ymd = civil_from_timestamp(t);
    const Duration tod = time_of_day(t);
    std::string out;
    char buf[8];
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] != '%' || f + 1 >= format.size()) {
            out.push_back(format[f]);
            continue;
        }
        switch (format[++f]) {
        case 'Y': std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year())); break;
        case 'm': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.month())); break;
        case 'd': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.day())); break;
        case 'H': std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(tod / kSecondsPerHour)); break;
        case 'M':
            std::snprintf(buf, sizeof buf, "%02d",
                          static_cast<int>((tod % kSecondsPerHour) / kSecondsPerMinute));
            break;
        case 'S': std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(tod % kSecondsPerMinute)); break;
        default: buf[0] = format[f]; buf[1] = '\0'; break;
        }
        out += buf;
    }
    return out;
}

std::int64_t day_number(Timestamp t) { return floor_div(t, kSecondsPerDay); }

Duration time_of_day(Timestamp t) { return t - day_number(t) * kSecondsPerDay; }

int hour_of_day(Timestamp t) { return static_cast<int>(time_of_day(t) / kSecondsPerHour); }

int calendar_year(Timestamp t) { return static_cast<int>(civil_from_timestamp(t).year()); }

int day_of_week(Timestamp t) {
    // 1970-01-01 was a Thursday.
    const std::int64_t d = day_number(t) + 3;
    return static_cast<int>(d - floor_div(d, 7) * 7);
}

} // namespace mgi
