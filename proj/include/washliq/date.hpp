#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "washliq/error.hpp"

namespace washliq {

// Calendar date stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    static Date from_ymd(int y, unsigned m, unsigned d) {
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{m}, day{d}};
        if (!ymd.ok()) throw ParseError("invalid calendar date");
        return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
    }

    std::chrono::year_month_day ymd() const {
        return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}};
    }

    std::string iso() const {
        const auto v = ymd();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(v.year()),
                      static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
        return buf;
    }

    friend auto operator<=>(const Date&, const Date&) = default;
};

namespace detail {

template <typename T>
inline bool parse_uint(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

// Accepts YYYY-MM-DD.
inline Date parse_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_uint(s.substr(0, 4), y) ||
        !detail::parse_uint(s.substr(5, 2), m) || !detail::parse_uint(s.substr(8, 2), d))
        throw ParseError("bad date '" + std::string(s) + "'");
    return Date::from_ymd(y, m, d);
}

// Parses an ISO-8601 UTC timestamp into milliseconds since the epoch.
// Accepted: YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+00:00], or a bare integer epoch-millisecond value.
inline std::int64_t parse_timestamp_ms(std::string_view s) {
    if (!s.empty() && s.find('-', 1) == std::string_view::npos) {
        std::int64_t ms = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), ms);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError("bad timestamp '" + std::string(s) + "'");
        return ms;
    }
    if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        throw ParseError("bad timestamp '" + std::string(s) + "'");
    const Date d = parse_date(s.substr(0, 10));
    unsigned hh = 0, mm = 0, ss = 0, frac = 0;
    if (!detail::parse_uint(s.substr(11, 2), hh) || !detail::parse_uint(s.substr(14, 2), mm) ||
        hh > 23 || mm > 59)
        throw ParseError("bad timestamp '" + std::string(s) + "'");
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!detail::parse_uint(s.substr(pos + 1, 2), ss) || ss > 60)
            throw ParseError("bad timestamp '" + std::string(s) + "'");
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
            std::size_t end = pos + 1;
            while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
            std::string_view digits = s.substr(pos + 1, std::min<std::size_t>(end - pos - 1, 3));
            if (digits.empty()) throw ParseError("bad timestamp '" + std::string(s) + "'");
            detail::parse_uint(digits, frac);
            for (std::size_t k = digits.size(); k < 3; ++k) frac *= 10;
            pos = end;
        }
    }
    std::string_view tail = s.substr(pos);
    if (!(tail.empty() || tail == "Z" || tail == "+00:00" || tail == "+0000"))
        throw ParseError("timestamp must be UTC: '" + std::string(s) + "'");
    return (static_cast<std::int64_t>(d.days) * 86400 + hh * 3600 + mm * 60 + ss) * 1000 + frac;
}

inline std::string format_timestamp(std::int64_t ms) {
    const std::int64_t sec = ms >= 0 ? ms / 1000 : -((-ms + 999) / 1000);
    const std::int64_t day = sec >= 0 ? sec / 86400 : -((-sec + 86399) / 86400);
    const std::int64_t rem = sec - day * 86400;
    const Date d{static_cast<std::int32_t>(day)};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", d.iso().c_str(),
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

}  // namespace washliq
