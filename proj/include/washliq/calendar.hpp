#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/date_time/local_time/local_time.hpp>

#include "washliq/date.hpp"
#include "washliq/error.hpp"

namespace washliq {

// UTC offset lookup for one zone. Accepts a handful of IANA names or a
// Boost-style POSIX rule string ("EST-05EDT,M3.2.0,M11.1.0").
class TimeZone {
public:
    explicit TimeZone(std::string name = "UTC") : name_(std::move(name)) {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 14> known{{
            {"UTC", ""},
            {"Etc/UTC", ""},
            {"GMT", ""},
            {"America/New_York", "EST-05EDT,M3.2.0,M11.1.0"},
            {"America/Chicago", "CST-06CDT,M3.2.0,M11.1.0"},
            {"America/Denver", "MST-07MDT,M3.2.0,M11.1.0"},
            {"America/Los_Angeles", "PST-08PDT,M3.2.0,M11.1.0"},
            {"Europe/London", "GMT+00BST+01,M3.5.0/01:00,M10.5.0/02:00"},
            {"Europe/Berlin", "CET+01CEST+01,M3.5.0/02:00,M10.5.0/03:00"},
            {"Europe/Paris", "CET+01CEST+01,M3.5.0/02:00,M10.5.0/03:00"},
            {"Asia/Tokyo", "JST+09"},
            {"Asia/Hong_Kong", "HKT+08"},
            {"Asia/Shanghai", "CST+08"},
            {"Asia/Singapore", "SGT+08"},
        }};
        std::string_view rule = name_;
        bool found = false;
        for (auto [k, v] : known) {
            if (k == name_) {
                rule = v;
                found = true;
                break;
            }
        }
        if (!found && name_.find_first_of("0123456789") == std::string::npos)
            throw ParameterError("unknown time zone '" + name_ + "'");
        if (!rule.empty()) {
            try {
                zone_ = std::make_shared<boost::local_time::posix_time_zone>(std::string(rule));
            } catch (const std::exception& e) {
                throw ParameterError("bad time zone rule '" + name_ + "': " + e.what());
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    bool is_utc() const noexcept { return !zone_ || (!zone_->has_dst() && base_offset_min() == 0); }

    // Offset in minutes to add to UTC to obtain local time.
    std::int32_t offset_minutes_at_utc(std::int64_t utc_ms) const {
        if (!zone_) return 0;
        const std::int32_t base = base_offset_min();
        if (!zone_->has_dst()) return base;
        const auto [start, end] = dst_window_utc(year_of(utc_ms));
        const std::int64_t sec = floor_div(utc_ms, 1000);
        const bool in_dst = start < end ? (sec >= start && sec < end) : (sec >= start || sec < end);
        return in_dst ? base + dst_offset_min() : base;
    }

private:
    static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
        return a >= 0 ? a / b : -((-a + b - 1) / b);
    }

    static int year_of(std::int64_t utc_ms) {
        const Date d{static_cast<std::int32_t>(floor_div(utc_ms, 86'400'000))};
        return static_cast<int>(d.ymd().year());
    }

    std::int32_t base_offset_min() const {
        return static_cast<std::int32_t>(zone_->base_utc_offset().total_seconds() / 60);
    }
    std::int32_t dst_offset_min() const {
        return static_cast<std::int32_t>(zone_->dst_offset().total_seconds() / 60);
    }

    // DST [start, end) in UTC seconds for a given year.
    std::pair<std::int64_t, std::int64_t> dst_window_utc(int year) const {
        std::lock_guard lock(*cache_mutex_);
        if (auto it = cache_->find(year); it != cache_->end()) return it->second;
        using boost::posix_time::ptime;
        const ptime epoch(boost::gregorian::date(1970, 1, 1));
        const auto y = static_cast<boost::gregorian::greg_year>(year);
        const std::int64_t start_local = (zone_->dst_local_start_time(y) - epoch).total_seconds();
        const std::int64_t end_local = (zone_->dst_local_end_time(y) - epoch).total_seconds();
        // Start is written in standard local time, end in daylight local time.
        const std::int64_t base = base_offset_min() * 60LL;
        const std::pair<std::int64_t, std::int64_t> w{start_local - base,
                                                      end_local - base - dst_offset_min() * 60LL};
        cache_->emplace(year, w);
        return w;
    }

    std::string name_;
    std::shared_ptr<boost::local_time::posix_time_zone> zone_;
    std::shared_ptr<std::map<int, std::pair<std::int64_t, std::int64_t>>> cache_ =
        std::make_shared<std::map<int, std::pair<std::int64_t, std::int64_t>>>();
    std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
};

enum class CalendarKind { continuous_24h, session };

// Where a timestamp falls on the trading calendar.
struct MinuteSlot {
    Date date;
    std::int32_t minute_index = 0;
};

struct CalendarSpec {
    CalendarKind kind = CalendarKind::continuous_24h;
    std::int32_t session_open = 0;     // minutes from local midnight
    std::int32_t session_close = 1440;
    TimeZone timezone{};

    static CalendarSpec crypto() { return {}; }

    static CalendarSpec us_equity() {
        return {CalendarKind::session, 9 * 60 + 30, 16 * 60, TimeZone("America/New_York")};
    }

    // Session of T minutes starting at UTC midnight.
    static CalendarSpec custom(std::int32_t minutes) {
        if (minutes < 1 || minutes > 1440) throw ParameterError("custom calendar needs 1 <= T <= 1440");
        return {CalendarKind::session, 0, minutes, TimeZone("UTC")};
    }

    // Parses "crypto", "us-equity" or "custom:T".
    static CalendarSpec parse(std::string_view s) {
        if (s == "crypto") return crypto();
        if (s == "us-equity") return us_equity();
        if (s.starts_with("custom:")) {
            std::int32_t t = 0;
            if (!detail::parse_uint(s.substr(7), t)) throw ParameterError("bad calendar '" + std::string(s) + "'");
            return custom(t);
        }
        throw ParameterError("unknown calendar '" + std::string(s) + "'");
    }

    std::int32_t minutes_per_day() const {
        return kind == CalendarKind::continuous_24h ? 1440 : session_close - session_open;
    }

    void validate() const {
        if (kind == CalendarKind::session &&
            (session_open < 0 || session_close > 1440 || session_close <= session_open))
            throw ParameterError("session must satisfy 0 <= open < close <= 1440");
    }

    // Slot for a UTC timestamp, or nullopt when it falls outside the session.
    std::optional<MinuteSlot> locate(std::int64_t utc_ms) const {
        const std::int64_t local_ms = utc_ms + timezone.offset_minutes_at_utc(utc_ms) * 60'000LL;
        const std::int64_t day = local_ms >= 0 ? local_ms / 86'400'000 : -((-local_ms + 86'399'999) / 86'400'000);
        const auto minute = static_cast<std::int32_t>((local_ms - day * 86'400'000) / 60'000);
        const Date date{static_cast<std::int32_t>(day)};
        if (kind == CalendarKind::continuous_24h) return MinuteSlot{date, minute};
        if (minute < session_open || minute >= session_close) return std::nullopt;
        return MinuteSlot{date, minute - session_open};
    }

    // UTC timestamp of the start of a slot.
    std::int64_t slot_start_utc(Date date, std::int32_t minute_index) const {
        const std::int32_t local_minute = minute_index + (kind == CalendarKind::session ? session_open : 0);
        const std::int64_t local_ms = (static_cast<std::int64_t>(date.days) * 1440 + local_minute) * 60'000LL;
        // Offset at the guessed instant, then refine once for DST edges.
        std::int64_t utc = local_ms - timezone.offset_minutes_at_utc(local_ms) * 60'000LL;
        utc = local_ms - timezone.offset_minutes_at_utc(utc) * 60'000LL;
        return utc;
    }
};

}  // namespace washliq
