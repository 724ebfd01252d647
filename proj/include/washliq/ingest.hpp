#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "washliq/bars.hpp"
#include "washliq/calendar.hpp"
#include "washliq/csv.hpp"
#include "washliq/error.hpp"

namespace washliq {

// A day left out of analysis.
struct SkippedDay {
    std::string asset;
    Date date;
    std::size_t bars_found = 0;
    std::string reason;
};

struct IngestResult {
    std::vector<TradingDay> days;  // complete days only, date-ordered
    std::vector<SkippedDay> skipped;
    std::size_t rows_read = 0;
    std::size_t rows_out_of_session = 0;
    std::size_t bars_in_skipped_days = 0;
    bool input_sorted = true;
};

namespace detail {

struct DayAccumulator {
    std::vector<MinuteBar> bars;
    std::vector<std::uint8_t> seen;
    std::size_t count = 0;
};

inline std::size_t column(const std::vector<std::string_view>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (csv::trim(header[i]) == name) return i;
    return header.size();
}

// Moves complete days into the result and records the rest as skipped.
inline void finish_days(std::map<std::int32_t, DayAccumulator>& acc, std::int32_t minutes,
                        const std::string& asset, IngestResult& out) {
    for (auto& [day, a] : acc) {
        if (a.count == static_cast<std::size_t>(minutes)) {
            out.days.push_back(TradingDay{Date{day}, minutes, std::move(a.bars)});
        } else {
            out.bars_in_skipped_days += a.count;
            out.skipped.push_back(SkippedDay{asset, Date{day}, a.count,
                                             "incomplete: " + std::to_string(a.count) + " of " +
                                                 std::to_string(minutes) + " bars"});
        }
    }
}

}  // namespace detail

// Minute CSV from memory. Header is `timestamp,ret,amount` or `timestamp,open,close,amount`.
inline IngestResult parse_minute_bars_text(std::string_view text, const CalendarSpec& calendar,
                                           const std::string& asset = "") {
    calendar.validate();
    const std::int32_t minutes = calendar.minutes_per_day();
    csv::LineReader reader(text);
    std::string_view line;
    if (!reader.next(line)) throw ParseError("empty minute file", 1);

    std::vector<std::string_view> fields;
    csv::split(line, fields);
    const std::size_t n_cols = fields.size();
    const std::size_t c_ts = detail::column(fields, "timestamp");
    const std::size_t c_ret = detail::column(fields, "ret");
    const std::size_t c_open = detail::column(fields, "open");
    const std::size_t c_close = detail::column(fields, "close");
    const std::size_t c_amount = detail::column(fields, "amount");
    const bool has_ret = c_ret < n_cols;
    if (c_ts >= n_cols || c_amount >= n_cols || (!has_ret && (c_open >= n_cols || c_close >= n_cols)))
        throw ParseError("minute header needs timestamp,ret,amount or timestamp,open,close,amount",
                         reader.line_no());

    IngestResult out;
    std::map<std::int32_t, detail::DayAccumulator> acc;
    std::int64_t prev_ts = INT64_MIN;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no();
        csv::split(line, fields);
        if (fields.size() != n_cols)
            throw ParseError("expected " + std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()), ln);
        ++out.rows_read;
        std::int64_t ts = 0;
        try {
            ts = parse_timestamp_ms(csv::trim(fields[c_ts]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), ln);
        }
        if (ts < prev_ts) out.input_sorted = false;
        prev_ts = ts;

        double ret = 0.0;
        if (has_ret) {
            ret = csv::parse_double(fields[c_ret], ln, "ret");
        } else {
            const double open = csv::parse_double(fields[c_open], ln, "open");
            const double close = csv::parse_double(fields[c_close], ln, "close");
            if (!(open > 0.0) || !(close > 0.0) || !std::isfinite(open) || !std::isfinite(close))
                throw ParseError("open/close must be positive", ln);
            ret = close / open - 1.0;
        }
        const double amount = csv::parse_double(fields[c_amount], ln, "amount");
        if (!std::isfinite(ret) || !(ret > -1.0)) throw ParseError("ret must be finite and > -1", ln);
        if (!std::isfinite(amount) || amount < 0.0) throw ParseError("amount must be finite and >= 0", ln);

        const auto slot = calendar.locate(ts);
        if (!slot) {
            ++out.rows_out_of_session;
            continue;
        }
        auto& day = acc[slot->date.days];
        if (day.bars.empty()) {
            day.bars.resize(static_cast<std::size_t>(minutes));
            day.seen.assign(static_cast<std::size_t>(minutes), 0);
        }
        const auto idx = static_cast<std::size_t>(slot->minute_index);
        if (day.count >= static_cast<std::size_t>(minutes))
            throw StructuralError("day " + slot->date.iso() + " has more than " + std::to_string(minutes) + " bars");
        if (day.seen[idx])
            throw StructuralError("day " + slot->date.iso() + " has a duplicate bar at minute " +
                                  std::to_string(idx) + " (line " + std::to_string(ln) + ")");
        day.seen[idx] = 1;
        day.bars[idx] = MinuteBar{slot->minute_index, ret, amount};
        ++day.count;
    }
    detail::finish_days(acc, minutes, asset, out);
    return out;
}

inline IngestResult parse_minute_bars(const std::string& path, const CalendarSpec& calendar,
                                      const std::string& asset = "") {
    return parse_minute_bars_text(csv::read_file(path), calendar, asset);
}

struct TickFile {
    std::vector<Tick> ticks;
    bool sorted = true;
};

// Tick CSV with header `timestamp,price,qty`; timestamp is ISO-8601 UTC or epoch milliseconds.
inline TickFile parse_ticks_text(std::string_view text) {
    csv::LineReader reader(text);
    std::string_view line;
    if (!reader.next(line)) throw ParseError("empty tick file", 1);
    std::vector<std::string_view> fields;
    csv::split(line, fields);
    const std::size_t n = fields.size();
    const std::size_t c_ts = detail::column(fields, "timestamp");
    const std::size_t c_price = detail::column(fields, "price");
    const std::size_t c_qty = detail::column(fields, "qty");
    if (c_ts >= n || c_price >= n || c_qty >= n)
        throw ParseError("tick header needs timestamp,price,qty", reader.line_no());

    TickFile out;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no();
        csv::split(line, fields);
        if (fields.size() != n) throw ParseError("wrong field count", ln);
        Tick t;
        try {
            t.timestamp_ms = parse_timestamp_ms(csv::trim(fields[c_ts]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), ln);
        }
        t.price = csv::parse_double(fields[c_price], ln, "price");
        t.quantity = csv::parse_double(fields[c_qty], ln, "qty");
        if (!(t.price > 0.0) || !std::isfinite(t.price)) throw ParseError("price must be positive", ln);
        if (!(t.quantity >= 0.0) || !std::isfinite(t.quantity)) throw ParseError("qty must be non-negative", ln);
        if (!out.ticks.empty() && t.timestamp_ms < out.ticks.back().timestamp_ms) out.sorted = false;
        out.ticks.push_back(t);
    }
    return out;
}

inline TickFile parse_ticks(const std::string& path) { return parse_ticks_text(csv::read_file(path)); }

struct TickAggregation {
    std::vector<TradingDay> days;
    bool input_sorted = true;
    std::size_t ticks_out_of_session = 0;
};

// Builds full-length minute days from trades. Each minute's amount is sum(price * qty); its
// return is last price over the previous traded minute's last price, with the day's first
// trade price as the opening reference. Minutes without trades get ret = 0, amount = 0.
inline TickAggregation aggregate_ticks(std::span<const Tick> ticks, const CalendarSpec& calendar) {
    calendar.validate();
    TickAggregation out;
    if (ticks.empty()) return out;
    for (const Tick& t : ticks) {
        if (!(t.price > 0.0) || !std::isfinite(t.price)) throw ParseError("tick price must be positive");
        if (!(t.quantity >= 0.0) || !std::isfinite(t.quantity)) throw ParseError("tick qty must be non-negative");
    }
    std::vector<Tick> sorted(ticks.begin(), ticks.end());
    out.input_sorted = std::is_sorted(sorted.begin(), sorted.end(),
                                      [](const Tick& a, const Tick& b) { return a.timestamp_ms < b.timestamp_ms; });
    if (!out.input_sorted)
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const Tick& a, const Tick& b) { return a.timestamp_ms < b.timestamp_ms; });

    const std::int32_t minutes = calendar.minutes_per_day();
    std::optional<Date> current;
    TradingDay day;
    double prev_last = 0.0;
    std::int32_t open_minute = -1;
    double minute_last = 0.0;
    std::vector<double> notionals;

    auto close_minute = [&] {
        if (open_minute < 0) return;
        // Sorting before summation makes the total independent of tick order.
        std::sort(notionals.begin(), notionals.end());
        double amount = 0.0;
        for (double x : notionals) amount += x;
        auto& bar = day.bars[static_cast<std::size_t>(open_minute)];
        bar.amount = amount;
        bar.ret = minute_last / prev_last - 1.0;
        prev_last = minute_last;
        notionals.clear();
        open_minute = -1;
    };
    auto close_day = [&] {
        close_minute();
        if (current) out.days.push_back(std::move(day));
    };

    for (const Tick& t : sorted) {
        const auto slot = calendar.locate(t.timestamp_ms);
        if (!slot) {
            ++out.ticks_out_of_session;
            continue;
        }
        if (!current || slot->date != *current) {
            close_day();
            current = slot->date;
            day = TradingDay{slot->date, minutes, std::vector<MinuteBar>(static_cast<std::size_t>(minutes))};
            for (std::int32_t i = 0; i < minutes; ++i) day.bars[static_cast<std::size_t>(i)].minute_index = i;
            prev_last = t.price;
        }
        if (slot->minute_index != open_minute) {
            close_minute();
            open_minute = slot->minute_index;
        }
        notionals.push_back(t.price * t.quantity);
        minute_last = t.price;
    }
    close_day();
    return out;
}

// Writes `timestamp,ret,amount` with shortest round-trip decimals.
inline void write_minute_csv(std::ostream& os, std::span<const TradingDay> days, const CalendarSpec& calendar) {
    os << "timestamp,ret,amount\n";
    for (const auto& d : days)
        for (const auto& b : d.bars)
            os << format_timestamp(calendar.slot_start_utc(d.date, b.minute_index)) << ','
               << csv::shortest(b.ret) << ',' << csv::shortest(b.amount) << '\n';
}

// One JSON object per line: {asset, date, bars_found, reason}.
inline void write_skip_report(std::ostream& os, std::span<const SkippedDay> skipped) {
    for (const auto& s : skipped) {
        nlohmann::ordered_json j;
        j["asset"] = s.asset;
        j["date"] = s.date.iso();
        j["bars_found"] = s.bars_found;
        j["reason"] = s.reason;
        os << j.dump() << '\n';
    }
}

}  // namespace washliq
