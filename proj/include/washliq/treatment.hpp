#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "washliq/bars.hpp"
#include "washliq/error.hpp"

namespace washliq {

enum class TreatmentScope { per_day, per_asset };

inline TreatmentScope parse_scope(std::string_view s) {
    if (s == "per-day" || s == "per_day") return TreatmentScope::per_day;
    if (s == "per-asset" || s == "per_asset") return TreatmentScope::per_asset;
    throw ParameterError("scope must be per-day or per-asset");
}

// Simulated regulatory cut of high-volume minutes: the third amount quartile is
// multiplied by q3_factor and the top quartile by q4_factor.
struct TreatmentSpec {
    double q3_factor = 0.50;
    double q4_factor = 0.25;
    TreatmentScope scope = TreatmentScope::per_day;

    static TreatmentSpec identity() { return {1.0, 1.0, TreatmentScope::per_day}; }

    void validate() const {
        if (!(0.0 <= q4_factor && q4_factor <= q3_factor && q3_factor <= 1.0))
            throw ParameterError("treatment needs 0 <= q4 <= q3 <= 1");
    }
};

// Quartile band (0 = Q1 .. 3 = Q4) of every amount. Bands are rank-based: ascending by
// amount with ties broken by position, Q4 the top ceil(n/4) ranks and Q3 the ceil(n/4) below.
inline std::vector<std::uint8_t> quartile_bands(std::span<const double> amounts) {
    const std::size_t n = amounts.size();
    std::vector<std::uint8_t> band(n, 0);
    if (n == 0) return band;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return amounts[a] < amounts[b]; });
    const std::size_t width = (n + 3) / 4;
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t from_top = n - 1 - rank;
        std::uint8_t q = 0;
        if (from_top < width) q = 3;
        else if (from_top < 2 * width) q = 2;
        else if (from_top < 3 * width) q = 1;
        band[order[rank]] = q;
    }
    return band;
}

// Returns are untouched; only amounts in Q3/Q4 change.
inline std::vector<TradingDay> apply_treatment(std::span<const TradingDay> days, const TreatmentSpec& spec) {
    spec.validate();
    std::vector<TradingDay> out(days.begin(), days.end());
    auto factor = [&](std::uint8_t q) { return q == 3 ? spec.q4_factor : q == 2 ? spec.q3_factor : 1.0; };

    if (spec.scope == TreatmentScope::per_day) {
        std::vector<double> amounts;
        for (auto& day : out) {
            amounts.resize(day.bars.size());
            for (std::size_t i = 0; i < day.bars.size(); ++i) amounts[i] = day.bars[i].amount;
            const auto band = quartile_bands(amounts);
            for (std::size_t i = 0; i < day.bars.size(); ++i) day.bars[i].amount *= factor(band[i]);
        }
        return out;
    }

    std::vector<double> amounts;
    for (const auto& day : out)
        for (const auto& b : day.bars) amounts.push_back(b.amount);
    const auto band = quartile_bands(amounts);
    std::size_t k = 0;
    for (auto& day : out)
        for (auto& b : day.bars) b.amount *= factor(band[k++]);
    return out;
}

struct AmountRatio {
    std::vector<std::pair<Date, double>> per_day;  // NaN when the raw day traded nothing
    double pooled = std::numeric_limits<double>::quiet_NaN();
};

// sum(treated A) / sum(raw A), per day and pooled over all days.
inline AmountRatio treated_amount_ratio(std::span<const TradingDay> raw, std::span<const TradingDay> treated) {
    if (raw.size() != treated.size()) throw StructuralError("raw and treated day counts differ");
    AmountRatio out;
    double raw_total = 0.0, treated_total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].date != treated[i].date)
            throw StructuralError("date mismatch: " + raw[i].date.iso() + " vs " + treated[i].date.iso());
        double r = 0.0, t = 0.0;
        for (const auto& b : raw[i].bars) r += b.amount;
        for (const auto& b : treated[i].bars) t += b.amount;
        raw_total += r;
        treated_total += t;
        out.per_day.emplace_back(raw[i].date, r > 0.0 ? t / r : std::numeric_limits<double>::quiet_NaN());
    }
    if (raw_total > 0.0) out.pooled = treated_total / raw_total;
    return out;
}

}  // namespace washliq
