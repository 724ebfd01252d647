#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "washliq/bars.hpp"
#include "washliq/csv.hpp"
#include "washliq/error.hpp"
#include "washliq/rng.hpp"

namespace washliq {

// Profit-maximizing per-trade distortion under convex cost kappa * delta^2.
inline double optimal_delta(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("kappa must be positive and finite");
    return 1.0 / (2.0 * kappa);
}

// Manipulator profit delta - kappa * delta^2.
inline double manipulator_profit(double delta, double kappa) { return delta - kappa * delta * delta; }

struct AmountLaw {
    enum class Kind { lognormal, pareto };
    Kind kind = Kind::lognormal;
    double mu = 11.5;    // log-scale location (lognormal)
    double sigma = 0.5;  // log-scale dispersion (lognormal)
    double alpha = 2.5;  // tail index (pareto)
    double x_min = 1e5;  // scale (pareto)

    double draw(Rng& rng) const {
        if (kind == Kind::pareto) return x_min * std::pow(1.0 - rng.uniform(), -1.0 / alpha);
        return std::exp(mu + sigma * rng.normal());
    }

    void validate() const {
        if (kind == Kind::lognormal && !(sigma >= 0.0)) throw ParameterError("lognormal sigma must be >= 0");
        if (kind == Kind::pareto && (!(alpha > 0.0) || !(x_min > 0.0)))
            throw ParameterError("pareto needs alpha > 0 and x_min > 0");
    }
};

// Legitimate high-demand episode: a contiguous window of minutes whose amounts are scaled
// up and whose returns carry a small equilibrium drift but no extra noise.
struct PassiveBurst {
    bool enabled = true;
    double day_prob = 0.2;
    double amount_multiplier = 5.0;
    std::int32_t duration = 240;  // minutes, clamped to T
    double drift = 1.0;           // per-minute drift in units of noise_sigma
};

struct SimParams {
    double kappa = 50.0;
    std::int32_t n_manip = 15;  // manipulative trades per wash day
    double base_mu = 0.0;
    double noise_sigma = 5e-4;
    AmountLaw amount_law{};
    // Manipulative trade amounts: the largest of `manip_tail_draws` draws from amount_law,
    // times `manip_amount_multiplier`.
    std::int32_t manip_tail_draws = 100;
    double manip_amount_multiplier = 20.0;
    bool pump_dump = false;  // alternate the sign of delta across a day's trades
    PassiveBurst passive_burst{};
    double wash_day_prob = 0.3;
    std::uint64_t seed = 0;
    Date start = Date::from_ymd(2024, 1, 1);

    void validate(std::int32_t minutes) const {
        if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("kappa must be positive");
        if (!(wash_day_prob >= 0.0 && wash_day_prob <= 1.0)) throw ParameterError("wash_day_prob must be in [0, 1]");
        if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
        if (n_manip < 1) throw ParameterError("n_manip must be at least 1");
        if (n_manip > minutes) throw ParameterError("n_manip cannot exceed minutes per day");
        if (manip_tail_draws < 1 || !(manip_amount_multiplier > 0.0))
            throw ParameterError("manipulative amount model needs draws >= 1 and multiplier > 0");
        const double passive = passive_burst.enabled ? passive_burst.day_prob : 0.0;
        if (!(passive >= 0.0) || wash_day_prob + passive > 1.0)
            throw ParameterError("wash_day_prob + passive day_prob must be <= 1");
        if (passive_burst.enabled && (!(passive_burst.amount_multiplier > 0.0) || passive_burst.duration < 1))
            throw ParameterError("passive burst needs multiplier > 0 and duration >= 1");
        amount_law.validate();
    }
};

enum class DayLabel { normal, wash, passive_high_demand };

inline const char* to_string(DayLabel l) {
    switch (l) {
        case DayLabel::normal: return "normal";
        case DayLabel::wash: return "wash";
        case DayLabel::passive_high_demand: return "passive_high_demand";
    }
    return "?";
}

struct LabeledDay {
    TradingDay day;
    DayLabel label = DayLabel::normal;
    double injected_delta = 0.0;  // delta* on wash days, else 0
    std::int32_t n_manip = 0;
};

inline LabeledDay generate_day(const SimParams& p, Date date, std::int32_t minutes, std::uint64_t stream) {
    Rng rng(stream);
    LabeledDay out;
    out.day = TradingDay{date, minutes, std::vector<MinuteBar>(static_cast<std::size_t>(minutes))};

    const double u = rng.uniform();
    const double passive_prob = p.passive_burst.enabled ? p.passive_burst.day_prob : 0.0;
    if (u < p.wash_day_prob) out.label = DayLabel::wash;
    else if (u < p.wash_day_prob + passive_prob) out.label = DayLabel::passive_high_demand;

    for (std::int32_t i = 0; i < minutes; ++i) {
        auto& b = out.day.bars[static_cast<std::size_t>(i)];
        b.minute_index = i;
        b.ret = p.base_mu + p.noise_sigma * rng.normal();
        b.amount = p.amount_law.draw(rng);
    }

    if (out.label == DayLabel::wash) {
        const double delta = optimal_delta(p.kappa);
        out.injected_delta = delta;
        out.n_manip = p.n_manip;
        // Partial Fisher-Yates for distinct trade minutes.
        std::vector<std::int32_t> slots(static_cast<std::size_t>(minutes));
        for (std::int32_t i = 0; i < minutes; ++i) slots[static_cast<std::size_t>(i)] = i;
        for (std::int32_t k = 0; k < p.n_manip; ++k) {
            const auto j = static_cast<std::size_t>(k) + rng.below(static_cast<std::uint64_t>(minutes - k));
            std::swap(slots[static_cast<std::size_t>(k)], slots[j]);
            auto& b = out.day.bars[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])];
            const double sign = p.pump_dump && (k % 2 == 1) ? -1.0 : 1.0;
            b.ret += sign * delta;
            double tail = 0.0;
            for (std::int32_t d = 0; d < p.manip_tail_draws; ++d) tail = std::max(tail, p.amount_law.draw(rng));
            b.amount = tail * p.manip_amount_multiplier;
        }
    } else if (out.label == DayLabel::passive_high_demand) {
        const std::int32_t len = std::min(p.passive_burst.duration, minutes);
        const auto start = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(minutes - len + 1)));
        for (std::int32_t i = start; i < start + len; ++i) {
            auto& b = out.day.bars[static_cast<std::size_t>(i)];
            b.amount *= p.passive_burst.amount_multiplier;
            b.ret += p.passive_burst.drift * p.noise_sigma;
        }
    }
    for (auto& b : out.day.bars) b.ret = std::max(b.ret, -0.999999);
    return out;
}

// Consecutive calendar days from p.start; each day draws from its own (seed, index) stream.
inline std::vector<LabeledDay> generate_market(const SimParams& p, std::int32_t n_days, std::int32_t minutes) {
    if (minutes < 1) throw ParameterError("minutes per day must be positive");
    if (n_days < 0) throw ParameterError("n_days must be non-negative");
    p.validate(minutes);
    std::vector<LabeledDay> out;
    out.reserve(static_cast<std::size_t>(n_days));
    for (std::int32_t i = 0; i < n_days; ++i)
        out.push_back(generate_day(p, Date{p.start.days + i}, minutes,
                                   derive_stream(p.seed, static_cast<std::uint64_t>(i))));
    return out;
}

inline std::vector<TradingDay> trading_days(std::span<const LabeledDay> days) {
    std::vector<TradingDay> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.day);
    return out;
}

inline void write_labels_csv(std::ostream& os, std::span<const LabeledDay> days) {
    os << "date,label,delta_star,n_manip\n";
    for (const auto& d : days)
        os << d.day.date.iso() << ',' << to_string(d.label) << ',' << csv::shortest(d.injected_delta) << ','
           << d.n_manip << '\n';
}

}  // namespace washliq
