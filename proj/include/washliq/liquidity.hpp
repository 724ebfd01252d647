#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "washliq/bars.hpp"
#include "washliq/error.hpp"
#include "washliq/rng.hpp"

namespace washliq {

// Daily return aggregation. `product` is the realized close-over-open return
// prod(1 + r) - 1; `mean` is the literal (1 + mean r)^T - 1 reading.
enum class Compounding { product, mean };

struct LiquidityOptions {
    double cap = 10.0;
    Compounding compounding = Compounding::product;
    // Days where more than this share of minutes had zero amount carry `sparse_amount`.
    double sparse_amount_fraction = 0.20;
};

// `flagged` marks a day read back from a panel file, where only the flag survives.
enum class Degeneracy { none, all_zero_returns, all_zero_amounts, zero_variance, flagged };

inline const char* to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::none: return "none";
        case Degeneracy::all_zero_returns: return "all_zero_returns";
        case Degeneracy::all_zero_amounts: return "all_zero_amounts";
        case Degeneracy::zero_variance: return "zero_variance";
        case Degeneracy::flagged: return "flagged";
    }
    return "unknown";
}

struct PatchResult {
    std::vector<MinuteBar> bars;
    std::size_t patched = 0;
    double mean_abs_nonzero = 0.0;
    bool degenerate = false;
};

// Replaces each zero return with sign * 1e-2 * mean(|r|) over the original nonzero
// returns, sign drawn from the seeded stream. A day with no nonzero return is degenerate
// and returned unpatched.
inline PatchResult patch_zero_returns(std::span<const MinuteBar> bars, std::uint64_t stream_seed) {
    PatchResult out;
    out.bars.assign(bars.begin(), bars.end());
    double sum_abs = 0.0;
    std::size_t nonzero = 0;
    for (const auto& b : bars) {
        if (b.ret != 0.0) {
            sum_abs += std::abs(b.ret);
            ++nonzero;
        }
    }
    if (nonzero == 0) {
        out.degenerate = true;
        return out;
    }
    out.mean_abs_nonzero = sum_abs / static_cast<double>(nonzero);
    if (nonzero == bars.size()) return out;
    const double magnitude = 1e-2 * out.mean_abs_nonzero;
    Rng rng(stream_seed);
    for (auto& b : out.bars) {
        if (b.ret == 0.0) {
            b.ret = rng.sign() * magnitude;
            ++out.patched;
        }
    }
    return out;
}

inline bool needs_patch(std::span<const MinuteBar> bars) {
    return std::any_of(bars.begin(), bars.end(), [](const MinuteBar& b) { return b.ret == 0.0; });
}

struct DayContext {
    std::int32_t minutes = 0;
    double mean_abs_ret = 0.0;
    double mean_amount = 0.0;
    double eta = 0.0;                    // T / sum(ell)
    std::size_t zero_amount_minutes = 0; // minutes whose ell was substituted
    bool sparse_amount = false;
};

struct MinuteLiquidity {
    double ell = 0.0;            // (|r|/mean|r|) / (A/mean A)
    double ell_norm = 0.0;       // eta * ell
    double adj_ret = 0.0;        // sqrt(eta * ell) * r
    double beta_r_minute = 0.0;  // 1 / sqrt(eta * ell)
};

struct MinuteLiquidityResult {
    std::vector<MinuteLiquidity> minutes;
    DayContext context;
    Degeneracy degeneracy = Degeneracy::none;
};

// Minute-level normalized illiquidity for one patched day. Zero-amount minutes take the
// largest finite ell of the day.
inline MinuteLiquidityResult minute_liquidity(std::span<const MinuteBar> bars,
                                              const LiquidityOptions& opts = {}) {
    MinuteLiquidityResult out;
    const std::size_t n = bars.size();
    out.context.minutes = static_cast<std::int32_t>(n);
    if (n == 0) {
        out.degeneracy = Degeneracy::all_zero_amounts;
        return out;
    }
    double sum_abs = 0.0, sum_amount = 0.0;
    for (const auto& b : bars) {
        sum_abs += std::abs(b.ret);
        sum_amount += b.amount;
    }
    const double count = static_cast<double>(n);
    out.context.mean_abs_ret = sum_abs / count;
    out.context.mean_amount = sum_amount / count;
    if (!(sum_amount > 0.0)) {
        out.degeneracy = Degeneracy::all_zero_amounts;
        return out;
    }
    if (!(sum_abs > 0.0)) {
        out.degeneracy = Degeneracy::all_zero_returns;
        return out;
    }

    out.minutes.resize(n);
    double max_ell = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (bars[i].amount > 0.0) {
            const double ell = (std::abs(bars[i].ret) / out.context.mean_abs_ret) /
                               (bars[i].amount / out.context.mean_amount);
            out.minutes[i].ell = ell;
            max_ell = std::max(max_ell, ell);
        } else {
            ++out.context.zero_amount_minutes;
        }
    }
    if (out.context.zero_amount_minutes > 0)
        for (std::size_t i = 0; i < n; ++i)
            if (!(bars[i].amount > 0.0)) out.minutes[i].ell = max_ell;
    out.context.sparse_amount =
        static_cast<double>(out.context.zero_amount_minutes) > opts.sparse_amount_fraction * count;

    double sum_ell = 0.0;
    for (const auto& m : out.minutes) sum_ell += m.ell;
    if (!(sum_ell > 0.0)) {
        out.degeneracy = Degeneracy::all_zero_returns;
        return out;
    }
    out.context.eta = count / sum_ell;
    for (std::size_t i = 0; i < n; ++i) {
        auto& m = out.minutes[i];
        m.ell_norm = out.context.eta * m.ell;
        const double root = std::sqrt(m.ell_norm);
        m.adj_ret = root * bars[i].ret;
        m.beta_r_minute = root > 0.0 ? 1.0 / root : std::numeric_limits<double>::infinity();
    }
    return out;
}

struct DayLiquidity {
    Date date;
    double r_t = std::numeric_limits<double>::quiet_NaN();
    double r_t_adj = std::numeric_limits<double>::quiet_NaN();
    double sigma_t = std::numeric_limits<double>::quiet_NaN();
    double sigma_t_adj = std::numeric_limits<double>::quiet_NaN();
    double beta_r = std::numeric_limits<double>::quiet_NaN();      // liquidity jump
    double beta_sigma = std::numeric_limits<double>::quiet_NaN();  // liquidity diffusion
    Degeneracy degeneracy = Degeneracy::none;
    bool beta_r_singular = false;  // adjusted daily return was zero; beta_r reported at cap
    bool sparse_amount = false;
    std::size_t patched_minutes = 0;

    bool degenerate() const noexcept { return degeneracy != Degeneracy::none; }
};

inline double compound(std::span<const double> rets, Compounding mode) {
    if (rets.empty()) return 0.0;
    if (mode == Compounding::mean) {
        double s = 0.0;
        for (double r : rets) s += r;
        return std::expm1(static_cast<double>(rets.size()) * std::log1p(s / static_cast<double>(rets.size())));
    }
    double log_sum = 0.0;
    for (double r : rets) log_sum += std::log1p(r);
    return std::expm1(log_sum);
}

// Variance of the adjusted returns about their own mean. Differs from the weighted
// form used for sigma_t_adj by the first-order mean approximation; diagnostic only.
inline double adjusted_variance_exact_mean(std::span<const MinuteLiquidity> minutes) {
    if (minutes.empty()) return 0.0;
    double mean = 0.0;
    for (const auto& m : minutes) mean += m.adj_ret;
    mean /= static_cast<double>(minutes.size());
    double v = 0.0;
    for (const auto& m : minutes) v += (m.adj_ret - mean) * (m.adj_ret - mean);
    return v / static_cast<double>(minutes.size());
}

// Daily returns, intraday volatilities and the capped jump/diffusion Betas.
inline DayLiquidity day_liquidity(std::span<const MinuteLiquidity> minutes, std::span<const MinuteBar> bars,
                                  const LiquidityOptions& opts = {}) {
    if (minutes.size() != bars.size() || bars.empty())
        throw StructuralError("day_liquidity needs one MinuteLiquidity per bar");
    if (!(opts.cap > 0.0)) throw ParameterError("cap must be positive");
    DayLiquidity d;
    const std::size_t n = bars.size();
    const double count = static_cast<double>(n);

    std::vector<double> rets(n), adj(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rets[i] = bars[i].ret;
        adj[i] = minutes[i].adj_ret;
        mean += rets[i];
    }
    mean /= count;
    double var = 0.0, var_adj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev2 = (rets[i] - mean) * (rets[i] - mean);
        var += dev2;
        var_adj += minutes[i].ell_norm * dev2;
    }
    var /= count;
    var_adj /= count;

    d.r_t = compound(rets, opts.compounding);
    d.r_t_adj = compound(adj, opts.compounding);
    d.sigma_t = std::sqrt(count * var);
    d.sigma_t_adj = std::sqrt(count * var_adj);

    if (d.r_t_adj == 0.0) {
        d.beta_r = opts.cap;
        d.beta_r_singular = true;
    } else {
        const double ratio = std::abs(d.r_t / d.r_t_adj);
        d.beta_r = std::isfinite(ratio) ? std::min(opts.cap, ratio) : opts.cap;
    }
    if (!(d.sigma_t_adj > 0.0)) {
        d.degeneracy = Degeneracy::zero_variance;
        d.beta_sigma = std::numeric_limits<double>::quiet_NaN();
        d.beta_r = std::numeric_limits<double>::quiet_NaN();
    } else {
        d.beta_sigma = std::min(opts.cap, d.sigma_t / d.sigma_t_adj);
    }
    return d;
}

struct AssetPanel {
    std::string asset;
    std::int32_t minutes_per_day = 0;
    std::vector<DayLiquidity> days;

    std::size_t usable_days() const {
        return static_cast<std::size_t>(
            std::count_if(days.begin(), days.end(), [](const DayLiquidity& d) { return !d.degenerate(); }));
    }
};

// Full per-day pipeline for one asset: patch zero returns, minute liquidity, daily Betas.
// Each day's patch stream is derived from (seed, date), so results do not depend on day order.
inline DayLiquidity analyze_day(const TradingDay& day, std::uint64_t seed, const LiquidityOptions& opts = {}) {
    const PatchResult patched = patch_zero_returns(day.bars, derive_stream(seed, static_cast<std::uint64_t>(day.date.days)));
    DayLiquidity out;
    out.patched_minutes = patched.patched;
    if (patched.degenerate) {
        out.degeneracy = Degeneracy::all_zero_returns;
    } else {
        const MinuteLiquidityResult ml = minute_liquidity(patched.bars, opts);
        out.sparse_amount = ml.context.sparse_amount;
        if (ml.degeneracy != Degeneracy::none) {
            out.degeneracy = ml.degeneracy;
        } else {
            out = day_liquidity(ml.minutes, patched.bars, opts);
            out.patched_minutes = patched.patched;
            out.sparse_amount = ml.context.sparse_amount;
        }
    }
    out.date = day.date;
    return out;
}

inline AssetPanel build_panel(std::span<const TradingDay> days, std::uint64_t seed,
                              const LiquidityOptions& opts = {}, std::string asset = "") {
    AssetPanel panel;
    panel.asset = std::move(asset);
    if (days.empty()) return panel;
    panel.minutes_per_day = days.front().minutes;
    panel.days.reserve(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) {
        const auto& day = days[i];
        if (day.minutes != panel.minutes_per_day || day.bars.size() != static_cast<std::size_t>(day.minutes))
            throw StructuralError("day " + day.date.iso() + " does not match the panel's minutes per day");
        if (i > 0 && !(days[i - 1].date < day.date))
            throw StructuralError("panel dates must be strictly increasing at " + day.date.iso());
        panel.days.push_back(analyze_day(day, seed, opts));
    }
    return panel;
}

}  // namespace washliq
