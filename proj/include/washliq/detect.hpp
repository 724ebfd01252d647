#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "washliq/csv.hpp"
#include "washliq/liquidity.hpp"

namespace washliq {

struct Thresholds {
    double jump = 1.0;
    double diffusion = 1.0;
    double cap = 10.0;
    double low = 0.10;  // "low Beta" counting threshold
};

struct DayFlag {
    Date date;
    double beta_r = 0.0;
    double beta_sigma = 0.0;
    bool wash = false;               // both Betas at or above threshold
    bool legit_high_demand = false;  // high jump, low diffusion
};

inline DayFlag flag_day(const DayLiquidity& d, const Thresholds& th = {}) {
    DayFlag f{d.date, d.beta_r, d.beta_sigma, false, false};
    const bool high_jump = d.beta_r >= th.jump;
    f.wash = high_jump && d.beta_sigma >= th.diffusion;
    f.legit_high_demand = high_jump && d.beta_sigma < th.diffusion;
    return f;
}

// One flag per non-degenerate day; thresholds are inclusive.
inline std::vector<DayFlag> flag_days(const AssetPanel& panel, const Thresholds& th = {}) {
    std::vector<DayFlag> out;
    for (const auto& d : panel.days)
        if (!d.degenerate()) out.push_back(flag_day(d, th));
    return out;
}

inline double percent(std::size_t count, std::size_t total) {
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::round(10000.0 * static_cast<double>(count) / static_cast<double>(total)) / 100.0;
}

// Median is the middle order statistic, or the mean of the two middle ones for even n.
inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct BetaStats {
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stdev = std::numeric_limits<double>::quiet_NaN();  // sample (n - 1)
    double min = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_at_cap = 0;
    std::size_t n_ge_1 = 0;
    std::size_t n_le_0p10 = 0;

    double pct_at_cap() const { return percent(n_at_cap, count); }
    double pct_ge_1() const { return percent(n_ge_1, count); }
    double pct_le_0p10() const { return percent(n_le_0p10, count); }
};

inline BetaStats beta_stats(std::span<const double> values, const Thresholds& th, double high_threshold) {
    BetaStats s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        if (v >= th.cap) ++s.n_at_cap;
        if (v >= high_threshold) ++s.n_ge_1;
        if (v <= th.low) ++s.n_le_0p10;
    }
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stdev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    s.median = median(std::vector<double>(values.begin(), values.end()));
    return s;
}

struct PanelStats {
    std::string asset;
    std::size_t calendar_days = 0;
    std::size_t degenerate_days = 0;
    BetaStats jump;
    BetaStats diffusion;
    std::size_t joint = 0;  // both Betas at or above threshold

    bool empty() const noexcept { return jump.count == 0; }
    double joint_pct() const { return percent(joint, jump.count); }
};

inline PanelStats descriptive_stats(const AssetPanel& panel, const Thresholds& th = {}) {
    PanelStats s;
    s.asset = panel.asset;
    s.calendar_days = panel.days.size();
    std::vector<double> jump, diffusion;
    for (const auto& d : panel.days) {
        if (d.degenerate()) {
            ++s.degenerate_days;
            continue;
        }
        jump.push_back(d.beta_r);
        diffusion.push_back(d.beta_sigma);
        if (d.beta_r >= th.jump && d.beta_sigma >= th.diffusion) ++s.joint;
    }
    s.jump = beta_stats(jump, th, th.jump);
    s.diffusion = beta_stats(diffusion, th, th.diffusion);
    return s;
}

namespace detail {

inline std::string fixed2(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string pct2(double v) { return std::isnan(v) ? "nan" : fixed2(v) + "%"; }

struct TableRow {
    std::string label;
    std::vector<std::string> cells;
};

inline void print_block(std::ostream& os, const std::string& title, const std::vector<TableRow>& rows) {
    std::size_t label_w = 0, cell_w = 8;
    for (const auto& r : rows) {
        label_w = std::max(label_w, r.label.size());
        for (const auto& c : r.cells) cell_w = std::max(cell_w, c.size());
    }
    os << title << '\n';
    for (const auto& r : rows) {
        os << r.label << std::string(label_w - r.label.size(), ' ');
        for (const auto& c : r.cells) os << "  " << std::string(cell_w - c.size(), ' ') << c;
        os << '\n';
    }
    os << '\n';
}

inline std::vector<TableRow> beta_rows(std::span<const PanelStats> stats, bool jump, const Thresholds& th) {
    const std::string name = jump ? "beta_r" : "beta_sigma";
    auto pick = [&](const PanelStats& s) -> const BetaStats& { return jump ? s.jump : s.diffusion; };
    std::vector<TableRow> rows(14);
    rows[0].label = "ticker";
    rows[1].label = "count";
    rows[2].label = "mean";
    rows[3].label = "std";
    rows[4].label = "min";
    rows[5].label = "median (50%)";
    rows[6].label = "max";
    rows[7].label = "number of days " + name + " = " + csv::sig(th.cap, 6) + " (cap)";
    rows[8].label = "as % of total number of days";
    rows[9].label = "number of days " + name + " >= " + csv::sig(jump ? th.jump : th.diffusion, 6);
    rows[10].label = "as % of total number of days";
    rows[11].label = "number of days " + name + " <= " + fixed2(th.low);
    rows[12].label = "as % of total number of days";
    rows[13].label = "degenerate days (excluded)";
    for (const auto& s : stats) {
        const BetaStats& b = pick(s);
        rows[0].cells.push_back(s.asset);
        rows[1].cells.push_back(std::to_string(b.count));
        rows[2].cells.push_back(fixed2(b.mean));
        rows[3].cells.push_back(fixed2(b.stdev));
        rows[4].cells.push_back(fixed2(b.min));
        rows[5].cells.push_back(fixed2(b.median));
        rows[6].cells.push_back(fixed2(b.max));
        rows[7].cells.push_back(std::to_string(b.n_at_cap));
        rows[8].cells.push_back(pct2(b.pct_at_cap()));
        rows[9].cells.push_back(std::to_string(b.n_ge_1));
        rows[10].cells.push_back(pct2(b.pct_ge_1()));
        rows[11].cells.push_back(std::to_string(b.n_le_0p10));
        rows[12].cells.push_back(pct2(b.pct_le_0p10()));
        rows[13].cells.push_back(std::to_string(s.degenerate_days));
    }
    return rows;
}

}  // namespace detail

// Three-panel text layout: A jump, B diffusion, C joint count. One column per asset, input order.
inline void write_stats_text(std::ostream& os, std::span<const PanelStats> stats, const Thresholds& th = {}) {
    detail::print_block(os, "Panel A  Liquidity jump (beta_r)", detail::beta_rows(stats, true, th));
    detail::print_block(os, "Panel B  Liquidity diffusion (beta_sigma)", detail::beta_rows(stats, false, th));
    std::vector<detail::TableRow> c(4);
    c[0].label = "ticker";
    c[1].label = "count";
    c[2].label = "number of days beta_r, beta_sigma >= threshold";
    c[3].label = "as % of total number of days";
    for (const auto& s : stats) {
        c[0].cells.push_back(s.asset);
        c[1].cells.push_back(std::to_string(s.jump.count));
        c[2].cells.push_back(std::to_string(s.joint));
        c[3].cells.push_back(detail::pct2(s.joint_pct()));
    }
    detail::print_block(os, "Panel C  Joint high jump and high diffusion", c);
}

// Long-form CSV: panel,statistic,asset,value.
inline void write_stats_csv(std::ostream& os, std::span<const PanelStats> stats) {
    os << "panel,statistic,asset,value\n";
    auto beta = [&](const char* panel, const PanelStats& s, const BetaStats& b) {
        auto row = [&](const char* stat, const std::string& v) {
            os << panel << ',' << stat << ',' << s.asset << ',' << v << '\n';
        };
        row("count", std::to_string(b.count));
        row("mean", csv::sig(b.mean));
        row("std", csv::sig(b.stdev));
        row("min", csv::sig(b.min));
        row("median", csv::sig(b.median));
        row("max", csv::sig(b.max));
        row("n_at_cap", std::to_string(b.n_at_cap));
        row("pct_at_cap", csv::sig(b.pct_at_cap()));
        row("n_ge_1", std::to_string(b.n_ge_1));
        row("pct_ge_1", csv::sig(b.pct_ge_1()));
        row("n_le_0p10", std::to_string(b.n_le_0p10));
        row("pct_le_0p10", csv::sig(b.pct_le_0p10()));
        row("degenerate_days", std::to_string(s.degenerate_days));
    };
    for (const auto& s : stats) beta("A", s, s.jump);
    for (const auto& s : stats) beta("B", s, s.diffusion);
    for (const auto& s : stats) {
        os << "C,count," << s.asset << ',' << s.jump.count << '\n';
        os << "C,n_joint," << s.asset << ',' << s.joint << '\n';
        os << "C,pct_joint," << s.asset << ',' << csv::sig(s.joint_pct()) << '\n';
    }
}

// Scatter data with diffusion on x and jump on y; degenerate days are omitted.
inline void emit_scatter(std::ostream& os, std::span<const AssetPanel> panels) {
    os << "asset,date,beta_sigma,beta_r\n";
    for (const auto& p : panels)
        for (const auto& d : p.days)
            if (!d.degenerate())
                os << p.asset << ',' << d.date.iso() << ',' << csv::sig(d.beta_sigma) << ',' << csv::sig(d.beta_r) << '\n';
}

}  // namespace washliq
