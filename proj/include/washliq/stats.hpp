#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "washliq/csv.hpp"
#include "washliq/error.hpp"
#include "washliq/liquidity.hpp"
#include "washliq/special.hpp"

namespace washliq {

struct GroupSample {
    std::string label;
    std::vector<double> values;

    void validate() const {
        if (values.size() < 2) throw ParameterError("group '" + label + "' needs at least 2 observations");
        for (double v : values)
            if (!std::isfinite(v)) throw ParameterError("group '" + label + "' has a non-finite value");
    }
};

enum class Alternative { two_sided, greater, less };

inline const char* to_string(Alternative a) {
    switch (a) {
        case Alternative::two_sided: return "two-sided";
        case Alternative::greater: return "greater";
        case Alternative::less: return "less";
    }
    return "?";
}

struct AnovaResult {
    double f = 0.0;
    double dof_between = 0.0;
    double dof_within = 0.0;
    double p = 1.0;
};

namespace detail {

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_var(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

}  // namespace detail

// Classical one-way ANOVA. With zero within-group variance the result is F = 0, p = 1 when
// all means agree and F = inf, p = 0 otherwise.
inline AnovaResult anova_oneway(std::span<const GroupSample> groups) {
    if (groups.size() < 2) throw ParameterError("ANOVA needs at least 2 groups");
    std::size_t total = 0;
    std::vector<double> means;
    for (const auto& g : groups) {
        g.validate();
        total += g.values.size();
        means.push_back(detail::mean_of(g.values));
    }
    AnovaResult r;
    r.dof_between = static_cast<double>(groups.size() - 1);
    r.dof_within = static_cast<double>(total - groups.size());

    double ss_within = 0.0, ss_between = 0.0;
    const bool same_means = std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); });
    double grand = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) grand += means[i] * static_cast<double>(groups[i].values.size());
    grand /= static_cast<double>(total);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (double x : groups[i].values) ss_within += (x - means[i]) * (x - means[i]);
        if (!same_means)
            ss_between += static_cast<double>(groups[i].values.size()) * (means[i] - grand) * (means[i] - grand);
    }
    if (ss_between == 0.0) return r;
    if (ss_within == 0.0) {
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.f = (ss_between / r.dof_between) / (ss_within / r.dof_within);
    r.p = special::f_sf(r.f, r.dof_between, r.dof_within);
    return r;
}

struct PairwiseResult {
    std::string a_label;
    std::string b_label;
    double t = 0.0;
    double dof = 0.0;  // Welch-Satterthwaite
    Alternative alternative = Alternative::two_sided;
    double p_unc = 1.0;
    double p_corr = 1.0;
    std::string sig = "ns";
};

inline double t_p_value(double t, double dof, Alternative alt) {
    switch (alt) {
        case Alternative::greater: return special::student_t_sf(t, dof);
        case Alternative::less: return special::student_t_sf(-t, dof);
        case Alternative::two_sided: return std::min(1.0, 2.0 * special::student_t_sf(std::abs(t), dof));
    }
    return 1.0;
}

// Welch's unequal-variance t-test of mean(a) - mean(b). p_corr is left equal to p_unc.
inline PairwiseResult welch_t(const GroupSample& a, const GroupSample& b, Alternative alt) {
    a.validate();
    b.validate();
    PairwiseResult r;
    r.a_label = a.label;
    r.b_label = b.label;
    r.alternative = alt;
    const double na = static_cast<double>(a.values.size()), nb = static_cast<double>(b.values.size());
    const double ma = detail::mean_of(a.values), mb = detail::mean_of(b.values);
    const double qa = detail::sample_var(a.values, ma) / na;
    const double qb = detail::sample_var(b.values, mb) / nb;
    const double se2 = qa + qb;
    if (se2 == 0.0) {
        r.dof = na + nb - 2.0;
        if (ma == mb) {
            r.t = 0.0;
            r.p_unc = 1.0;
        } else {
            r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            r.p_unc = t_p_value(r.t, r.dof, alt);
        }
    } else {
        r.t = (ma - mb) / std::sqrt(se2);
        r.dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
        r.p_unc = t_p_value(r.t, r.dof, alt);
    }
    r.p_corr = r.p_unc;
    return r;
}

// Holm step-down adjustment; output is in input order.
inline std::vector<double> holm_adjust(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        running = std::max(running, std::min(1.0, p[order[k]] * static_cast<double>(m - k)));
        out[order[k]] = running;
    }
    return out;
}

inline std::string significance_stars(double p) {
    if (p <= 0.01) return "***";
    if (p <= 0.05) return "**";
    if (p <= 0.10) return "*";
    return "ns";
}

enum class Measure { jump, diffusion };

inline const char* to_string(Measure m) { return m == Measure::jump ? "liquidity_jump" : "liquidity_diffusion"; }

inline GroupSample group_from_panel(const AssetPanel& panel, Measure m) {
    GroupSample g{panel.asset, {}};
    for (const auto& d : panel.days)
        if (!d.degenerate()) g.values.push_back(m == Measure::jump ? d.beta_r : d.beta_sigma);
    return g;
}

struct BatteryResult {
    Measure measure = Measure::jump;
    std::vector<std::string> labels;
    std::optional<AnovaResult> anova;
    std::vector<PairwiseResult> pairwise;  // pairs (0,1),(0,2),(1,2) for each alternative
    std::string skipped_reason;            // empty when pairwise tests ran
};

// ANOVA over the three groups; when p <= alpha, all three pairs under each alternative,
// Holm-corrected within each alternative's 3-pair family.
inline BatteryResult battery(std::span<const GroupSample> groups, Measure m, double alpha = 0.05) {
    if (groups.size() != 3) throw ParameterError("battery takes exactly three groups");
    BatteryResult out;
    out.measure = m;
    for (const auto& g : groups) out.labels.push_back(g.label);
    for (const auto& g : groups) {
        if (g.values.size() < 2) {
            out.skipped_reason = "insufficient data: '" + g.label + "' has " + std::to_string(g.values.size()) +
                                 " usable days";
            return out;
        }
    }
    out.anova = anova_oneway(groups);
    if (!(out.anova->p <= alpha)) {
        out.skipped_reason = "ANOVA not significant (p = " + csv::sig(out.anova->p, 6) + ")";
        return out;
    }
    static constexpr std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (Alternative alt : {Alternative::two_sided, Alternative::greater, Alternative::less}) {
        std::vector<PairwiseResult> family;
        std::vector<double> raw;
        for (auto [i, j] : pairs) {
            family.push_back(welch_t(groups[i], groups[j], alt));
            raw.push_back(family.back().p_unc);
        }
        const auto adj = holm_adjust(raw);
        for (std::size_t k = 0; k < family.size(); ++k) {
            family[k].p_corr = adj[k];
            family[k].sig = significance_stars(adj[k]);
            out.pairwise.push_back(family[k]);
        }
    }
    return out;
}

inline BatteryResult battery(const AssetPanel& stock, const AssetPanel& crypto_raw, const AssetPanel& crypto_treated,
                             Measure m, double alpha = 0.05) {
    const std::array<GroupSample, 3> groups{group_from_panel(stock, m), group_from_panel(crypto_raw, m),
                                            group_from_panel(crypto_treated, m)};
    return battery(groups, m, alpha);
}

inline constexpr std::string_view kBatteryHeader = "contrast,A,B,T,dof,alternative,p-unc,p-corr,p-adjust,sig";

inline void write_battery_rows(std::ostream& os, const BatteryResult& r) {
    for (const auto& p : r.pairwise)
        os << to_string(r.measure) << ',' << p.a_label << ',' << p.b_label << ',' << csv::sig(p.t) << ','
           << csv::sig(p.dof) << ',' << to_string(p.alternative) << ',' << csv::sig(p.p_unc) << ','
           << csv::sig(p.p_corr) << ",holm," << p.sig << '\n';
}

inline constexpr std::string_view kAnovaHeader = "measure,groups,F,dof_between,dof_within,p,pairwise";

inline void write_anova_row(std::ostream& os, const BatteryResult& r) {
    os << to_string(r.measure) << ',';
    for (std::size_t i = 0; i < r.labels.size(); ++i) os << (i ? "|" : "") << r.labels[i];
    if (r.anova)
        os << ',' << csv::sig(r.anova->f) << ',' << csv::sig(r.anova->dof_between) << ','
           << csv::sig(r.anova->dof_within) << ',' << csv::sig(r.anova->p) << ',';
    else
        os << ",nan,nan,nan,nan,";
    os << (r.skipped_reason.empty() ? "ran" : "skipped: " + r.skipped_reason) << '\n';
}

}  // namespace washliq
