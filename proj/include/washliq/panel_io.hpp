#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "washliq/csv.hpp"
#include "washliq/liquidity.hpp"

namespace washliq {

inline constexpr std::string_view kPanelHeader = "date,r_t,r_t_adj,sigma_t,sigma_t_adj,beta_r,beta_sigma,degenerate";

// One row per day, 12 significant digits; Betas of degenerate days are written as nan.
inline void write_panel_csv(std::ostream& os, const AssetPanel& panel) {
    os << kPanelHeader << '\n';
    for (const auto& d : panel.days) {
        const bool deg = d.degenerate();
        os << d.date.iso() << ',' << csv::sig(d.r_t) << ',' << csv::sig(d.r_t_adj) << ',' << csv::sig(d.sigma_t)
           << ',' << csv::sig(d.sigma_t_adj) << ',' << (deg ? "nan" : csv::sig(d.beta_r)) << ','
           << (deg ? "nan" : csv::sig(d.beta_sigma)) << ',' << (deg ? 1 : 0) << '\n';
    }
}

inline AssetPanel read_panel_csv_text(std::string_view text, std::string asset) {
    csv::LineReader reader(text);
    std::string_view line;
    if (!reader.next(line) || line != kPanelHeader)
        throw ParseError("panel header must be '" + std::string(kPanelHeader) + "'", reader.line_no());
    AssetPanel panel;
    panel.asset = std::move(asset);
    std::vector<std::string_view> f;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no();
        csv::split(line, f);
        if (f.size() != 8) throw ParseError("panel rows have 8 fields", ln);
        DayLiquidity d;
        try {
            d.date = parse_date(csv::trim(f[0]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), ln);
        }
        d.r_t = csv::parse_double(f[1], ln, "r_t");
        d.r_t_adj = csv::parse_double(f[2], ln, "r_t_adj");
        d.sigma_t = csv::parse_double(f[3], ln, "sigma_t");
        d.sigma_t_adj = csv::parse_double(f[4], ln, "sigma_t_adj");
        d.beta_r = csv::parse_double(f[5], ln, "beta_r");
        d.beta_sigma = csv::parse_double(f[6], ln, "beta_sigma");
        const auto flag = csv::trim(f[7]);
        if (flag == "1") d.degeneracy = Degeneracy::flagged;
        else if (flag != "0") throw ParseError("degenerate must be 0 or 1", ln);
        if (!panel.days.empty() && !(panel.days.back().date < d.date))
            throw ParseError("panel dates must be strictly increasing", ln);
        panel.days.push_back(d);
    }
    return panel;
}

inline AssetPanel read_panel_csv(const std::string& path, std::string asset) {
    return read_panel_csv_text(csv::read_file(path), std::move(asset));
}

}  // namespace washliq
