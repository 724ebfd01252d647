// washliq: liquidity jump / diffusion pipeline.
//
// Exit codes: 0 success, 1 usage or I/O problem, 2 input data failed validation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "washliq/washliq.hpp"

namespace fs = std::filesystem;
using namespace washliq;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    RunConfig config;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot write '" + path + "'");
    return os;
}

// "NAME=path" or "path" (asset named after the file stem).
std::pair<std::string, std::string> split_named(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
    return {fs::path(arg).stem().string(), arg};
}

std::string read_input(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("no such file '" + path + "'");
    return csv::read_file(path);
}

bool looks_like_ticks(std::string_view text) {
    const auto nl = text.find('\n');
    const auto header = text.substr(0, nl);
    return header.find("price") != std::string_view::npos && header.find("qty") != std::string_view::npos;
}

// Minute or tick CSV, recognised by its header.
IngestResult load_days(const std::string& path, const CalendarSpec& calendar, const std::string& asset) {
    const std::string text = read_input(path);
    if (!looks_like_ticks(text)) return parse_minute_bars_text(text, calendar, asset);
    const TickFile ticks = parse_ticks_text(text);
    TickAggregation agg = aggregate_ticks(ticks.ticks, calendar);
    IngestResult out;
    out.days = std::move(agg.days);
    out.rows_read = ticks.ticks.size();
    out.rows_out_of_session = agg.ticks_out_of_session;
    out.input_sorted = ticks.sorted;
    return out;
}

std::vector<AssetPanel> load_panels(const std::vector<std::string>& args) {
    std::vector<AssetPanel> panels;
    for (const auto& a : args) {
        auto [name, path] = split_named(a);
        panels.push_back(read_panel_csv_text(read_input(path), name));
    }
    return panels;
}

void write_report(const std::vector<AssetPanel>& panels, const Thresholds& th, const std::string& tables,
                  const std::string& stats_csv, const std::string& scatter) {
    std::vector<PanelStats> stats;
    for (const auto& p : panels) stats.push_back(descriptive_stats(p, th));
    if (!tables.empty()) {
        auto os = open_out(tables);
        write_stats_text(os, stats, th);
    }
    if (!stats_csv.empty()) {
        auto os = open_out(stats_csv);
        write_stats_csv(os, stats);
    }
    if (!scatter.empty()) {
        auto os = open_out(scatter);
        emit_scatter(os, panels);
    }
    if (tables.empty() && stats_csv.empty() && scatter.empty()) write_stats_text(std::cout, stats, th);
}

std::string default_treated_path(const std::string& input) {
    const fs::path p(input);
    return (p.parent_path() / (p.stem().string() + "_treated" + p.extension().string())).string();
}

AmountLaw parse_amount_law(const std::string& s) {
    // lognormal:MU:SIGMA or pareto:ALPHA:XMIN
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    AmountLaw law;
    try {
        if (parts.size() == 3 && parts[0] == "lognormal") {
            law.kind = AmountLaw::Kind::lognormal;
            law.mu = std::stod(parts[1]);
            law.sigma = std::stod(parts[2]);
            return law;
        }
        if (parts.size() == 3 && parts[0] == "pareto") {
            law.kind = AmountLaw::Kind::pareto;
            law.alpha = std::stod(parts[1]);
            law.x_min = std::stod(parts[2]);
            return law;
        }
    } catch (const std::exception&) {
    }
    throw ParameterError("amount law must be lognormal:MU:SIGMA or pareto:ALPHA:XMIN");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Liquidity jump / diffusion analytics for wash-trading detection"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every stochastic step");
    app.add_option("--calendar", g.config.calendar, "crypto | us-equity | custom:T")->capture_default_str();
    app.add_option("--cap", g.config.cap, "Beta cap")->capture_default_str();
    app.add_option("--threshold", g.config.threshold, "High-Beta threshold")->capture_default_str();
    app.add_option("--compounding", g.config.compounding, "product | mean")->capture_default_str();

    // compute
    auto* compute = app.add_subcommand("compute", "Minute or tick CSV -> daily panel CSV + skip report");
    std::string c_input, c_out, c_skips, c_asset, c_minutes_out, c_tables, c_scatter;
    compute->add_option("input", c_input, "Minute CSV or tick CSV")->required();
    compute->add_option("-o,--out", c_out, "Panel CSV path")->required();
    compute->add_option("--skip-report", c_skips, "Skip report path (default: <out>.skips.jsonl)");
    compute->add_option("--asset", c_asset, "Asset id (default: input file stem)");
    compute->add_option("--minutes-out", c_minutes_out, "Also write the minute bars used");
    compute->add_option("--tables", c_tables, "Also write the report tables for this panel");
    compute->add_option("--scatter", c_scatter, "Also write scatter data for this panel");

    // treat
    auto* treat = app.add_subcommand("treat", "Apply the quartile amount treatment to minute bars");
    std::string t_input, t_out, t_ratio;
    double q3 = 0.5, q4 = 0.25;
    std::string scope = "per-day";
    treat->add_option("input", t_input, "Minute CSV or tick CSV")->required();
    treat->add_option("-o,--out", t_out, "Treated minute CSV (default: <input>_treated.csv)");
    treat->add_option("--q3", q3, "Third-quartile multiplier")->capture_default_str();
    treat->add_option("--q4", q4, "Top-quartile multiplier")->capture_default_str();
    treat->add_option("--scope", scope, "per-day | per-asset")->capture_default_str();
    treat->add_option("--ratio-out", t_ratio, "Per-day treated/raw amount ratio CSV");

    // detect
    auto* detect = app.add_subcommand("detect", "Flag wash-trading days in panels");
    std::vector<std::string> d_panels;
    std::string d_out, d_scatter;
    detect->add_option("panels", d_panels, "Panel CSVs as NAME=path or path")->required();
    detect->add_option("-o,--out", d_out, "Flags CSV (default: stdout)");
    detect->add_option("--scatter", d_scatter, "Scatter CSV asset,date,beta_sigma,beta_r");

    // report
    auto* report = app.add_subcommand("report", "Descriptive tables and scatter data");
    std::vector<std::string> r_panels;
    std::string r_tables, r_stats, r_scatter;
    report->add_option("panels", r_panels, "Panel CSVs as NAME=path or path")->required();
    report->add_option("--tables", r_tables, "Aligned-text tables (default: stdout)");
    report->add_option("--stats-csv", r_stats, "Long-form statistics CSV");
    report->add_option("--scatter", r_scatter, "Scatter CSV");

    // battery
    auto* batt = app.add_subcommand("battery", "ANOVA + Welch pairwise tests with Holm correction");
    std::string b_stock, b_raw, b_treated, b_out, b_anova, b_measure = "both";
    double b_alpha = 0.05;
    batt->add_option("--stock", b_stock, "Stock panel (NAME=path or path)")->required();
    batt->add_option("--raw", b_raw, "Untreated crypto panel")->required();
    batt->add_option("--treated", b_treated, "Treated crypto panel")->required();
    batt->add_option("--measure", b_measure, "jump | diffusion | both")->capture_default_str();
    batt->add_option("--alpha", b_alpha, "ANOVA significance level gating pairwise tests")->capture_default_str();
    batt->add_option("-o,--out", b_out, "Pairwise CSV (default: stdout)");
    batt->add_option("--anova-out", b_anova, "ANOVA summary CSV");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Labeled synthetic market from the manipulator/passive model");
    SimParams sp;
    std::int32_t s_days = 200;
    std::string s_out, s_labels, s_law = "lognormal:11.5:0.5", s_start = "2024-01-01";
    bool no_passive = false;
    sim->add_option("--days", s_days, "Number of days")->capture_default_str();
    sim->add_option("--kappa", sp.kappa, "Convex cost coefficient")->capture_default_str();
    sim->add_option("--n-manip", sp.n_manip, "Manipulative trades per wash day")->capture_default_str();
    sim->add_option("--wash-prob", sp.wash_day_prob, "Share of wash days")->capture_default_str();
    sim->add_option("--passive-prob", sp.passive_burst.day_prob, "Share of passive high-demand days")
        ->capture_default_str();
    sim->add_option("--burst-mult", sp.passive_burst.amount_multiplier, "Passive burst amount multiplier")
        ->capture_default_str();
    sim->add_option("--burst-minutes", sp.passive_burst.duration, "Passive burst length")->capture_default_str();
    sim->add_flag("--no-passive", no_passive, "Disable passive high-demand days");
    sim->add_option("--base-mu", sp.base_mu, "Equilibrium minute drift")->capture_default_str();
    sim->add_option("--noise-sigma", sp.noise_sigma, "Minute return noise")->capture_default_str();
    sim->add_option("--amount-law", s_law, "lognormal:MU:SIGMA | pareto:ALPHA:XMIN")->capture_default_str();
    sim->add_option("--manip-mult", sp.manip_amount_multiplier, "Manipulative amount multiplier")
        ->capture_default_str();
    sim->add_flag("--pump-dump", sp.pump_dump, "Alternate the sign of the distortion");
    sim->add_option("--start", s_start, "First date (YYYY-MM-DD)")->capture_default_str();
    sim->add_option("-o,--out", s_out, "Minute CSV path")->required();
    sim->add_option("--labels", s_labels, "Labels CSV (default: <out>.labels.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    g.seed_given = app.get_option("--seed")->count() > 0;
    if (g.seed_given) g.config.seed = g.seed;

    try {
        g.config.validate();
        const CalendarSpec calendar = g.config.calendar_spec();
        const Thresholds th = g.config.thresholds();

        if (*compute) {
            const std::string asset = c_asset.empty() ? fs::path(c_input).stem().string() : c_asset;
            IngestResult in = load_days(c_input, calendar, asset);
            const bool patch_needed = std::any_of(in.days.begin(), in.days.end(),
                                                  [](const TradingDay& d) { return needs_patch(d.bars); });
            if (patch_needed && !g.seed_given)
                throw UsageError("input has zero-return minutes; pass --seed so the patch is reproducible");
            const AssetPanel panel = build_panel(in.days, g.seed, g.config.liquidity(), asset);
            {
                auto os = open_out(c_out);
                write_panel_csv(os, panel);
            }
            std::vector<SkippedDay> skips = in.skipped;
            for (const auto& d : panel.days)
                if (d.degenerate())
                    skips.push_back(SkippedDay{asset, d.date, static_cast<std::size_t>(panel.minutes_per_day),
                                               std::string("degenerate: ") + to_string(d.degeneracy)});
            std::sort(skips.begin(), skips.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
            {
                auto os = open_out(c_skips.empty() ? c_out + ".skips.jsonl" : c_skips);
                write_skip_report(os, skips);
            }
            if (!c_minutes_out.empty()) {
                auto os = open_out(c_minutes_out);
                write_minute_csv(os, in.days, calendar);
            }
            if (!c_tables.empty() || !c_scatter.empty()) write_report({panel}, th, c_tables, "", c_scatter);
            std::cerr << asset << ": " << panel.days.size() << " days (" << panel.usable_days() << " usable), "
                      << in.skipped.size() << " incomplete days skipped\n";
        } else if (*treat) {
            TreatmentSpec spec{q3, q4, parse_scope(scope)};
            const IngestResult in = load_days(t_input, calendar, fs::path(t_input).stem().string());
            const auto treated = apply_treatment(in.days, spec);
            const std::string out = t_out.empty() ? default_treated_path(t_input) : t_out;
            {
                auto os = open_out(out);
                write_minute_csv(os, treated, calendar);
            }
            const AmountRatio ratio = treated_amount_ratio(in.days, treated);
            if (!t_ratio.empty()) {
                auto os = open_out(t_ratio);
                os << "date,ratio\n";
                for (const auto& [d, r] : ratio.per_day) os << d.iso() << ',' << csv::sig(r) << '\n';
                os << "pooled," << csv::sig(ratio.pooled) << '\n';
            }
            std::cerr << "treated amount / raw amount (pooled): " << csv::sig(ratio.pooled, 6) << '\n';
        } else if (*detect) {
            const auto panels = load_panels(d_panels);
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!d_out.empty()) {
                file = open_out(d_out);
                os = &file;
            }
            *os << "asset,date,beta_r,beta_sigma,wash,legit_high_demand\n";
            for (const auto& p : panels)
                for (const auto& f : flag_days(p, th))
                    *os << p.asset << ',' << f.date.iso() << ',' << csv::sig(f.beta_r) << ','
                        << csv::sig(f.beta_sigma) << ',' << (f.wash ? 1 : 0) << ',' << (f.legit_high_demand ? 1 : 0)
                        << '\n';
            if (!d_scatter.empty()) {
                auto sc = open_out(d_scatter);
                emit_scatter(sc, panels);
            }
        } else if (*report) {
            write_report(load_panels(r_panels), th, r_tables, r_stats, r_scatter);
        } else if (*batt) {
            auto [sn, sp_path] = split_named(b_stock);
            auto [rn, rp] = split_named(b_raw);
            auto [tn, tp] = split_named(b_treated);
            const AssetPanel stock = read_panel_csv_text(read_input(sp_path), sn);
            const AssetPanel raw = read_panel_csv_text(read_input(rp), rn);
            const AssetPanel treated_panel = read_panel_csv_text(read_input(tp), tn);
            std::vector<Measure> measures;
            if (b_measure == "jump" || b_measure == "both") measures.push_back(Measure::jump);
            if (b_measure == "diffusion" || b_measure == "both") measures.push_back(Measure::diffusion);
            if (measures.empty()) throw UsageError("--measure must be jump, diffusion or both");

            std::vector<BatteryResult> results;
            for (Measure m : measures) results.push_back(battery(stock, raw, treated_panel, m, b_alpha));
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!b_out.empty()) {
                file = open_out(b_out);
                os = &file;
            }
            *os << kBatteryHeader << '\n';
            for (const auto& r : results) write_battery_rows(*os, r);
            if (!b_anova.empty()) {
                auto as = open_out(b_anova);
                as << kAnovaHeader << '\n';
                for (const auto& r : results) write_anova_row(as, r);
            }
            for (const auto& r : results)
                if (!r.skipped_reason.empty())
                    std::cerr << to_string(r.measure) << ": pairwise skipped, " << r.skipped_reason << '\n';
        } else if (*sim) {
            if (!g.seed_given) throw UsageError("simulate needs --seed");
            sp.seed = g.seed;
            sp.amount_law = parse_amount_law(s_law);
            sp.start = parse_date(s_start);
            if (no_passive) sp.passive_burst.enabled = false;
            const auto days = generate_market(sp, s_days, calendar.minutes_per_day());
            const auto bars = trading_days(days);
            {
                auto os = open_out(s_out);
                write_minute_csv(os, bars, calendar);
            }
            auto ls = open_out(s_labels.empty() ? s_out + ".labels.csv" : s_labels);
            write_labels_csv(ls, days);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const StructuralError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
