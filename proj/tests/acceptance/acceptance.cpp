// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "oracle.hpp"
#include "washliq/washliq.hpp"

using namespace washliq;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TradingDay make_day(Date date, const std::vector<double>& ret, const std::vector<double>& amount) {
    TradingDay d{date, static_cast<std::int32_t>(ret.size()), {}};
    for (std::size_t i = 0; i < ret.size(); ++i) d.bars.push_back({static_cast<std::int32_t>(i), ret[i], amount[i]});
    return d;
}

// 1,000 days cycling T over 4..16, 390 and 1440; returns nonzero, amounts lognormal.
std::vector<TradingDay> random_days() {
    std::mt19937_64 gen(20240101);
    std::normal_distribution<double> r(0.0, 0.01);
    std::lognormal_distribution<double> a(8.0, 1.5);
    std::vector<TradingDay> days;
    for (int i = 0; i < 1000; ++i) {
        const int k = i % 15;
        const int T = k < 13 ? 4 + k : (k == 13 ? 390 : 1440);
        std::vector<double> ret(static_cast<std::size_t>(T)), amount(static_cast<std::size_t>(T));
        for (int m = 0; m < T; ++m) {
            do ret[static_cast<std::size_t>(m)] = r(gen);
            while (ret[static_cast<std::size_t>(m)] == 0.0);
            amount[static_cast<std::size_t>(m)] = a(gen);
        }
        days.push_back(make_day(Date{i}, ret, amount));
    }
    return days;
}

void normalization(const std::vector<TradingDay>& days) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& day : days) {
        const auto ml = minute_liquidity(day.bars);
        double sum = 0.0;
        for (const auto& m : ml.minutes) sum += m.ell_norm;
        worst = std::max(worst, std::abs(sum - day.minutes) / day.minutes);
        (void)analyze_day(day, 1);
    }
    const double secs = seconds_since(t0);
    report(worst <= 1e-9 && secs < 5.0, "normalization identity",
           fmt("max |sum(eta*ell) - T| / T = %.3g over %zu days (limit 1e-9), %.2f s (limit 5 s)", worst, days.size(), secs));
}

void oracle_equivalence(const std::vector<TradingDay>& days) {
    double worst = 0.0;
    auto track = [&](double a, double b) {
        worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    };
    for (const auto& day : days) {
        std::vector<double> ret, amount;
        for (const auto& b : day.bars) {
            ret.push_back(b.ret);
            amount.push_back(b.amount);
        }
        const auto o = oracle::recompute(ret, amount);
        const auto ml = minute_liquidity(day.bars);
        track(ml.context.eta, o.eta);
        for (std::size_t i = 0; i < ret.size(); ++i) {
            track(ml.minutes[i].ell, o.ell[i]);
            track(ml.minutes[i].adj_ret, o.adj_ret[i]);
            track(ml.minutes[i].beta_r_minute, o.beta_minute[i]);
        }
        const auto d = analyze_day(day, 1);
        track(d.beta_r, o.beta_r);
        track(d.beta_sigma, o.beta_sigma);
    }
    report(worst <= 1e-10, "oracle equivalence", fmt("max relative deviation %.3g (limit 1e-10)", worst));
}

void constant_liquidity() {
    const std::vector<double> ret{0.004, -0.012, 0.007, 0.001, -0.003, 0.009, -0.0005, 0.002};
    std::vector<double> amount;
    for (double r : ret) amount.push_back(3.0e5 * std::abs(r));
    const auto ml = minute_liquidity(make_day(Date{0}, ret, amount).bars);
    double ell_dev = 0.0;
    for (const auto& m : ml.minutes) ell_dev = std::max(ell_dev, std::abs(m.ell - 1.0));
    const auto d = analyze_day(make_day(Date{0}, ret, amount), 1);
    const double dev = std::max(std::abs(d.beta_r - 1.0), std::abs(d.beta_sigma - 1.0));
    report(dev <= 1e-12, "constant-liquidity day",
           fmt("beta_r = %.15f, beta_sigma = %.15f, max |ell - 1| = %.2g (limit 1e-12)", d.beta_r, d.beta_sigma, ell_dev));
}

void amount_scale(const std::vector<TradingDay>& days) {
    double worst = 0.0;
    for (auto day : days) {
        const auto base = analyze_day(day, 1);
        for (auto& b : day.bars) b.amount *= 1e3;
        const auto scaled = analyze_day(day, 1);
        worst = std::max({worst, std::abs(scaled.beta_r - base.beta_r), std::abs(scaled.beta_sigma - base.beta_sigma)});
    }
    report(worst <= 1e-12, "amount-scale invariance", fmt("max |Beta change| under A*1e3 = %.3g (limit 1e-12)", worst));
}

// Two-minute day [0.3, -0.2]; the second amount is bisected until r_t_adj hits the target.
DayLiquidity two_minute_day(double target_adj, double cap = 10.0) {
    LiquidityOptions opts;
    opts.cap = cap;
    auto run = [&](double log_amount) {
        return analyze_day(make_day(Date{0}, {0.3, -0.2}, {1.0, std::pow(10.0, log_amount)}), 1, opts);
    };
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (run(mid).r_t_adj < target_adj ? lo : hi) = mid;
    }
    return run(0.5 * (lo + hi));
}

void cap_and_sign() {
    const auto capped = two_minute_day(0.04 / 25.0);
    const auto wide = two_minute_day(0.04 / 25.0, 1e3);
    const auto negative = two_minute_day(-0.02);
    const bool ok = std::abs(wide.beta_r - 25.0) < 1e-6 && capped.beta_r == 10.0 &&
                    negative.r_t / negative.r_t_adj < 0.0 && negative.beta_r > 0.0;
    report(ok, "cap and sign rules",
           fmt("ratio %.9f -> beta_r = %.17g; ratio %.6f -> beta_r = %.6f", capped.r_t / capped.r_t_adj, capped.beta_r,
               negative.r_t / negative.r_t_adj, negative.beta_r));
}

void treatment_fixture() {
    const std::vector<TradingDay> days{make_day(Date{0}, std::vector<double>(8, 0.001), {1, 2, 3, 4, 5, 6, 7, 8})};
    const auto out = apply_treatment(days, TreatmentSpec{});
    std::vector<double> got;
    std::string shown;
    for (const auto& b : out[0].bars) {
        got.push_back(b.amount);
        shown += (shown.empty() ? "" : ",") + csv::shortest(b.amount);
    }
    report(got == std::vector<double>{1, 2, 3, 4, 2.5, 3, 1.75, 2}, "treatment fixture", "[" + shown + "]");
}

void simulator_detection(const Corpus& c, double secs) {
    double joint[3] = {0, 0, 0}, legit[3] = {0, 0, 0}, n[3] = {0, 0, 0};
    for (std::size_t i = 0; i < c.labeled.size(); ++i) {
        const auto& d = c.raw.days[i];
        if (d.degenerate()) continue;
        const auto k = static_cast<std::size_t>(c.labeled[i].label);
        const auto f = flag_day(d);
        ++n[k];
        joint[k] += f.wash;
        legit[k] += f.legit_high_demand;
    }
    for (int k = 0; k < 3; ++k) {
        joint[k] /= n[k];
        legit[k] /= n[k];
    }
    const auto normal = static_cast<std::size_t>(DayLabel::normal), wash = static_cast<std::size_t>(DayLabel::wash),
               passive = static_cast<std::size_t>(DayLabel::passive_high_demand);
    const bool ok = n[wash] > 0 && joint[wash] > 0 && joint[wash] >= 5 * joint[normal] && legit[passive] > legit[wash] &&
                    secs < 30.0;
    report(ok, "simulator detection",
           fmt("joint-flag rate wash %.3f vs normal %.3f (need >= 5x); legit rate passive %.3f vs wash %.3f; "
               "days wash/normal/passive %.0f/%.0f/%.0f; %.2f s (limit 30 s)",
               joint[wash], joint[normal], legit[passive], legit[wash], n[wash], n[normal], n[passive], secs));
}

void treatment_differential(const Corpus& c) {
    const auto before = descriptive_stats(c.raw), after = descriptive_stats(c.treated);
    const double drop_sigma =
        1.0 - static_cast<double>(after.diffusion.n_ge_1) / static_cast<double>(before.diffusion.n_ge_1);
    const double drop_r = 1.0 - static_cast<double>(after.jump.n_ge_1) / static_cast<double>(before.jump.n_ge_1);
    report(before.diffusion.n_ge_1 > 0 && before.jump.n_ge_1 > 0 && drop_sigma > drop_r, "treatment differential",
           fmt("count(beta_sigma>=1) %zu -> %zu (-%.1f%%); count(beta_r>=1) %zu -> %zu (-%.1f%%)",
               before.diffusion.n_ge_1, after.diffusion.n_ge_1, 100 * drop_sigma, before.jump.n_ge_1,
               after.jump.n_ge_1, 100 * drop_r));
}

void statistics_fixtures() {
    const auto w = welch_t({"a", {1, 2, 3, 4, 5}}, {"b", {2, 3, 4, 5, 6}}, Alternative::two_sided);
    const bool welch_ok = w.t == -1.0 && w.dof == 8.0 && std::abs(w.p_unc - 0.3466) <= 1e-3;
    const auto holm = holm_adjust(std::vector<double>{0.01, 0.04, 0.03});
    const bool holm_ok = holm == std::vector<double>{0.03, 0.06, 0.06};
    const std::vector<double> v{0.8, 1.3, 2.9, 0.4, 1.1};
    const auto same = anova_oneway(std::vector<GroupSample>{{"a", v}, {"b", v}, {"c", v}});
    const bool same_ok = same.f == 0.0 && same.p == 1.0;

    const std::vector<double> x{1.2, 3.4, 2.2, 5.1, 4.4, 2.9, 3.3}, y{2.0, 6.5, 4.4, 7.1, 3.9};
    double mx = 0, my = 0;
    for (double e : x) mx += e / x.size();
    for (double e : y) my += e / y.size();
    double ss = 0;
    for (double e : x) ss += (e - mx) * (e - mx);
    for (double e : y) ss += (e - my) * (e - my);
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double t = (mx - my) / std::sqrt(ss / (nx + ny - 2) * (1 / nx + 1 / ny));
    const double f = anova_oneway(std::vector<GroupSample>{{"x", x}, {"y", y}}).f;
    const bool ft_ok = std::abs(f - t * t) <= 1e-9;

    report(welch_ok && holm_ok && same_ok && ft_ok, "statistics fixtures",
           fmt("Welch t=%.17g dof=%.17g p=%.6f; Holm [%.17g,%.17g,%.17g]; identical groups F=%g p=%g; "
               "two-group |F - t^2| = %.3g",
               w.t, w.dof, w.p_unc, holm[0], holm[1], holm[2], same.f, same.p, std::abs(f - t * t)));
}

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" WASHLIQ_CLI "' " + args + " >>cli.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism() {
    const fs::path root = fs::temp_directory_path() / "washliq_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::string> steps{
        "--seed 31 simulate --days 60 --wash-prob 0 --no-passive -o stock.csv",
        "--seed 32 simulate --days 60 -o coin.csv",
        "treat coin.csv",
        "--seed 31 compute stock.csv --asset STOCK -o stock_panel.csv",
        "--seed 32 compute coin.csv --asset COIN_wo -o raw_panel.csv",
        "--seed 32 compute coin_treated.csv --asset COIN_w -o treated_panel.csv",
        "report STOCK=stock_panel.csv COIN_wo=raw_panel.csv COIN_w=treated_panel.csv --tables tables.txt "
        "--stats-csv stats.csv --scatter scatter.csv",
        "battery --stock STOCK=stock_panel.csv --raw COIN_wo=raw_panel.csv --treated COIN_w=treated_panel.csv "
        "--measure both -o battery.csv --anova-out anova.csv",
    };
    const std::vector<std::string> outputs{"stock_panel.csv", "raw_panel.csv", "treated_panel.csv", "tables.txt",
                                           "stats.csv",       "scatter.csv",   "battery.csv",       "anova.csv"};
    bool ran = true;
    for (const char* run : {"a", "b"}) {
        const fs::path dir = root / run;
        fs::create_directories(dir);
        for (const auto& s : steps) ran = ran && run_cli(dir, s) == 0;
    }
    std::size_t identical = 0;
    if (ran)
        for (const auto& f : outputs)
            identical += csv::read_file((root / "a" / f).string()) == csv::read_file((root / "b" / f).string());
    report(ran && identical == outputs.size(), "determinism",
           ran ? fmt("%zu of %zu output files byte-identical across two seeded pipeline runs", identical, outputs.size())
               : std::string("pipeline command failed; see ") + (root / "a" / "cli.log").string());
    if (ran && identical == outputs.size()) fs::remove_all(root);
}

// 10 assets x 365 crypto days: simulate, write + re-read minute CSVs, compute raw and treated
// panels, write + re-read panel CSVs, descriptive statistics and both batteries.
void throughput() {
    const fs::path dir = fs::temp_directory_path() / "washliq_acceptance_throughput";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const CalendarSpec calendar = CalendarSpec::crypto();
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t rows = 0;
    std::vector<AssetPanel> raw_panels, treated_panels;
    for (int asset = 0; asset < 10; ++asset) {
        SimParams p;
        p.seed = 1000 + static_cast<std::uint64_t>(asset);
        if (asset == 0) {
            p.wash_day_prob = 0.0;
            p.passive_burst.enabled = false;
        }
        const std::string name = "A" + std::to_string(asset);
        const auto path = (dir / (name + ".csv")).string();
        {
            std::ofstream os(path);
            write_minute_csv(os, trading_days(generate_market(p, 365, calendar.minutes_per_day())), calendar);
        }
        const auto in = parse_minute_bars(path, calendar, name);
        rows += in.rows_read;
        const auto treated_days = apply_treatment(in.days, TreatmentSpec{});
        for (auto [days, suffix, sink] : {std::tuple{&in.days, "_wo", &raw_panels},
                                          std::tuple{&treated_days, "_w", &treated_panels}}) {
            const auto panel = build_panel(*days, p.seed, {}, name + suffix);
            const auto panel_path = (dir / (name + suffix + "_panel.csv")).string();
            {
                std::ofstream os(panel_path);
                write_panel_csv(os, panel);
            }
            sink->push_back(read_panel_csv(panel_path, name + suffix));
        }
    }
    std::vector<PanelStats> stats;
    for (const auto& p : raw_panels) stats.push_back(descriptive_stats(p));
    for (const auto& p : treated_panels) stats.push_back(descriptive_stats(p));
    {
        std::ofstream os(dir / "tables.txt");
        write_stats_text(os, stats);
    }
    std::size_t batteries = 0;
    for (int asset = 1; asset < 10; ++asset)
        for (Measure m : {Measure::jump, Measure::diffusion}) {
            (void)battery(raw_panels[0], raw_panels[static_cast<std::size_t>(asset)],
                          treated_panels[static_cast<std::size_t>(asset)], m);
            ++batteries;
        }
    const double secs = seconds_since(t0);
    fs::remove_all(dir);
    report(rows == 10u * 365u * 1440u && secs < 60.0, "throughput",
           fmt("%zu minute rows, 20 panels, %zu batteries in %.1f s (limit 60 s)", rows, batteries, secs));
}

}  // namespace

int main() {
    const auto days = random_days();
    normalization(days);
    oracle_equivalence(days);
    constant_liquidity();
    amount_scale(days);
    cap_and_sign();
    treatment_fixture();

    const auto t0 = std::chrono::steady_clock::now();
    const Corpus corpus = make_corpus(2024);
    const double corpus_secs = seconds_since(t0);
    simulator_detection(corpus, corpus_secs);
    treatment_differential(corpus);

    statistics_fixtures();
    determinism();
    throughput();
    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
