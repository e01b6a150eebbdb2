// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cli.hpp"
#include "mgi/analytics.hpp"
#include "mgi/forecast.hpp"
#include "mgi/outage.hpp"
#include "mgi/simgrid.hpp"
#include "mgi/spectral.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace mgi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double limit_s = 0.0; // 0 = no runtime bound
};

constexpr Duration kStep = 10 * kSecondsPerMinute;
const Timestamp kStart = make_timestamp(2019, 1, 1);

SimSpan span_days(int days) { return {kStart, kStart + days * kSecondsPerDay, kStep}; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1 ----------------------------------------------------------------------------
Outcome dft_oracle() {
    std::mt19937_64 rng(20240101);
    std::uniform_int_distribution<std::size_t> len(16, 1024);
    std::normal_distribution<double> g;
    double worst = 0.0, worst_parseval = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(len(rng));
        for (auto& v : x) v = g(rng);
        const auto fast = fft(std::span<const double>(x));
        const auto slow = oracle::naive_dft(x);
        double scale = 0.0;
        for (const auto& c : slow) scale = std::max(scale, std::abs(c));
        for (std::size_t k = 0; k < x.size(); ++k) {
            worst = std::max(worst, std::abs(std::abs(fast[k]) - std::abs(slow[k])) / scale);
        }
        double time_energy = 0.0, freq_energy = 0.0;
        for (double v : x) time_energy += v * v;
        for (const auto& c : fast) freq_energy += std::norm(c);
        freq_energy /= static_cast<double>(x.size());
        worst_parseval = std::max(worst_parseval, std::abs(time_energy - freq_energy) / time_energy);
    }
    return {worst <= 1e-9 && worst_parseval <= 1e-9,
            "max rel magnitude error " + fmt("%.2e", worst) + ", Parseval " + fmt("%.2e", worst_parseval)};
}

// 2 ----------------------------------------------------------------------------
bool top_two_daily(const Series& s, std::string& seen) {
    const auto report = detect_periods(dft(s), 2);
    std::set<long> periods;
    for (const auto& p : report.peaks) periods.insert(std::lround(p.period_hours * 1000.0));
    if (report.peaks.size() == 2) {
        seen = fmt("%.3g", report.peaks[0].period_hours) + "/" + fmt("%.3g", report.peaks[1].period_hours);
    }
    return periods == std::set<long>{24000, 12000};
}

Outcome periodicity() {
    const MicrogridConfig grid;
    int ok = 0;
    std::string last;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const WeatherSeries w = synthetic_weather(seed, 60, {}, kStart, kStep);
        const SimResult r = simulate(grid, SyntheticWeather{seed, {}}, SyntheticDemand{seed, {}}, span_days(60));
        std::string a, b;
        const bool irr = top_two_daily(w.irradiance, a);
        const bool load = top_two_daily(r.frame.at(ChannelKind::LoadPower), b);
        if (irr && load) {
            ++ok;
        } else {
            last = "seed " + std::to_string(seed) + " irradiance " + a + " load " + b;
        }
    }
    return {ok == 10, std::to_string(ok) + "/10 seeds give {24 h, 12 h}" + (last.empty() ? "" : "; " + last)};
}

// 3 ----------------------------------------------------------------------------
Outcome outage_oracle() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int matched = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 10000.0);
        const Duration step = u(rng) < 0.5 ? 600 : 60 * (1 + static_cast<Duration>(u(rng) * 15));
        DetectOptions o;
        o.cutoff = 42.0 + 2.0 * u(rng);
        o.hysteresis = u(rng) < 0.2 ? 0.0 : 2.0 * u(rng);
        o.min_duration = step * static_cast<Duration>(1 + u(rng) * 6);
        std::vector<std::optional<double>> v(n);
        double level = 46.0;
        const double gap_rate = u(rng) * 0.1;
        std::size_t gap_left = 0;
        for (auto& x : v) {
            level += (u(rng) - 0.5) * 1.5 + (46.0 - level) * 0.02;
            if (gap_left == 0 && u(rng) < gap_rate * 0.2) gap_left = 1 + static_cast<std::size_t>(u(rng) * 12);
            if (gap_left > 0) {
                --gap_left;
                continue;
            }
            x = level;
        }
        const Series s(ChannelKind::DcVoltage, kStart, step, v);
        const auto got = detect_outages(s, o);
        const auto want = oracle::scan_outages(s, o.cutoff, o.min_duration, o.hysteresis);
        if (oracle::same_episodes(got, want)) ++matched;
    }
    return {matched == 1000, std::to_string(matched) + "/1000 series match the linear scan"};
}

// 4 ----------------------------------------------------------------------------
Outcome closure() {
    const MicrogridConfig grid;
    int matched = 0;
    std::size_t episodes = 0;
    for (int k = 0; k < 20; ++k) {
        DemandParams d;
        d.scale = 1.5 + 0.25 * k;
        const auto seed = static_cast<std::uint64_t>(100 + k);
        const SimResult r = simulate(grid, SyntheticWeather{seed, {}}, SyntheticDemand{seed, d}, span_days(45));
        DetectOptions o;
        o.cutoff = grid.cutoff_v;
        o.hysteresis = grid.rearm_v - grid.cutoff_v;
        o.min_duration = kStep;
        if (detect_outages(r.frame.at(ChannelKind::DcVoltage), o) == r.truth_outages) ++matched;
        episodes += r.truth_outages.size();
    }
    return {matched == 20 && episodes > 0,
            std::to_string(matched) + "/20 scenarios, " + std::to_string(episodes) + " truth episodes"};
}

// 5 ----------------------------------------------------------------------------
OutageStats scenario_stats(double scale) {
    const MicrogridConfig grid;
    DemandParams d;
    d.scale = scale;
    const SimResult r = simulate(grid, SyntheticWeather{1, {}}, SyntheticDemand{1, d}, span_days(90));
    const auto eps = detect_outages(r.frame.at(ChannelKind::DcVoltage));
    return outage_stats(eps, r.frame.start(), r.frame.end());
}

Outcome morning_outages() {
    // bisect the demand scale towards the reported 20 percent
    double lo = 1.0, hi = 8.0;
    double scale = lo;
    OutageStats stats = scenario_stats(scale);
    for (int it = 0; it < 40 && std::abs(stats.outage_fraction - 0.2) > 0.005; ++it) {
        scale = 0.5 * (lo + hi);
        stats = scenario_stats(scale);
        (stats.outage_fraction < 0.2 ? lo : hi) = scale;
    }
    int total = 0, morning = 0;
    for (int h = 0; h < 24; ++h) {
        total += stats.hour_histogram[static_cast<std::size_t>(h)];
        if (h >= 3 && h <= 9) morning += stats.hour_histogram[static_cast<std::size_t>(h)];
    }
    const double share = total > 0 ? static_cast<double>(morning) / total : 0.0;
    const bool in_band = stats.outage_fraction >= 0.15 && stats.outage_fraction <= 0.25;
    return {in_band && share >= 0.6, "demand scale " + fmt("%.3f", scale) + ", outage fraction " +
                                         fmt("%.3f", stats.outage_fraction) + ", hours 3-9 share " +
                                         fmt("%.3f", share)};
}

// 6 ----------------------------------------------------------------------------
Outcome trend_growth() {
    const Timestamp a = make_timestamp(2019, 1, 1);
    const Timestamp b = make_timestamp(2021, 1, 1);
    std::vector<double> load;
    for (Timestamp t = a; t < b; t += 3600) {
        const double peak = t < make_timestamp(2020, 1, 1) ? 0.7 : 1.2;
        const int hour = static_cast<int>(time_of_day(t) / 3600);
        load.push_back(hour == 20 ? peak : 0.4 * peak);
    }
    const TrendReport r = trend(Series::dense(ChannelKind::LoadPower, a, 3600, load));
    const bool ok = r.growth_pct && std::abs(*r.growth_pct - 71.4286) <= 0.1;
    return {ok, "growth " + (r.growth_pct ? fmt("%.2f", *r.growth_pct) : std::string("n/a")) +
                    "% (reported as about 70%)"};
}

// 7 ----------------------------------------------------------------------------
Outcome harmonic_fit() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0, worst_rms = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const double mean = 5.0 * u(rng);
        const double a1 = 0.1 + 3.0 * u(rng), p1 = std::numbers::pi * (2.0 * u(rng) - 1.0);
        const double a2 = 0.1 + 2.0 * u(rng), p2 = std::numbers::pi * (2.0 * u(rng) - 1.0);
        const Timestamp start = kStart + static_cast<Timestamp>(u(rng) * 400) * kSecondsPerDay;
        const auto n = static_cast<std::size_t>(3 * kSecondsPerDay / kStep);
        std::vector<double> y(n);
        HarmonicModel truth{ChannelKind::DcVoltage, mean, {{24.0, a1, p1}, {12.0, a2, p2}}, 0.0};
        for (std::size_t i = 0; i < n; ++i) y[i] = truth.value_at(start + static_cast<Timestamp>(i) * kStep);
        const HarmonicModel m = fit_harmonic(Series::dense(ChannelKind::DcVoltage, start, kStep, y));
        worst = std::max(worst, std::abs(m.mean - mean));
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& want = truth.components[k];
            const auto& got = m.components[k];
            worst = std::max(worst, std::abs(got.amplitude - want.amplitude));
            worst = std::max(worst, std::abs(std::remainder(got.phase - want.phase, 2.0 * std::numbers::pi)));
        }
        worst_rms = std::max(worst_rms, m.residual_rms);
    }

    // shed self-consistency on deficit fixtures
    const MicrogridConfig grid;
    int consistent = 0;
    for (int k = 0; k < 10; ++k) {
        const Duration horizon = 24 * kSecondsPerHour;
        const auto n = static_cast<std::size_t>(horizon / kStep);
        std::vector<double> irr(n), wind(n, 3.0 + 0.3 * k), load(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double hour = static_cast<double>(i * kStep) / 3600.0;
            irr[i] = std::max(0.0, 700.0 * std::sin(std::numbers::pi * (hour - 6.0) / 12.0));
            load[i] = (1.5 + 0.3 * k) * (1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * (hour - 20.0) / 24.0));
        }
        const Series si = Series::dense(ChannelKind::Irradiance, kStart, kStep, irr);
        const Series sw = Series::dense(ChannelKind::WindSpeed, kStart, kStep, wind);
        auto with_shed = [&](double shed) {
            std::vector<double> l = load;
            for (auto& x : l) x = std::max(0.0, x - shed);
            return Series::dense(ChannelKind::LoadPower, kStart, kStep, l);
        };
        const BatteryState battery = battery_at_rest(0.62, grid);
        const auto alerts = outage_risk(si, sw, with_shed(0.0), battery, grid, horizon);
        if (alerts.empty()) continue;
        const double shed = alerts.front().recommended_shed_kw;
        const bool enough = outage_risk(si, sw, with_shed(shed), battery, grid, horizon).empty();
        const bool minimal = shed < 0.01 || !outage_risk(si, sw, with_shed(shed - 0.01), battery, grid, horizon).empty();
        if (enough && minimal) ++consistent;
    }
    const bool ok = worst <= 1e-6 && worst_rms <= 1e-9 && consistent == 10;
    return {ok, "max parameter error " + fmt("%.2e", worst) + ", max residual " + fmt("%.2e", worst_rms) + ", shed " +
                    std::to_string(consistent) + "/10 fixtures"};
}

// 8 ----------------------------------------------------------------------------
Outcome energy_conservation() {
    const MicrogridConfig grid;
    DemandParams d;
    d.scale = 2.5;
    const SimResult r = simulate(grid, SyntheticWeather{8, {}}, SyntheticDemand{8, d}, span_days(365));
    double worst = 0.0;
    for (const auto& e : r.energy) {
        worst = std::max(worst, std::abs(e.generation - e.delivered - e.battery_bus - e.dump));
        const double stored = e.battery_bus > 0.0 ? grid.eta_charge * e.battery_bus : e.battery_bus / grid.eta_discharge;
        worst = std::max(worst, std::abs(e.stored_delta - stored));
    }
    return {worst <= 1e-9 && r.energy.size() == 365u * 144u,
            std::to_string(r.energy.size()) + " steps, max imbalance " + fmt("%.2e", worst) + " kWh"};
}

// 9 ----------------------------------------------------------------------------
Outcome correlation_pipeline() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    int exact = 0;
    for (int shift = -6; shift <= 6; ++shift) {
        std::vector<double> base(400);
        for (auto& x : base) x = g(rng);
        std::vector<double> a(300), b(300);
        for (std::size_t i = 0; i < 300; ++i) {
            a[i] = base[50 + i];
            b[i] = base[static_cast<std::size_t>(50 + static_cast<long>(i) - shift)];
        }
        const auto r = cross_correlation(Series::dense(ChannelKind::Irradiance, kStart, 3600, a),
                                         Series::dense(ChannelKind::WindSpeed, kStart, 3600, b), 10 * 3600);
        if (r.best_lag == shift * 3600) ++exact;
    }
    const double r = pearson(Series::dense(ChannelKind::LoadPower, kStart, 3600, {1, 2, 3, 4, 5}),
                             Series::dense(ChannelKind::LoadPower, kStart, 3600, {2, 4, 5, 4, 5}));
    const WeatherSeries w = synthetic_weather(4, 60, {}, kStart, kStep);
    const CorrelationReport c = correlate(w.irradiance, w.wind);
    const bool ok = exact == 13 && std::abs(r - 0.7746) <= 1e-4 && std::abs(c.daily_peak_offset) <= 1.0;
    return {ok, std::to_string(exact) + "/13 lags exact, pearson " + fmt("%.4f", r) + ", daily peak offset " +
                    fmt("%+.2f", c.daily_peak_offset) + " h"};
}

// 10 ---------------------------------------------------------------------------
std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        files[fs::relative(entry.path(), root).generic_string()] = buf.str();
    }
    return files;
}

int pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path previous = fs::current_path();
    fs::current_path(dir);
    std::ofstream cfg("sim.toml");
    cfg << "[demand]\nscale = 3.0\n";
    cfg.close();
    std::ostringstream sink;
    auto* saved = std::cout.rdbuf(sink.rdbuf());
    int rc = cli::run_cli({"simulate", "--config", "sim.toml", "--seed", "42", "--days", "21", "--out-dir", "sim"});
    if (rc == 0) rc = cli::run_cli({"ingest", "sim/telemetry.csv", "--schema", "sim/schema.json", "--out", "frame.csv"});
    if (rc == 0) rc = cli::run_cli({"analyze", "frame.csv", "--analyses", "all", "--out-dir", "analysis"});
    if (rc == 0) {
        rc = cli::run_cli({"forecast", "frame.csv", "--config", "sim.toml", "--fit-days", "14", "--out-dir", "forecast"});
    }
    std::cout.rdbuf(saved);
    fs::current_path(previous);
    return rc;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "mgi_acceptance_determinism";
    const int rc1 = pipeline(root / "run1");
    const int rc2 = pipeline(root / "run2");
    if (rc1 != 0 || rc2 != 0) {
        return {false, "pipeline exit codes " + std::to_string(rc1) + ", " + std::to_string(rc2)};
    }
    const auto a = read_tree(root / "run1");
    const auto b = read_tree(root / "run2");
    std::size_t differing = 0;
    for (const auto& [name, content] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != content) ++differing;
    }
    const bool ok = a.size() == b.size() && differing == 0 && a.size() > 10;
    fs::remove_all(root);
    return {ok, std::to_string(a.size()) + " files, " + std::to_string(differing) + " differ"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"DFT oracle equivalence", dft_oracle, 30.0},
        {"periodicity 24 h and 12 h", periodicity, 10.0},
        {"outage detector oracle equivalence", outage_oracle},
        {"simulator and analyzer closure", closure},
        {"morning outage pattern", morning_outages, 20.0},
        {"trend arithmetic", trend_growth},
        {"harmonic fit exactness", harmonic_fit},
        {"energy conservation", energy_conservation},
        {"correlation pipeline", correlation_pipeline},
        {"end-to-end determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (criteria[i].limit_s > 0.0 && secs > criteria[i].limit_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", criteria[i].limit_s) + " s limit";
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
