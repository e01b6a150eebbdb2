#include "cli.hpp"

#include "mgi/analytics.hpp"
#include "mgi/forecast.hpp"
#include "mgi/outage.hpp"
#include "mgi/serialize.hpp"
#include "mgi/sim_config.hpp"
#include "mgi/simgrid.hpp"
#include "mgi/spectral.hpp"
#include "mgi/telemetry.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace mgi::cli {

namespace fs = std::filesystem;

namespace {

class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

std::shared_ptr<spdlog::logger> make_logger() {
    auto logger = std::make_shared<spdlog::logger>("mgi", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
    logger->set_pattern("mgi: %l: %v");
    logger->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("MGI_LOG")) {
        const std::string level = env;
        if (level == "error") logger->set_level(spdlog::level::err);
        else if (level == "info") logger->set_level(spdlog::level::info);
        else if (level == "debug") logger->set_level(spdlog::level::debug);
    }
    return logger;
}

spdlog::logger& log() {
    static const auto logger = make_logger();
    return *logger;
}

const std::vector<std::string> kAnalyses = {"outages", "typical-day", "seasonal", "spectrum",
                                            "acf",     "trend",       "correlate", "anomalies"};

// Files of one run, collected for the manifest.
class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec) throw CliError(kIoError, "cannot create " + root_.string() + ": " + ec.message());
    }

    const fs::path& root() const { return root_; }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = root_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw CliError(kIoError, "cannot write " + path.string());
        body(out);
        if (!out) throw CliError(kIoError, "write failed for " + path.string());
        files_.insert(name);
        log().debug("wrote {}", path.string());
    }

    void write_json(const std::string& name, const Json& j) {
        write(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }

    const std::set<std::string>& files() const { return files_; }

private:
    fs::path root_;
    std::set<std::string> files_;
};

struct Manifest {
    std::string command;
    std::string config_path;
    std::vector<std::string> inputs;
    std::optional<std::uint64_t> seed;
    // analysis -> reason, for analyses left out of an "all" run
    std::map<std::string, std::string> skipped;
};

void write_manifest(OutputDir& dir, const Manifest& m, const std::string& name = "manifest.json") {
    Json outputs = Json::array();
    for (const auto& f : dir.files()) {
        if (f != name) outputs.push_back(f);
    }
    Json j = {{"command", m.command},
              {"config_path", m.config_path},
              {"inputs", m.inputs},
              {"outputs", std::move(outputs)},
              {"seed", m.seed ? Json(*m.seed) : Json(nullptr)},
              {"tool_version", kToolVersion}};
    if (!m.skipped.empty()) j["skipped"] = m.skipped;
    dir.write_json(name, j);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kIoError, "cannot open " + path);
    return in;
}

Json read_json_file(const std::string& path, int error_code) {
    auto in = open_input(path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CliError(error_code, path + ": " + e.what());
    }
}

ChannelKind parse_channel(const std::string& name) {
    const auto kind = channel_from_name(name);
    if (!kind) throw SchemaError("unknown channel '" + name + "'");
    return *kind;
}

struct IngestSchema {
    CsvSchema csv;
    CleanPolicy policy = CleanPolicy::NullifyCell;
    std::optional<Duration> step;
};

// {"timestamp_column", "timestamp_format", "columns": [{"column", "channel"}],
//  "clean_policy": "drop_row" | "nullify_cell", "step_minutes"}
IngestSchema load_schema(const std::string& path) {
    const Json j = read_json_file(path, kConfigError);
    IngestSchema s;
    try {
        if (!j.is_object()) throw SchemaError("schema must be a JSON object");
        s.csv.timestamp_column = j.value("timestamp_column", s.csv.timestamp_column);
        s.csv.timestamp_format = j.value("timestamp_format", s.csv.timestamp_format);
        if (!j.contains("columns") || !j.at("columns").is_array()) {
            throw SchemaError("schema needs a 'columns' array");
        }
        for (const auto& c : j.at("columns")) {
            s.csv.columns.emplace_back(c.at("column").get<std::string>(),
                                       parse_channel(c.at("channel").get<std::string>()));
        }
        const std::string policy = j.value("clean_policy", std::string("nullify_cell"));
        if (policy == "drop_row") s.policy = CleanPolicy::DropRow;
        else if (policy != "nullify_cell") throw SchemaError("unknown clean_policy '" + policy + "'");
        if (j.contains("step_minutes")) s.step = j.at("step_minutes").get<Duration>() * kSecondsPerMinute;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return s;
}

Json schema_to_json(const CsvSchema& schema, Duration step) {
    Json columns = Json::array();
    for (const auto& [name, kind] : schema.columns) {
        columns.push_back({{"column", name}, {"channel", channel_name(kind)}});
    }
    return {{"timestamp_column", schema.timestamp_column},
            {"timestamp_format", schema.timestamp_format},
            {"columns", std::move(columns)},
            {"clean_policy", "nullify_cell"},
            {"step_minutes", step / kSecondsPerMinute}};
}

TelemetryFrame load_frame(const std::string& path) {
    auto in = open_input(path);
    return read_frame_csv(in);
}

const Series& require(const TelemetryFrame& frame, ChannelKind kind, const std::string& what) {
    if (!frame.has(kind)) {
        throw std::invalid_argument(what + " needs the " + std::string(channel_name(kind)) + " channel");
    }
    return frame.at(kind);
}

std::string suffix(ChannelKind kind) { return std::string(channel_name(kind)); }

GapFill parse_fill(const std::string& name, std::size_t max_len) {
    if (name == "none") return GapFill::leave_gap();
    if (name == "hold") return GapFill::hold_last(max_len);
    if (name == "linear") return GapFill::linear(max_len);
    throw CliError(kUsageError, "unknown gap fill '" + name + "'");
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string input;
    std::string schema;
    std::string out;
    std::optional<int> step_minutes;
    std::string fill = "none";
    std::size_t fill_max = 6;
};

int cmd_ingest(const IngestArgs& a) {
    const GapFill fill = parse_fill(a.fill, a.fill_max);
    const IngestSchema schema = load_schema(a.schema);
    auto in = open_input(a.input);
    const ParsedCsv parsed = parse_csv(in, schema.csv);
    const CleanResult cleaned = clean(parsed, schema.policy);
    Duration step = schema.step.value_or(10 * kSecondsPerMinute);
    if (a.step_minutes) step = static_cast<Duration>(*a.step_minutes) * kSecondsPerMinute;
    if (step <= 0) throw CliError(kUsageError, "step must be positive");
    if (cleaned.records.empty()) throw std::invalid_argument("no usable rows in " + a.input);
    const FrameBuild built = build_frame(cleaned, schema.csv, step, fill);

    const fs::path out_path(a.out);
    OutputDir dir(out_path.has_parent_path() ? out_path.parent_path() : fs::path("."));
    dir.write(out_path.filename().string(), [&](std::ostream& out) { write_frame_csv(out, built.frame); });
    write_manifest(dir, {"ingest", a.schema, {a.input, a.schema}, std::nullopt, {}},
                   out_path.stem().string() + ".manifest.json");

    Json report = to_json(cleaned.report);
    Json filled = Json::object();
    for (const auto& [kind, n] : built.filled) filled[suffix(kind)] = n;
    report["filled"] = std::move(filled);
    std::cout << report.dump(2) << '\n';
    log().info("ingested {} rows into {} samples", parsed.records.size(), built.frame.size());
    return kOk;
}

// ---------------------------------------------------------------------------

void analyze_outages(const TelemetryFrame& frame, OutputDir& dir) {
    const Series& v = require(frame, ChannelKind::DcVoltage, "outage analysis");
    const auto episodes = detect_outages(v);
    const OutageStats stats = outage_stats(episodes, frame.start(), frame.end());
    Json j = to_json(stats);
    if (frame.has(ChannelKind::Irradiance) && frame.has(ChannelKind::WindSpeed) &&
        frame.has(ChannelKind::LoadPower)) {
        Json causes = Json::array();
        for (const auto& e : episodes) {
            try {
                causes.push_back(to_json(attribute_cause(e, frame)));
            } catch (const std::invalid_argument& err) {
                causes.push_back({{"episode", to_json(e)}, {"causes", nullptr}, {"note", err.what()}});
            }
        }
        j["attribution"] = std::move(causes);
    }
    dir.write_json("outages.json", j);
    dir.write("outage_histogram.csv", [&](std::ostream& out) { write_histogram_csv(out, stats); });
}

void analyze_spectrum(const TelemetryFrame& frame, OutputDir& dir) {
    for (const auto& [kind, series] : frame.series()) {
        const Spectrum s = dft(series);
        dir.write("spectrum_" + suffix(kind) + ".csv", [&](std::ostream& out) { write_spectrum_csv(out, s); });
        Json j = to_json(detect_periods(s, 5));
        j["channel"] = suffix(kind);
        dir.write_json("periods_" + suffix(kind) + ".json", j);
    }
}

void analyze_acf(const TelemetryFrame& frame, OutputDir& dir) {
    const Duration span = static_cast<Duration>(frame.size()) * frame.step();
    const Duration max_lag = std::min<Duration>(7 * kSecondsPerDay, (span / 2) / frame.step() * frame.step());
    for (const auto& [kind, series] : frame.series()) {
        const auto acf = autocorrelation(series, max_lag);
        dir.write("acf_" + suffix(kind) + ".csv", [&](std::ostream& out) { write_acf_csv(out, acf); });
        Json j = to_json(detect_periods(std::span<const AcfPoint>(acf), 5));
        j["channel"] = suffix(kind);
        dir.write_json("acf_" + suffix(kind) + ".json", j);
    }
}

void analyze_typical_day(const TelemetryFrame& frame, OutputDir& dir) {
    for (const auto& [kind, series] : frame.series()) {
        const DailyProfile p = typical_day(series);
        dir.write("typical_day_" + suffix(kind) + ".csv", [&](std::ostream& out) { write_profile_csv(out, p); });
        dir.write_json("typical_day_" + suffix(kind) + ".json", to_json(p));
    }
}

void analyze_seasonal(const TelemetryFrame& frame, OutputDir& dir) {
    for (const auto& [kind, series] : frame.series()) {
        const Series adjusted = seasonal_adjust(series);
        dir.write("seasonal_" + suffix(kind) + ".csv", [&](std::ostream& out) { write_series_csv(out, adjusted); });
        double sum = 0.0, sq = 0.0;
        std::size_t n = 0;
        for (const auto& v : adjusted.values()) {
            if (!v) continue;
            sum += *v;
            sq += *v * *v;
            ++n;
        }
        const double mean = n ? sum / static_cast<double>(n) : 0.0;
        const double var = n ? std::max(0.0, sq / static_cast<double>(n) - mean * mean) : 0.0;
        dir.write_json("seasonal_" + suffix(kind) + ".json",
                       {{"channel", suffix(kind)},
                        {"samples", n},
                        {"residual_mean", mean},
                        {"residual_stddev", std::sqrt(var)}});
    }
}

void analyze_trend(const TelemetryFrame& frame, OutputDir& dir) {
    const TrendReport r = trend(require(frame, ChannelKind::LoadPower, "trend analysis"));
    dir.write_json("trend.json", to_json(r));
    dir.write("trend.csv", [&](std::ostream& out) { write_trend_csv(out, r); });
}

void analyze_correlate(const TelemetryFrame& frame, OutputDir& dir) {
    const Series& irr = require(frame, ChannelKind::Irradiance, "correlation analysis");
    const Series& wind = require(frame, ChannelKind::WindSpeed, "correlation analysis");
    const CorrelationOptions options;
    const CorrelationReport r = correlate(irr, wind, options);
    const auto curve = cross_correlation_curve(hourly_average(irr), hourly_average(wind), options.max_lag);
    Json j = {{"a", suffix(ChannelKind::Irradiance)}, {"b", suffix(ChannelKind::WindSpeed)}, {"hourly", options.hourly}};
    const Json report = to_json(r);
    for (const auto& [k, v] : report.items()) j[k] = v;
    dir.write_json("correlation.json", j);
    dir.write("correlation.csv", [&](std::ostream& out) { write_lag_csv(out, curve); });
}

void analyze_anomalies(const TelemetryFrame& frame, OutputDir& dir) {
    constexpr double kZ = 4.0;
    std::vector<Anomaly> all;
    for (const auto& [kind, series] : frame.series()) {
        const auto found = detect_anomalies(series, kZ, Baseline::PerSlot);
        all.insert(all.end(), found.begin(), found.end());
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Anomaly& a, const Anomaly& b) { return a.timestamp < b.timestamp; });
    Json list = Json::array();
    for (const auto& a : all) list.push_back(to_json(a));
    dir.write_json("anomalies.json", {{"z_threshold", kZ}, {"baseline", "per_slot"}, {"anomalies", std::move(list)}});
    dir.write("anomalies.csv", [&](std::ostream& out) { write_anomalies_csv(out, all); });
}

struct AnalyzeArgs {
    std::string frame;
    std::string analyses = "outages";
    std::string out_dir = ".";
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

int cmd_analyze(const AnalyzeArgs& a) {
    std::vector<std::string> requested = split_list(a.analyses);
    const bool everything = requested.size() == 1 && requested[0] == "all";
    if (everything) requested = kAnalyses;
    if (requested.empty()) throw CliError(kUsageError, "no analyses requested");
    for (const auto& name : requested) {
        if (std::find(kAnalyses.begin(), kAnalyses.end(), name) == kAnalyses.end()) {
            throw CliError(kUsageError, "unknown analysis '" + name + "'");
        }
    }
    const TelemetryFrame frame = load_frame(a.frame);
    OutputDir dir(a.out_dir);
    const std::map<std::string, void (*)(const TelemetryFrame&, OutputDir&)> table = {
        {"outages", analyze_outages},   {"spectrum", analyze_spectrum},   {"acf", analyze_acf},
        {"typical-day", analyze_typical_day}, {"seasonal", analyze_seasonal}, {"trend", analyze_trend},
        {"correlate", analyze_correlate}, {"anomalies", analyze_anomalies}};
    Manifest manifest{"analyze", "", {a.frame}, std::nullopt, {}};
    // Canonical order keeps the run independent of how the list was spelled.
    for (const auto& name : kAnalyses) {
        if (std::find(requested.begin(), requested.end(), name) == requested.end()) continue;
        log().info("running {}", name);
        if (!everything) {
            table.at(name)(frame, dir);
            continue;
        }
        // "all" runs what the frame supports; a named analysis must succeed
        try {
            table.at(name)(frame, dir);
        } catch (const std::logic_error& e) {
            log().warn("skipping {}: {}", name, e.what());
            manifest.skipped[name] = e.what();
        }
    }
    write_manifest(dir, manifest);
    return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::uint64_t seed = 1;
    int days = 30;
    std::string out_dir = ".";
    int step_minutes = 10;
    std::string start = "2019-01-01T00:00:00";
};

SimulationConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return {};
    return load_sim_config(path);
}

int cmd_simulate(const SimulateArgs& a) {
    const SimulationConfig config = load_config_or_default(a.config);
    if (a.days < 1) throw CliError(kUsageError, "--days must be at least 1");
    if (a.step_minutes < 1) throw CliError(kUsageError, "--step must be at least 1 minute");
    const auto start = try_parse_timestamp(a.start);
    if (!start) throw CliError(kUsageError, "cannot parse --start '" + a.start + "'");
    const Duration step = static_cast<Duration>(a.step_minutes) * kSecondsPerMinute;
    const SimSpan span{*start, *start + static_cast<Duration>(a.days) * kSecondsPerDay, step};
    const SimResult r = simulate(config.grid, SyntheticWeather{a.seed, config.weather},
                                 SyntheticDemand{a.seed, config.demand}, span);

    OutputDir dir(a.out_dir);
    dir.write("telemetry.csv", [&](std::ostream& out) { write_frame_csv(out, r.frame); });

    CsvSchema schema;
    for (const auto& [kind, series] : r.frame.series()) schema.columns.emplace_back(channel_column(kind), kind);
    dir.write_json("schema.json", schema_to_json(schema, step));

    const OutageStats stats = outage_stats(r.truth_outages, span.start, span.end);
    StepEnergy total;
    for (const auto& e : r.energy) {
        total.generation += e.generation;
        total.delivered += e.delivered;
        total.battery_bus += e.battery_bus;
        total.dump += e.dump;
        total.stored_delta += e.stored_delta;
    }
    double demand = 0.0;
    for (double d : r.demand_kw) demand += d * static_cast<double>(step) / kSecondsPerHour;
    Json truth = to_json(stats);
    truth["energy_kwh"] = {{"demand", demand},
                           {"generation", total.generation},
                           {"delivered", total.delivered},
                           {"battery_bus", total.battery_bus},
                           {"dump", total.dump},
                           {"stored_delta", total.stored_delta}};
    dir.write_json("truth.json", truth);
    dir.write("truth_flags.csv", [&](std::ostream& out) {
        out << "timestamp,online,demand_kw,dump_load_active,inverter_clipped\n";
        const Series& v = r.frame.at(ChannelKind::DcVoltage);
        for (std::size_t i = 0; i < r.online.size(); ++i) {
            out << format_timestamp(v.time_at(i)) << ',' << int(r.online[i]) << ','
                << format_number(r.demand_kw[i]) << ',' << int(r.truth_flags[i].dump_load_active) << ','
                << int(r.truth_flags[i].inverter_clipped) << '\n';
        }
    });
    std::vector<std::string> inputs;
    if (!a.config.empty()) inputs.push_back(a.config);
    write_manifest(dir, {"simulate", a.config, inputs, a.seed, {}});
    log().info("simulated {} days, {} outages", a.days, r.truth_outages.size());
    return kOk;
}

// ---------------------------------------------------------------------------

// Delivered load reads zero while the system is off, which is not demand. Those
// samples (and any gaps) take the typical-day mean of the served samples instead.
Series served_load(const Series& load, const std::vector<OutageEpisode>& outages) {
    std::vector<std::optional<double>> v = load.values();
    for (const auto& e : outages) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Timestamp t = load.time_at(i);
            if (t >= e.start && t < e.end) v[i].reset();
        }
    }
    const Series masked(load.channel(), load.start(), load.step(), v);
    if (masked.gap_count() == masked.size()) return load;
    double sum = 0.0;
    for (const auto& x : v) {
        if (x) sum += *x;
    }
    const double overall = sum / static_cast<double>(masked.size() - masked.gap_count());
    const DailyProfile profile = typical_day(masked);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i]) continue;
        const std::size_t slot = profile_slot(profile, load.time_at(i));
        v[i] = profile.slot_counts[slot] > 0 ? profile.slot_means[slot] : overall;
    }
    return Series(load.channel(), load.start(), load.step(), std::move(v));
}

struct ForecastArgs {
    std::string frame;
    std::string config;
    double horizon_hours = 24.0;
    int fit_days = 14;
    std::string out_dir = ".";
};

int cmd_forecast(const ForecastArgs& a) {
    const SimulationConfig config = load_config_or_default(a.config);
    if (!(a.horizon_hours > 0.0)) throw CliError(kUsageError, "--horizon must be positive");
    if (a.fit_days < 1) throw CliError(kUsageError, "--fit-days must be at least 1");
    const TelemetryFrame frame = load_frame(a.frame);
    const Duration step = frame.step();
    const Duration horizon = static_cast<Duration>(std::llround(a.horizon_hours * kSecondsPerHour));
    const Timestamp fit_from =
        std::max(frame.start(), frame.end() - static_cast<Duration>(a.fit_days) * kSecondsPerDay);

    const Series& v = require(frame, ChannelKind::DcVoltage, "forecast");
    DetectOptions detect;
    detect.cutoff = config.grid.cutoff_v;
    detect.hysteresis = config.grid.rearm_v - config.grid.cutoff_v;
    const auto outages = detect_outages(v, detect);

    OutputDir dir(a.out_dir);
    std::map<ChannelKind, Series> forecasts;
    for (ChannelKind kind : {ChannelKind::Irradiance, ChannelKind::WindSpeed, ChannelKind::LoadPower}) {
        Series s = require(frame, kind, "forecast").slice(fit_from, frame.end());
        if (kind == ChannelKind::LoadPower) s = served_load(s, outages);
        const HarmonicModel model = fit_harmonic(s);
        const Series f = predict(model, frame.end(), horizon, step);
        dir.write_json("model_" + suffix(kind) + ".json", to_json(model));
        dir.write("forecast_" + suffix(kind) + ".csv", [&](std::ostream& out) { write_series_csv(out, f); });
        forecasts.emplace(kind, f);
    }

    std::optional<double> last_v;
    for (auto it = v.values().rbegin(); it != v.values().rend() && !last_v; ++it) last_v = *it;
    if (!last_v) throw std::invalid_argument("voltage channel holds no data");
    BatteryState battery = battery_at_rest(soc_from_voltage(*last_v, config.grid), config.grid);
    // still inside an outage at the end of the record: the system stays off until rearm
    if (!outages.empty() && outages.back().end >= frame.end()) battery.online = false;

    const auto alerts = outage_risk(forecasts.at(ChannelKind::Irradiance), forecasts.at(ChannelKind::WindSpeed),
                                    forecasts.at(ChannelKind::LoadPower), battery, config.grid, horizon);
    dir.write("alerts.txt", [&](std::ostream& out) {
        for (const auto& al : alerts) out << alert_line(al) << '\n';
    });
    Json list = Json::array();
    for (const auto& al : alerts) list.push_back(to_json(al));
    dir.write_json("alerts.json", {{"initial_soc", battery.soc},
                                   {"initial_voltage", *last_v},
                                   {"horizon_hours", a.horizon_hours},
                                   {"alerts", std::move(list)}});
    std::vector<std::string> inputs{a.frame};
    if (!a.config.empty()) inputs.push_back(a.config);
    write_manifest(dir, {"forecast", a.config, inputs, std::nullopt, {}});
    for (const auto& al : alerts) log().warn("{}", alert_line(al));
    return kOk;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& frame_path) {
    const TelemetryFrame frame = load_frame(frame_path);
    Json j = {{"start", format_timestamp(frame.start())},
              {"end", format_timestamp(frame.end())},
              {"step_s", frame.step()},
              {"samples", frame.size()}};
    Json channels = Json::object();
    for (const auto& [kind, series] : frame.series()) {
        Json c = {{"unit", unit_symbol(series.unit())}, {"gaps", series.gap_count()}};
        if (!series.has_gaps() && series.size() >= 4) {
            Json periods = Json::array();
            for (const auto& p : detect_periods(dft(series), 3).peaks) periods.push_back(p.period_hours);
            c["top_periods_hours"] = std::move(periods);
        }
        channels[suffix(kind)] = std::move(c);
    }
    j["channels"] = std::move(channels);
    if (frame.has(ChannelKind::DcVoltage)) {
        const OutageStats stats = outage_stats(detect_outages(frame.at(ChannelKind::DcVoltage)), frame.start(),
                                               frame.end());
        j["outage_count"] = stats.episodes.size();
        j["outage_fraction"] = stats.outage_fraction;
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
}

template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const CliError& e) {
        log().error("{}", e.what());
        return e.code();
    } catch (const ConfigError& e) {
        log().error("configuration: {}", e.what());
        return kConfigError;
    } catch (const SchemaError& e) {
        log().error("schema: {}", e.what());
        return kConfigError;
    } catch (const ParseError& e) {
        log().error("parse: {}", e.what());
        return kIoError;
    } catch (const std::invalid_argument& e) {
        log().error("{}", e.what());
        return kPreconditionError;
    } catch (const std::domain_error& e) {
        log().error("{}", e.what());
        return kPreconditionError;
    } catch (const std::out_of_range& e) {
        log().error("{}", e.what());
        return kPreconditionError;
    } catch (const std::exception& e) {
        log().error("{}", e.what());
        return kIoError;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Microgrid telemetry analysis and simulation", "mgi"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Clean and resample a raw telemetry CSV");
    ingest_cmd->add_option("input", ingest.input, "Raw CSV file")->required();
    ingest_cmd->add_option("--schema", ingest.schema, "Schema JSON file")->required();
    ingest_cmd->add_option("--out", ingest.out, "Output frame CSV")->required();
    ingest_cmd->add_option("--step", ingest.step_minutes, "Grid step in minutes");
    ingest_cmd->add_option("--fill", ingest.fill, "Gap fill: none, hold or linear");
    ingest_cmd->add_option("--fill-max", ingest.fill_max, "Longest gap run to fill, in samples");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Run analyses on a telemetry frame");
    analyze_cmd->add_option("frame", analyze.frame, "Frame CSV")->required();
    analyze_cmd->add_option("--analyses", analyze.analyses, "Comma list or 'all'");
    analyze_cmd->add_option("--out-dir", analyze.out_dir, "Output directory");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate the microgrid");
    sim_cmd->add_option("--config", sim.config, "Configuration file");
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--days", sim.days, "Number of days");
    sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory");
    sim_cmd->add_option("--step", sim.step_minutes, "Step in minutes");
    sim_cmd->add_option("--start", sim.start, "First timestamp");

    ForecastArgs fc;
    auto* fc_cmd = app.add_subcommand("forecast", "Forecast channels and outage risk");
    fc_cmd->add_option("frame", fc.frame, "Frame CSV")->required();
    fc_cmd->add_option("--config", fc.config, "Configuration file");
    fc_cmd->add_option("--horizon", fc.horizon_hours, "Horizon in hours");
    fc_cmd->add_option("--fit-days", fc.fit_days, "Days of history to fit");
    fc_cmd->add_option("--out-dir", fc.out_dir, "Output directory");

    std::string report_frame;
    auto* report_cmd = app.add_subcommand("report", "Print a JSON summary of a frame");
    report_cmd->add_option("frame", report_frame, "Frame CSV")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    if (*ingest_cmd) return guarded([&] { return cmd_ingest(ingest); });
    if (*analyze_cmd) return guarded([&] { return cmd_analyze(analyze); });
    if (*sim_cmd) return guarded([&] { return cmd_simulate(sim); });
    if (*fc_cmd) return guarded([&] { return cmd_forecast(fc); });
    return guarded([&] { return cmd_report(report_frame); });
}

} // namespace mgi::cli
