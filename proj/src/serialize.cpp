#include "mgi/serialize.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mgi {

namespace {

std::string_view spectrum_kind_name(SpectrumKind k) {
    return k == SpectrumKind::Amplitude ? "amplitude" : "power_density";
}

std::string slot_label(Duration offset) {
    char buf[32];
    const auto day = offset / kSecondsPerDay;
    const auto tod = offset % kSecondsPerDay;
    const int h = static_cast<int>(tod / kSecondsPerHour);
    const int m = static_cast<int>((tod % kSecondsPerHour) / kSecondsPerMinute);
    const int s = static_cast<int>(tod % kSecondsPerMinute);
    if (day > 0) {
        std::snprintf(buf, sizeof buf, "d%lld %02d:%02d:%02d", static_cast<long long>(day), h, m, s);
    } else {
        std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", h, m, s);
    }
    return buf;
}

double hours(Duration d) { return static_cast<double>(d) / static_cast<double>(kSecondsPerHour); }

} // namespace

Json to_json(const CleanReport& report) {
    Json defects = Json::array();
    for (const Defect& d : report.defects) {
        defects.push_back({{"row", d.row}, {"column", d.column}, {"kind", defect_name(d.kind)}});
    }
    return {{"rows_total", report.rows_total},
            {"rows_dropped", report.rows_dropped},
            {"cells_nullified", report.cells_nullified},
            {"defects", std::move(defects)}};
}

Json to_json(const OutageEpisode& e) {
    return {{"start", format_timestamp(e.start)},
            {"end", format_timestamp(e.end)},
            {"min_voltage", e.min_voltage},
            {"duration_s", e.duration()}};
}

Json to_json(const OutageStats& stats) {
    Json episodes = Json::array();
    for (const auto& e : stats.episodes) episodes.push_back(to_json(e));
    return {{"episodes", std::move(episodes)},
            {"hour_histogram", stats.hour_histogram},
            {"outage_fraction", stats.outage_fraction},
            {"span", {{"start", format_timestamp(stats.span_start)}, {"end", format_timestamp(stats.span_end)}}},
            {"fraction_denominator", "analyzed_span"}};
}

Json to_json(const CauseAttribution& a) {
    Json causes = Json::array();
    for (Cause c : a.causes) causes.push_back(cause_name(c));
    return {{"episode", to_json(a.episode)},
            {"causes", std::move(causes)},
            {"evidence",
             {{"prior_wind_mean", a.evidence.prior_wind_mean},
              {"prior_peak_irradiance", a.evidence.prior_peak_irradiance},
              {"pre_outage_load_mean", a.evidence.pre_outage_load_mean},
              {"demand_threshold", a.evidence.demand_threshold},
              {"max_voltage_step", a.evidence.max_voltage_step}}}};
}

Json to_json(const Spectrum& s) {
    return {{"kind", spectrum_kind_name(s.kind)},
            {"transform_length", s.transform_length},
            {"frequencies_cpd", s.frequencies_cpd},
            {"magnitudes", s.magnitudes}};
}

Json to_json(const PeriodicityReport& r) {
    Json peaks = Json::array();
    for (const auto& p : r.peaks) {
        peaks.push_back({{"period_hours", p.period_hours}, {"strength", p.strength}, {"frequency_cpd", p.frequency_cpd}});
    }
    Json acf = Json::array();
    for (const auto& p : r.acf_peaks) acf.push_back({{"lag_hours", p.lag_hours}, {"correlation", p.correlation}});
    return {{"peaks", std::move(peaks)}, {"acf_peaks", std::move(acf)}};
}

Json to_json(const DailyProfile& p) {
    return {{"channel", channel_name(p.channel)},
            {"step_s", p.step},
            {"period_s", p.period},
            {"slot_means", p.slot_means},
            {"slot_counts", p.slot_counts},
            {"slot_stddev", p.slot_stddev}};
}

Json to_json(const TrendReport& r) {
    Json years = Json::object();
    for (const auto& [year, mean] : r.per_year_mean) {
        years[std::to_string(year)] = {{"mean_kw", mean},
                                       {"daily_max_mean_kw", r.per_year_daily_max_mean.at(year)},
                                       {"days", r.per_year_days.at(year)}};
    }
    Json j = {{"per_year", std::move(years)}, {"slope_years", r.slope_years}, {"slope_kw_per_year", r.slope}};
    j["growth_pct"] = r.growth_pct ? Json(*r.growth_pct) : Json(nullptr);
    return j;
}

Json to_json(const Anomaly& a) {
    return {{"timestamp", format_timestamp(a.timestamp)},
            {"channel", channel_name(a.channel)},
            {"value", a.value},
            {"zscore", a.zscore},
            {"kind", a.kind == AnomalyKind::Spike ? "spike" : "drop"}};
}

Json to_json(const CorrelationReport& r) {
    return {{"pearson_r", r.pearson_r},
            {"best_lag_hours", hours(r.best_lag)},
            {"best_lag_r", r.best_lag_r},
            {"daily_peak_offset_hours", r.daily_peak_offset}};
}

Json to_json(const HarmonicModel& m) {
    Json comps = Json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"period_hours", c.period_hours}, {"amplitude", c.amplitude}, {"phase", c.phase}});
    }
    return {{"channel", channel_name(m.channel)},
            {"unit", unit_symbol(unit_of(m.channel))},
            {"mean", m.mean},
            {"components", std::move(comps)},
            {"residual_rms", m.residual_rms}};
}

Json to_json(const OutageAlert& a) {
    return {{"predicted_outage_start", format_timestamp(a.predicted_outage_start)},
            {"predicted_min_voltage", a.predicted_min_voltage},
            {"deficit_energy_kwh", a.deficit_energy_kwh},
            {"recommended_shed_kw", a.recommended_shed_kw}};
}

HarmonicModel harmonic_model_from_json(const Json& j) {
    HarmonicModel m;
    const auto channel = channel_from_name(j.at("channel").get<std::string>());
    if (!channel) throw std::invalid_argument("unknown channel in harmonic model");
    m.channel = *channel;
    m.mean = j.at("mean").get<double>();
    m.residual_rms = j.at("residual_rms").get<double>();
    for (const auto& c : j.at("components")) {
        m.components.push_back({c.at("period_hours").get<double>(), c.at("amplitude").get<double>(),
                                c.at("phase").get<double>()});
    }
    return m;
}

void write_histogram_csv(std::ostream& out, const OutageStats& stats) {
    out << "hour,count\n";
    for (std::size_t h = 0; h < stats.hour_histogram.size(); ++h) {
        out << h << ',' << stats.hour_histogram[h] << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "frequency_cpd,magnitude\n";
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
        out << format_number(s.frequencies_cpd[k]) << ',' << format_number(s.magnitudes[k]) << '\n';
    }
}

void write_acf_csv(std::ostream& out, const std::vector<AcfPoint>& acf) {
    out << "lag_hours,r\n";
    for (const auto& p : acf) out << format_number(hours(p.lag)) << ',' << format_number(p.r) << '\n';
}

void write_profile_csv(std::ostream& out, const DailyProfile& p) {
    out << "slot_time,mean,stddev,count\n";
    for (std::size_t s = 0; s < p.slot_means.size(); ++s) {
        out << slot_label(static_cast<Duration>(s) * p.step) << ',' << format_number(p.slot_means[s]) << ','
            << format_number(p.slot_stddev[s]) << ',' << p.slot_counts[s] << '\n';
    }
}

void write_series_csv(std::ostream& out, const Series& series) {
    out << "timestamp," << channel_column(series.channel()) << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_timestamp(series.time_at(i)) << ',';
        if (series[i]) out << format_number(*series[i]);
        out << '\n';
    }
}

void write_trend_csv(std::ostream& out, const TrendReport& r) {
    out << "year,mean_kw,daily_max_mean_kw,days\n";
    for (const auto& [year, mean] : r.per_year_mean) {
        out << year << ',' << format_number(mean) << ',' << format_number(r.per_year_daily_max_mean.at(year))
            << ',' << r.per_year_days.at(year) << '\n';
    }
}

void write_anomalies_csv(std::ostream& out, const std::vector<Anomaly>& anomalies) {
    out << "timestamp,channel,value,zscore,kind\n";
    for (const auto& a : anomalies) {
        out << format_timestamp(a.timestamp) << ',' << channel_name(a.channel) << ',' << format_number(a.value)
            << ',' << format_number(a.zscore) << ',' << (a.kind == AnomalyKind::Spike ? "spike" : "drop") << '\n';
    }
}

void write_lag_csv(std::ostream& out, const std::vector<LagPoint>& curve) {
    out << "lag_hours,r\n";
    for (const auto& p : curve) {
        out << format_number(hours(p.lag)) << ',';
        if (p.r) out << format_number(*p.r);
        out << '\n';
    }
}

} // namespace mgi
