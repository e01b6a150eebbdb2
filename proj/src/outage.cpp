#include "mgi/outage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mgi {

std::vector<OutageEpisode> detect_outages(const Series& voltage, const DetectOptions& options) {
    if (voltage.channel() != ChannelKind::DcVoltage) {
        throw std::invalid_argument("outage detection needs a DC voltage series");
    }
    if (options.min_duration < 0 || options.hysteresis < 0.0) {
        throw std::invalid_argument("min_duration and hysteresis must be non-negative");
    }
    const double rearm = options.cutoff + options.hysteresis;
    const Duration step = voltage.step();

    std::vector<OutageEpisode> raw;
    bool offline = false;
    OutageEpisode current;
    std::size_t last_present = 0;
    std::size_t gap_run = 0;

    auto close_after_last_present = [&] {
        current.end = voltage.time_at(last_present) + step;
        raw.push_back(current);
        offline = false;
    };

    for (std::size_t i = 0; i < voltage.size(); ++i) {
        const auto& v = voltage[i];
        if (!v) {
            if (offline && static_cast<Duration>(++gap_run) * step >= options.min_duration) {
                close_after_last_present();
            }
            continue;
        }
        if (!offline) {
            if (*v < options.cutoff) {
                offline = true;
                current = {voltage.time_at(i), 0, *v};
                last_present = i;
                gap_run = 0;
            }
        } else if (*v >= rearm) {
            current.end = voltage.time_at(i);
            raw.push_back(current);
            offline = false;
        } else {
            current.min_voltage = std::min(current.min_voltage, *v);
            last_present = i;
            gap_run = 0;
        }
    }
    if (offline) close_after_last_present();

    std::vector<OutageEpisode> merged;
    for (const OutageEpisode& e : raw) {
        if (!merged.empty() && e.start - merged.back().end < options.min_duration) {
            merged.back().end = e.end;
            merged.back().min_voltage = std::min(merged.back().min_voltage, e.min_voltage);
        } else {
            merged.push_back(e);
        }
    }
    std::erase_if(merged, [&](const OutageEpisode& e) { return e.duration() < options.min_duration; });
    return merged;
}

OutageStats outage_stats(const std::vector<OutageEpisode>& episodes, Timestamp span_start,
                         Timestamp span_end) {
    if (span_start >= span_end) throw std::invalid_argument("span must have positive length");
    OutageStats stats;
    stats.episodes = episodes;
    stats.span_start = span_start;
    stats.span_end = span_end;

    Duration total = 0;
    for (const OutageEpisode& e : episodes) {
        if (e.start < span_start || e.end > span_end || e.start >= e.end) {
            throw std::invalid_argument("episode lies outside the analysed span");
        }
        total += e.duration();

        std::array<bool, 24> touched{};
        const std::int64_t first_hour = floor_div(e.start, kSecondsPerHour);
        const std::int64_t last_hour = floor_div(e.end - 1, kSecondsPerHour);
        for (std::int64_t h = first_hour; h <= last_hour && h < first_hour + 24; ++h) {
            touched[static_cast<std::size_t>(h - floor_div(h, 24) * 24)] = true;
        }
        for (std::size_t h = 0; h < 24; ++h) stats.hour_histogram[h] += touched[h] ? 1 : 0;
    }
    stats.outage_fraction = static_cast<double>(total) / static_cast<double>(span_end - span_start);
    return stats;
}

std::string_view cause_name(Cause cause) {
    switch (cause) {
    case Cause::LowPriorResource: return "low_prior_resource";
    case Cause::HighPriorDemand: return "high_prior_demand";
    case Cause::BatteryFault: return "battery_fault";
    case Cause::Combination: return "combination";
    case Cause::Undetermined: return "undetermined";
    }
    return "unknown";
}

bool CauseAttribution::has(Cause c) const {
    return std::find(causes.begin(), causes.end(), c) != causes.end();
}

namespace {

std::vector<double> window_values(const Series& s, Timestamp from, Timestamp to) {
    std::vector<double> out;
    const Series w = s.slice(from, to);
    for (const auto& v : w.values()) {
        if (v) out.push_back(*v);
    }
    if (out.empty()) {
        throw std::invalid_argument("no " + std::string(channel_name(s.channel())) +
                                    " data in lookback window");
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

CauseAttribution attribute_cause(const OutageEpisode& episode, const TelemetryFrame& frame,
                                 const AttributionConfig& config) {
    const Duration longest =
        std::max({config.lookback_resource, config.lookback_demand, config.lookback_fault});
    if (frame.start() > episode.start - longest) {
        throw std::invalid_argument("frame does not cover the lookback before the episode");
    }
    const Series& irradiance = frame.at(ChannelKind::Irradiance);
    const Series& wind = frame.at(ChannelKind::WindSpeed);
    const Series& load = frame.at(ChannelKind::LoadPower);
    const Series& voltage = frame.at(ChannelKind::DcVoltage);

    CauseAttribution out;
    out.episode = episode;
    AttributionEvidence& ev = out.evidence;

    const Timestamp t0 = episode.start;
    ev.prior_wind_mean = mean_of(window_values(wind, t0 - config.lookback_resource, t0));
    const auto irr = window_values(irradiance, t0 - config.lookback_resource, t0);
    ev.prior_peak_irradiance = *std::max_element(irr.begin(), irr.end());

    ev.pre_outage_load_mean = mean_of(window_values(load, t0 - config.lookback_demand, t0));
    std::vector<double> all_load;
    for (const auto& v : load.values()) {
        if (v) all_load.push_back(*v);
    }
    ev.demand_threshold = config.demand_high_factor * mean_of(all_load);

    // Consecutive present samples only; a gap breaks the chain.
    const Series vw = voltage.slice(t0 - config.lookback_fault, t0);
    bool any = false;
    for (std::size_t i = 1; i < vw.size(); ++i) {
        if (vw[i] && vw[i - 1]) {
            ev.max_voltage_step = std::max(ev.max_voltage_step, std::abs(*vw[i] - *vw[i - 1]));
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("no consecutive voltage samples in lookback window");

    if (ev.prior_wind_mean < config.wind_low_threshold &&
        ev.prior_peak_irradiance < config.irradiance_low_threshold) {
        out.causes.push_back(Cause::LowPriorResource);
    }
    if (ev.pre_outage_load_mean > ev.demand_threshold) out.causes.push_back(Cause::HighPriorDemand);
    if (ev.max_voltage_step > config.voltage_jerk_threshold) out.causes.push_back(Cause::BatteryFault);

    if (out.causes.size() >= 2) {
        out.causes.push_back(Cause::Combination);
    } else if (out.causes.empty()) {
        out.causes.push_back(Cause::Undetermined);
    }
    return out;
}

} // namespace mgi
