#pragma once

#include "mgi/telemetry.hpp"

#include <array>
#include <vector>

namespace mgi {

struct OutageEpisode {
    Timestamp start = 0;
    Timestamp end = 0; // exclusive
    double min_voltage = 0.0;

    Duration duration() const { return end - start; }
    bool operator==(const OutageEpisode&) const = default;
};

struct DetectOptions {
    double cutoff = 43.0;
    // Runs shorter than this are dropped; interruptions shorter than this (online
    // spells or missing samples) do not split a run.
    Duration min_duration = 20 * kSecondsPerMinute;
    // Once below cutoff, the system stays off until a sample reaches cutoff + hysteresis.
    double hysteresis = 1.0;
};

/// Outage episodes in a DC voltage series.
///
/// A scan starts online. A present sample below `cutoff` switches to offline and
/// opens an episode; the episode closes at the first sample >= cutoff + hysteresis
/// (end = that sample's time). While offline, a run of missing samples lasting at
/// least `min_duration` closes the episode one step after its last present sample
/// and resets the scan to online. An episode still open at the end of the series
/// closes one step after its last present sample. Episodes separated by less than
/// `min_duration` are merged, then episodes shorter than `min_duration` dropped.
std::vector<OutageEpisode> detect_outages(const Series& voltage, const DetectOptions& options = {});

struct OutageStats {
    std::vector<OutageEpisode> episodes;
    // Number of episodes whose [start, end) touches each hour of day.
    std::array<int, 24> hour_histogram{};
    // Total outage duration / analysed span.
    double outage_fraction = 0.0;
    Timestamp span_start = 0;
    Timestamp span_end = 0;
};

OutageStats outage_stats(const std::vector<OutageEpisode>& episodes, Timestamp span_start,
                         Timestamp span_end);

enum class Cause { LowPriorResource, HighPriorDemand, BatteryFault, Combination, Undetermined };
std::string_view cause_name(Cause cause);

struct AttributionConfig {
    Duration lookback_resource = 48 * kSecondsPerHour;
    double wind_low_threshold = 5.0;          // m/s, mean over lookback_resource
    double irradiance_low_threshold = 700.0;  // W/m2, peak over lookback_resource
    Duration lookback_demand = 12 * kSecondsPerHour;
    double demand_high_factor = 1.5;          // x mean load of the whole frame
    Duration lookback_fault = 24 * kSecondsPerHour;
    double voltage_jerk_threshold = 2.0;      // V between consecutive samples
};

struct AttributionEvidence {
    double prior_wind_mean = 0.0;
    double prior_peak_irradiance = 0.0;
    double pre_outage_load_mean = 0.0;
    double demand_threshold = 0.0;
    double max_voltage_step = 0.0;
};

struct CauseAttribution {
    OutageEpisode episode;
    std::vector<Cause> causes; // sorted by enum order
    AttributionEvidence evidence;

    bool has(Cause c) const;
};

/// Checks the data preceding an outage against the three cause rules. The frame
/// must contain irradiance, wind, load and voltage and cover the longest lookback.
/// Throws std::invalid_argument when a lookback window is not covered or holds no
/// present samples.
CauseAttribution attribute_cause(const OutageEpisode& episode, const TelemetryFrame& frame,
                                 const AttributionConfig& config = {});

} // namespace mgi
