#pragma once

#include "mgi/telemetry.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mgi {

/// Per-slot statistics over a repeating period (one day, or one week for the
/// day-of-week variant). Slots with no data have count 0 and mean/stddev 0.
struct DailyProfile {
    ChannelKind channel = ChannelKind::LoadPower;
    Duration step = 0;
    Duration period = kSecondsPerDay;
    std::vector<double> slot_means;
    std::vector<std::size_t> slot_counts;
    std::vector<double> slot_stddev; // population
};

// Throws std::invalid_argument if the step does not divide a day or the series
// spans less than one day.
DailyProfile typical_day(const Series& series);
// Monday-based weekly profile, 7 * 86400 / step slots.
DailyProfile typical_week(const Series& series);

// Slot index of a timestamp within a profile.
std::size_t profile_slot(const DailyProfile& profile, Timestamp t);

// x(t) - slot_mean(time of day of t); gaps stay gaps. Needs >= 2 days.
Series seasonal_adjust(const Series& series);

struct TrendReport {
    std::map<int, double> per_year_mean;
    std::map<int, double> per_year_daily_max_mean;
    std::map<int, std::size_t> per_year_days;
    std::vector<int> slope_years; // years with enough days to enter slope/growth
    double slope = 0.0;           // kW per year, least squares on per_year_mean
    std::optional<double> growth_pct; // first -> last slope year, on daily-max means
};

inline constexpr std::size_t kMinTrendDays = 30;

/// Per-calendar-year load statistics. `year_starts`, when given, replaces calendar
/// years: each boundary opens a group labelled with the calendar year of the
/// boundary. Years with fewer than kMinTrendDays days are reported but left out of
/// the slope and growth unless fewer than two years qualify.
TrendReport trend(const Series& load, const std::vector<Timestamp>& year_starts = {});

enum class AnomalyKind { Spike, Drop };
enum class Baseline { Global, PerSlot };

struct Anomaly {
    Timestamp timestamp = 0;
    ChannelKind channel = ChannelKind::LoadPower;
    double value = 0.0;
    double zscore = 0.0;
    AnomalyKind kind = AnomalyKind::Spike;
};

// |x - mu| / sigma >= z_threshold, population moments from the chosen baseline.
std::vector<Anomaly> detect_anomalies(const Series& series, double z_threshold,
                                      Baseline baseline = Baseline::Global);

// Pearson r over mutually present samples of two series on the same grid.
double pearson(const Series& a, const Series& b);

struct LagResult {
    Duration best_lag = 0;
    double r = 0.0;
};

struct LagPoint {
    Duration lag = 0;
    std::optional<double> r;
};

/// r between a(t) and b(t + lag) for integer-step lags in [-max_lag, max_lag].
std::vector<LagPoint> cross_correlation_curve(const Series& a, const Series& b, Duration max_lag);
// Argmax of the curve; ties go to the smaller |lag|, then the positive lag.
LagResult cross_correlation(const Series& a, const Series& b, Duration max_lag);

/// Circular mean over whole days of (peak hour of b - peak hour of a), in (-12, 12].
/// Days where either series is all gaps are skipped.
double daily_peak_offset(const Series& a, const Series& b);

// Hour bins averaged over present samples; empty hours become gaps.
Series hourly_average(const Series& series);

struct CorrelationReport {
    double pearson_r = 0.0;
    Duration best_lag = 0;
    double best_lag_r = 0.0;
    double daily_peak_offset = 0.0;
};

struct CorrelationOptions {
    bool hourly = true;
    Duration max_lag = 6 * kSecondsPerHour;
};

CorrelationReport correlate(const Series& a, const Series& b, const CorrelationOptions& options = {});

} // namespace mgi
