#pragma once

#include "mgi/analytics.hpp"
#include "mgi/forecast.hpp"
#include "mgi/outage.hpp"
#include "mgi/spectral.hpp"
#include "mgi/telemetry.hpp"

#include <json.hpp>

#include <iosfwd>
#include <vector>

namespace mgi {

using Json = nlohmann::ordered_json;

Json to_json(const CleanReport& report);
Json to_json(const OutageEpisode& episode);
// Includes the span and the denominator used for outage_fraction.
Json to_json(const OutageStats& stats);
Json to_json(const CauseAttribution& attribution);
Json to_json(const Spectrum& spectrum);
Json to_json(const PeriodicityReport& report);
Json to_json(const DailyProfile& profile);
Json to_json(const TrendReport& report);
Json to_json(const Anomaly& anomaly);
Json to_json(const CorrelationReport& report);
Json to_json(const HarmonicModel& model);
Json to_json(const OutageAlert& alert);

HarmonicModel harmonic_model_from_json(const Json& j);

// hour,count
void write_histogram_csv(std::ostream& out, const OutageStats& stats);
// frequency_cpd,magnitude
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
// lag_hours,r
void write_acf_csv(std::ostream& out, const std::vector<AcfPoint>& acf);
// slot_time,mean,stddev,count
void write_profile_csv(std::ostream& out, const DailyProfile& profile);
// timestamp,<channel column>; gaps are empty cells
void write_series_csv(std::ostream& out, const Series& series);
// year,mean_kw,daily_max_mean_kw,days
void write_trend_csv(std::ostream& out, const TrendReport& report);
// timestamp,channel,value,zscore,kind
void write_anomalies_csv(std::ostream& out, const std::vector<Anomaly>& anomalies);
// lag_hours,r
void write_lag_csv(std::ostream& out, const std::vector<LagPoint>& curve);

} // namespace mgi
