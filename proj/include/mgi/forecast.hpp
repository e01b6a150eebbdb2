#pragma once

#include "mgi/simgrid.hpp"
#include "mgi/telemetry.hpp"

#include <string>
#include <vector>

namespace mgi {

struct HarmonicComponent {
    double period_hours = 0.0;
    double amplitude = 0.0;
    double phase = 0.0; // radians in (-pi, pi]
};

/// mean + sum_i amplitude_i * cos(2 pi t / period_i + phase_i), with t in seconds
/// since the epoch, so a model can be evaluated at any timestamp.
struct HarmonicModel {
    ChannelKind channel = ChannelKind::LoadPower;
    double mean = 0.0;
    std::vector<HarmonicComponent> components;
    double residual_rms = 0.0;

    double value_at(Timestamp t) const;
};

/// Least-squares fit of the mean plus a cosine/sine pair per period, solved through
/// the normal equations. Needs a gap-free series spanning at least twice the longest
/// period; duplicate or non-positive periods are rejected.
HarmonicModel fit_harmonic(const Series& series, const std::vector<double>& periods_hours = {24.0, 12.0});

// Evaluates the model on [from, from + horizon). Irradiance, wind and load are
// clamped at zero.
Series predict(const HarmonicModel& model, Timestamp from, Duration horizon,
               Duration step = 10 * kSecondsPerMinute);

struct OutageAlert {
    Timestamp predicted_outage_start = 0;
    double predicted_min_voltage = 0.0;
    double deficit_energy_kwh = 0.0; // demand left unserved during the predicted outage
    double recommended_shed_kw = 0.0;
};

/// Steps the microgrid over the forecasts (truncated to the horizon) from the given
/// battery state and reports every predicted online -> offline transition. The shed
/// is the smallest constant load reduction, in 0.01 kW steps, that removes every
/// transition over the horizon; it is the same for all alerts of one run.
std::vector<OutageAlert> outage_risk(const Series& irradiance, const Series& wind, const Series& load,
                                     const BatteryState& battery, const MicrogridConfig& config,
                                     Duration horizon);

// "ALERT <iso-time> shed <kW> kW"
std::string alert_line(const OutageAlert& alert);

} // namespace mgi
