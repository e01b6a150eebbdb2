#pragma once

#include "mgi/outage.hpp"
#include "mgi/telemetry.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace mgi {

/// Ratings of the islanded PV-wind-battery system on a 48 V DC bus.
///
/// The battery open-circuit voltage is linear in state of charge, anchored at
/// ocv_full_v for a full bank and ocv_floor_v at the bottom of the usable window
/// (soc = 1 - usable_depth), and extended linearly below it. The terminal voltage
/// adds r_term_v_per_kw times the signed battery power (charging positive).
struct MicrogridConfig {
    double pv_kwp = 6.0;
    double pv_derate = 0.85;

    int n_turbines = 2;
    double turbine_rated_kw = 3.0;
    double cut_in = 3.0;       // m/s
    double rated_speed = 12.0; // m/s
    double cut_out = 25.0;     // m/s

    double battery_kwh = 38.4;
    double usable_depth = 0.5;
    double eta_charge = 0.90;
    double eta_discharge = 0.95;
    double ocv_full_v = 51.0;
    double ocv_floor_v = 43.0;
    double r_term_v_per_kw = 0.125; // 0.5 V at 4 kW

    double inverter_limit_kw = 8.0;
    double bus_nominal_v = 48.0;
    double cutoff_v = 43.0;
    double rearm_v = 44.0;

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    // Highest terminal voltage the model can produce (full bank, maximal charge).
    double bus_maximum_v() const;
};

struct BatteryState {
    double soc = 1.0;
    double terminal_v = 51.0;
    bool online = true;

    bool operator==(const BatteryState&) const = default;
};

double open_circuit_voltage(double soc, const MicrogridConfig& config);
// Inverse of open_circuit_voltage, clamped to [0, 1].
double soc_from_voltage(double voltage, const MicrogridConfig& config);
// State at zero current: terminal = OCV, online iff terminal >= cutoff.
BatteryState battery_at_rest(double soc, const MicrogridConfig& config);

// kW. Throws std::invalid_argument for negative irradiance.
double pv_power(double irradiance_w_m2, const MicrogridConfig& config);
// kW for the whole turbine group. Throws std::invalid_argument for negative speed.
double wind_power(double speed_m_s, const MicrogridConfig& config);

/// Applies a signed battery power (kW, charging positive) for dt. Charging stores
/// eta_charge of the input, discharging draws 1/eta_discharge from storage. soc is
/// clamped to [0, 1]. An online system goes offline when the terminal voltage falls
/// below cutoff_v; an offline one comes back at terminal >= rearm_v.
BatteryState battery_step(const BatteryState& state, double net_power_kw, Duration dt,
                          const MicrogridConfig& config);

struct StepFlags {
    bool dump_load_active = false;
    bool inverter_clipped = false;

    bool operator==(const StepFlags&) const = default;
};

// Energy flows of one step, kWh.
struct StepEnergy {
    double generation = 0.0;
    double delivered = 0.0;
    double battery_bus = 0.0; // bus-side battery energy, charging positive
    double dump = 0.0;
    double stored_delta = 0.0; // change of stored energy

    bool operator==(const StepEnergy&) const = default;
};

struct StepOutcome {
    BatteryState state;
    double delivered_kw = 0.0;
    StepFlags flags;
    StepEnergy energy;
};

/// One energy-balance step on the DC bus. An online system serves
/// min(demand, inverter limit, generation + dischargeable power); an offline one
/// serves nothing. Surplus beyond what the bank can accept goes to the dump load.
StepOutcome microgrid_step(const BatteryState& state, double generation_kw, double demand_kw,
                           Duration dt, const MicrogridConfig& config);

struct WeatherParams {
    double clear_sky_max = 1000.0; // W/m2 at solar noon
    double sunrise_hour = 6.0;
    double sunset_hour = 18.0;
    // Per-day cloudiness factor: with probability low_day_probability a low-resource
    // day drawn from [low_min, low_max], otherwise from [normal_min, normal_max].
    double low_day_probability = 0.12;
    double low_min = 0.30, low_max = 0.65;
    double normal_min = 0.75, normal_max = 1.0;
    // Overrides the random draw when set.
    std::optional<double> fixed_cloudiness;
    // Sample-to-sample irradiance flicker on low-resource days (fraction).
    double low_day_flicker = 0.3;

    double wind_mean = 10.0;        // m/s long-run mean
    double wind_daily_amplitude = 1.0; // relative; nights are near calm
    // Half-daily harmonic sharing the peak hour; narrows the midday maximum.
    double wind_semidiurnal_amplitude = 0.3; // relative
    double wind_peak_hour = 12.5;
    // Share of the daily wind level that follows the day's cloudiness.
    double wind_cloud_coupling = 0.6;
    double wind_noise_sd = 1.0;     // m/s, AR(1)
    double wind_noise_ar = 0.9;

    void validate() const;
    double expected_cloudiness() const;
};

struct WeatherSeries {
    Series irradiance;
    Series wind;
};

/// Seeded synthetic irradiance (half-sine daylight arc scaled by daily cloudiness)
/// and wind (daily harmonic peaking near solar noon plus AR(1) noise, with the daily
/// level tied to cloudiness so dull days are also calm days).
WeatherSeries synthetic_weather(std::uint64_t seed, int days, const WeatherParams& params,
                                Timestamp start, Duration step = 10 * kSecondsPerMinute);

struct DemandParams {
    double mean_kw = 0.8;
    double scale = 1.0;
    double growth_per_year = 0.0; // fractional, compounding
    double evening_amplitude = 0.5;
    double evening_peak_hour = 20.0;
    double semidiurnal_amplitude = 0.25;
    double semidiurnal_peak_hour = 8.0;
    double day_factor_spread = 0.1; // per-day factor uniform in 1 +- spread
    double noise_sd = 0.05;         // relative, per sample

    void validate() const;
};

// Community demand: daily plus half-daily harmonic shape, per-day level and noise.
Series synthetic_demand(std::uint64_t seed, int days, const DemandParams& params, Timestamp start,
                        Duration step = 10 * kSecondsPerMinute);

struct SyntheticWeather {
    std::uint64_t seed = 1;
    WeatherParams params;
};

struct SyntheticDemand {
    std::uint64_t seed = 1;
    DemandParams params;
};

using WeatherInput = std::variant<WeatherSeries, SyntheticWeather>;
using DemandInput = std::variant<Series, SyntheticDemand>;

struct SimSpan {
    Timestamp start = 0;
    Timestamp end = 0;
    Duration step = 10 * kSecondsPerMinute;
};

struct SimResult {
    // Irradiance, wind, delivered load and terminal voltage.
    TelemetryFrame frame;
    std::vector<double> demand_kw;
    std::vector<bool> online;
    std::vector<OutageEpisode> truth_outages;
    std::vector<StepFlags> truth_flags;
    std::vector<StepEnergy> energy;
};

/// Steps the system over the span. Series inputs must be gap-free, share the span's
/// step and cover the span; synthetic inputs are generated for it. Voltage and
/// online state are recorded after each step.
SimResult simulate(const MicrogridConfig& config, const WeatherInput& weather,
                   const DemandInput& demand, const SimSpan& span,
                   std::optional<BatteryState> initial = std::nullopt);

// Runs of offline samples as episodes; end is the first online sample (or span end).
std::vector<OutageEpisode> episodes_from_flags(const Series& voltage, const std::vector<bool>& online);

} // namespace mgi
