#include "mgi/simgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <type_traits>

namespace mgi {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr std::uint64_t kDemandStream = 0x9E3779B97F4A7C15ULL;

// Exactly the span's samples from a series covering it.
Series cover_span(const Series& s, ChannelKind kind, const SimSpan& span) {
    if (s.channel() != kind) throw std::invalid_argument("simulation input has the wrong channel");
    if (s.step() != span.step || (span.start - s.start()) % span.step != 0 || s.start() > span.start ||
        s.end() < span.end) {
        throw std::invalid_argument("simulation input does not match the span");
    }
    Series out = s.slice(span.start, span.end);
    if (out.has_gaps()) throw std::invalid_argument("simulation input has gaps");
    return out;
}

int days_for(const SimSpan& span) {
    return static_cast<int>((span.end - span.start + kSecondsPerDay - 1) / kSecondsPerDay);
}

} // namespace

void MicrogridConfig::validate() const {
    require(pv_kwp >= 0.0, "pv_kwp must be non-negative");
    require(pv_derate > 0.0 && pv_derate <= 1.0, "pv_derate must lie in (0, 1]");
    require(n_turbines >= 0, "n_turbines must be non-negative");
    require(turbine_rated_kw >= 0.0, "turbine_rated_kw must be non-negative");
    require(cut_in >= 0.0 && cut_in < rated_speed && rated_speed < cut_out,
            "wind speeds must satisfy 0 <= cut_in < rated_speed < cut_out");
    require(battery_kwh > 0.0, "battery_kwh must be positive");
    require(usable_depth > 0.0 && usable_depth <= 1.0, "usable_depth must lie in (0, 1]");
    require(eta_charge > 0.0 && eta_charge <= 1.0, "eta_charge must lie in (0, 1]");
    require(eta_discharge > 0.0 && eta_discharge <= 1.0, "eta_discharge must lie in (0, 1]");
    require(ocv_full_v > ocv_floor_v, "ocv_full_v must exceed ocv_floor_v");
    require(r_term_v_per_kw >= 0.0, "r_term_v_per_kw must be non-negative");
    require(inverter_limit_kw > 0.0, "inverter_limit_kw must be positive");
    require(bus_nominal_v > 0.0, "bus_nominal_v must be positive");
    require(cutoff_v < rearm_v && rearm_v < bus_maximum_v(),
            "voltages must satisfy cutoff_v < rearm_v < bus maximum");
}

double MicrogridConfig::bus_maximum_v() const {
    const double max_charge_kw = pv_kwp + n_turbines * turbine_rated_kw;
    return ocv_full_v + r_term_v_per_kw * max_charge_kw;
}

double open_circuit_voltage(double soc, const MicrogridConfig& c) {
    const double floor_soc = 1.0 - c.usable_depth;
    return c.ocv_floor_v + (c.ocv_full_v - c.ocv_floor_v) * (soc - floor_soc) / c.usable_depth;
}

double soc_from_voltage(double voltage, const MicrogridConfig& c) {
    const double floor_soc = 1.0 - c.usable_depth;
    const double soc = floor_soc + (voltage - c.ocv_floor_v) * c.usable_depth / (c.ocv_full_v - c.ocv_floor_v);
    return std::clamp(soc, 0.0, 1.0);
}

BatteryState battery_at_rest(double soc, const MicrogridConfig& c) {
    const double s = std::clamp(soc, 0.0, 1.0);
    const double v = open_circuit_voltage(s, c);
    return {s, v, v >= c.cutoff_v};
}

double pv_power(double irradiance, const MicrogridConfig& c) {
    if (irradiance < 0.0) throw std::invalid_argument("irradiance must be non-negative");
    return std::min(c.pv_kwp * (irradiance / 1000.0) * c.pv_derate, c.pv_kwp);
}

double wind_power(double speed, const MicrogridConfig& c) {
    if (speed < 0.0) throw std::invalid_argument("wind speed must be non-negative");
    const double rated = c.n_turbines * c.turbine_rated_kw;
    if (speed < c.cut_in || speed > c.cut_out) return 0.0;
    if (speed >= c.rated_speed) return rated;
    const double ci3 = c.cut_in * c.cut_in * c.cut_in;
    const double r3 = c.rated_speed * c.rated_speed * c.rated_speed;
    return rated * (speed * speed * speed - ci3) / (r3 - ci3);
}

BatteryState battery_step(const BatteryState& state, double net_power_kw, Duration dt,
                          const MicrogridConfig& c) {
    const double hours = static_cast<double>(dt) / static_cast<double>(kSecondsPerHour);
    const double stored = net_power_kw > 0.0 ? c.eta_charge * net_power_kw * hours
                                             : net_power_kw * hours / c.eta_discharge;
    BatteryState next;
    next.soc = std::clamp(state.soc + stored / c.battery_kwh, 0.0, 1.0);
    next.terminal_v = open_circuit_voltage(next.soc, c) + c.r_term_v_per_kw * net_power_kw;
    next.online = state.online ? next.terminal_v >= c.cutoff_v : next.terminal_v >= c.rearm_v;
    return next;
}

StepOutcome microgrid_step(const BatteryState& state, double generation_kw, double demand_kw,
                           Duration dt, const MicrogridConfig& c) {
    const double hours = static_cast<double>(dt) / static_cast<double>(kSecondsPerHour);
    StepOutcome out;
    if (state.online) {
        const double requested = std::min(demand_kw, c.inverter_limit_kw);
        const double dischargeable = state.soc * c.battery_kwh * c.eta_discharge / hours;
        out.delivered_kw = std::min(requested, generation_kw + dischargeable);
        out.flags.inverter_clipped = demand_kw > c.inverter_limit_kw;
    }
    const double balance = generation_kw - out.delivered_kw;
    double battery_kw = balance;
    double dump_kw = 0.0;
    if (balance > 0.0) {
        const double acceptable = (1.0 - state.soc) * c.battery_kwh / (c.eta_charge * hours);
        battery_kw = std::min(balance, acceptable);
        dump_kw = balance - battery_kw;
    }
    out.flags.dump_load_active = dump_kw > 0.0;
    out.state = battery_step(state, battery_kw, dt, c);
    out.energy = {generation_kw * hours, out.delivered_kw * hours, battery_kw * hours, dump_kw * hours,
                  (out.state.soc - state.soc) * c.battery_kwh};
    return out;
}

// ---------------------------------------------------------------------------

void WeatherParams::validate() const {
    require(clear_sky_max >= 0.0, "clear_sky_max must be non-negative");
    require(sunrise_hour >= 0.0 && sunrise_hour < sunset_hour && sunset_hour <= 24.0,
            "need 0 <= sunrise_hour < sunset_hour <= 24");
    require(low_day_probability >= 0.0 && low_day_probability <= 1.0,
            "low_day_probability must lie in [0, 1]");
    require(low_min >= 0.0 && low_min <= low_max && normal_min <= normal_max && normal_max <= 1.0 &&
                normal_min >= 0.0 && low_max <= 1.0,
            "cloudiness ranges must be ordered within [0, 1]");
    if (fixed_cloudiness) require(*fixed_cloudiness >= 0.0 && *fixed_cloudiness <= 1.0,
                                  "fixed_cloudiness must lie in [0, 1]");
    require(low_day_flicker >= 0.0 && low_day_flicker <= 1.0, "low_day_flicker must lie in [0, 1]");
    require(wind_mean >= 0.0, "wind_mean must be non-negative");
    require(wind_daily_amplitude >= 0.0, "wind_daily_amplitude must be non-negative");
    require(wind_semidiurnal_amplitude >= 0.0, "wind_semidiurnal_amplitude must be non-negative");
    require(wind_cloud_coupling >= 0.0 && wind_cloud_coupling <= 1.0, "wind_cloud_coupling must lie in [0, 1]");
    require(wind_noise_sd >= 0.0, "wind_noise_sd must be non-negative");
    require(wind_noise_ar >= 0.0 && wind_noise_ar < 1.0, "wind_noise_ar must lie in [0, 1)");
}

double WeatherParams::expected_cloudiness() const {
    if (fixed_cloudiness) return *fixed_cloudiness;
    return low_day_probability * 0.5 * (low_min + low_max) +
           (1.0 - low_day_probability) * 0.5 * (normal_min + normal_max);
}

WeatherSeries synthetic_weather(std::uint64_t seed, int days, const WeatherParams& p, Timestamp start,
                                Duration step) {
    require(days >= 1, "days must be at least 1");
    require(step > 0 && kSecondsPerDay % step == 0, "step must divide one day");
    p.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> cloudiness(static_cast<std::size_t>(days));
    std::vector<bool> low_day(static_cast<std::size_t>(days), false);
    for (std::size_t d = 0; d < cloudiness.size(); ++d) {
        const double pick = unit(rng);
        const double level = unit(rng);
        if (p.fixed_cloudiness) {
            cloudiness[d] = *p.fixed_cloudiness;
        } else if (pick < p.low_day_probability) {
            low_day[d] = true;
            cloudiness[d] = p.low_min + (p.low_max - p.low_min) * level;
        } else {
            cloudiness[d] = p.normal_min + (p.normal_max - p.normal_min) * level;
        }
    }

    const double mean_cloud = p.expected_cloudiness();
    const auto per_day = static_cast<std::size_t>(kSecondsPerDay / step);
    const std::size_t n = per_day * static_cast<std::size_t>(days);
    std::vector<double> irr(n), wind(n);
    const double innovation_sd = p.wind_noise_sd * std::sqrt(1.0 - p.wind_noise_ar * p.wind_noise_ar);
    double noise = p.wind_noise_sd * normal(rng);
    const double daylight = p.sunset_hour - p.sunrise_hour;

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = i / per_day;
        const Timestamp t = start + static_cast<Timestamp>(i) * step;
        const double hour = static_cast<double>(time_of_day(t)) / kSecondsPerHour;

        double arc = 0.0;
        if (hour > p.sunrise_hour && hour < p.sunset_hour) {
            arc = std::sin(std::numbers::pi * (hour - p.sunrise_hour) / daylight);
        }
        double flicker = 1.0;
        if (low_day[d]) flicker = 1.0 - p.low_day_flicker * unit(rng);
        irr[i] = p.clear_sky_max * cloudiness[d] * arc * flicker;

        const double coupling = mean_cloud > 0.0 ? cloudiness[d] / mean_cloud : 1.0;
        const double level = p.wind_mean * (1.0 - p.wind_cloud_coupling + p.wind_cloud_coupling * coupling);
        const double x = 2.0 * std::numbers::pi * (hour - p.wind_peak_hour) / 24.0;
        const double cycle = 1.0 + p.wind_daily_amplitude * std::cos(x) + p.wind_semidiurnal_amplitude * std::cos(2.0 * x);
        if (i > 0) noise = p.wind_noise_ar * noise + innovation_sd * normal(rng);
        wind[i] = std::max(0.0, level * cycle + noise);
    }
    return {Series::dense(ChannelKind::Irradiance, start, step, irr),
            Series::dense(ChannelKind::WindSpeed, start, step, wind)};
}

void DemandParams::validate() const {
    require(mean_kw >= 0.0, "mean_kw must be non-negative");
    require(scale >= 0.0, "scale must be non-negative");
    require(growth_per_year > -1.0, "growth_per_year must exceed -1");
    require(evening_amplitude >= 0.0 && semidiurnal_amplitude >= 0.0, "amplitudes must be non-negative");
    require(day_factor_spread >= 0.0 && day_factor_spread < 1.0, "day_factor_spread must lie in [0, 1)");
    require(noise_sd >= 0.0, "noise_sd must be non-negative");
}

Series synthetic_demand(std::uint64_t seed, int days, const DemandParams& p, Timestamp start,
                        Duration step) {
    require(days >= 1, "days must be at least 1");
    require(step > 0 && kSecondsPerDay % step == 0, "step must divide one day");
    p.validate();

    std::mt19937_64 rng(seed ^ kDemandStream);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto per_day = static_cast<std::size_t>(kSecondsPerDay / step);
    const std::size_t n = per_day * static_cast<std::size_t>(days);
    std::vector<double> load(n);
    double day_factor = 1.0;
    constexpr double kYear = 365.25 * kSecondsPerDay;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % per_day == 0) day_factor = 1.0 + p.day_factor_spread * unit(rng);
        const Timestamp t = start + static_cast<Timestamp>(i) * step;
        const double hour = static_cast<double>(time_of_day(t)) / kSecondsPerHour;
        const double shape =
            1.0 + p.evening_amplitude * std::cos(2.0 * std::numbers::pi * (hour - p.evening_peak_hour) / 24.0) +
            p.semidiurnal_amplitude * std::cos(4.0 * std::numbers::pi * (hour - p.semidiurnal_peak_hour) / 24.0);
        const double growth = std::pow(1.0 + p.growth_per_year, static_cast<double>(t - start) / kYear);
        const double value = p.mean_kw * p.scale * growth * day_factor * shape * (1.0 + p.noise_sd * normal(rng));
        load[i] = std::max(0.0, value);
    }
    return Series::dense(ChannelKind::LoadPower, start, step, load);
}

// ---------------------------------------------------------------------------

std::vector<OutageEpisode> episodes_from_flags(const Series& voltage, const std::vector<bool>& online) {
    if (online.size() != voltage.size()) throw std::invalid_argument("flag count does not match series");
    std::vector<OutageEpisode> out;
    std::optional<OutageEpisode> open;
    for (std::size_t i = 0; i < online.size(); ++i) {
        if (!online[i]) {
            const double v = voltage[i].value_or(std::numeric_limits<double>::infinity());
            if (!open) {
                open = OutageEpisode{voltage.time_at(i), 0, v};
            } else {
                open->min_voltage = std::min(open->min_voltage, v);
            }
        } else if (open) {
            open->end = voltage.time_at(i);
            out.push_back(*open);
            open.reset();
        }
    }
    if (open) {
        open->end = voltage.end();
        out.push_back(*open);
    }
    return out;
}

SimResult simulate(const MicrogridConfig& config, const WeatherInput& weather, const DemandInput& demand,
                   const SimSpan& span, std::optional<BatteryState> initial) {
    config.validate();
    require(span.step > 0, "step must be positive");
    require(span.end > span.start && (span.end - span.start) % span.step == 0,
            "span must be a positive whole number of steps");

    const WeatherSeries raw_weather = std::visit(
        [&](const auto& w) -> WeatherSeries {
            if constexpr (std::is_same_v<std::decay_t<decltype(w)>, WeatherSeries>) {
                return w;
            } else {
                return synthetic_weather(w.seed, days_for(span), w.params, span.start, span.step);
            }
        },
        weather);
    const Series raw_demand = std::visit(
        [&](const auto& d) -> Series {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Series>) {
                return d;
            } else {
                return synthetic_demand(d.seed, days_for(span), d.params, span.start, span.step);
            }
        },
        demand);

    const Series irr = cover_span(raw_weather.irradiance, ChannelKind::Irradiance, span);
    const Series wind = cover_span(raw_weather.wind, ChannelKind::WindSpeed, span);
    const Series dem = cover_span(raw_demand, ChannelKind::LoadPower, span);

    const std::size_t n = irr.size();
    std::vector<double> delivered(n), voltage(n);
    std::vector<double> demand_kw(n);
    std::vector<bool> online(n);
    std::vector<StepFlags> flags(n);
    std::vector<StepEnergy> energy(n);

    BatteryState state = initial.value_or(battery_at_rest(1.0, config));
    for (std::size_t i = 0; i < n; ++i) {
        const double gen = pv_power(*irr[i], config) + wind_power(*wind[i], config);
        const StepOutcome step = microgrid_step(state, gen, *dem[i], span.step, config);
        state = step.state;
        delivered[i] = step.delivered_kw;
        voltage[i] = state.terminal_v;
        demand_kw[i] = *dem[i];
        online[i] = state.online;
        flags[i] = step.flags;
        energy[i] = step.energy;
    }

    const Series volt = Series::dense(ChannelKind::DcVoltage, span.start, span.step, voltage);
    TelemetryFrame frame({{ChannelKind::Irradiance, irr},
                          {ChannelKind::WindSpeed, wind},
                          {ChannelKind::LoadPower, Series::dense(ChannelKind::LoadPower, span.start, span.step, delivered)},
                          {ChannelKind::DcVoltage, volt}},
                         PeriodLabel::custom("simulated"));
    auto truth = episodes_from_flags(volt, online);
    return {std::move(frame), std::move(demand_kw), std::move(online), std::move(truth), std::move(flags),
            std::move(energy)};
}

} // namespace mgi
