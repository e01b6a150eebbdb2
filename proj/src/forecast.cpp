#include "mgi/forecast.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace mgi {

namespace {

// Angle of 2 pi t / period, reduced before scaling so epoch-sized t keeps precision.
double phase_angle(Timestamp t, double period_hours) {
    const double period_s = period_hours * static_cast<double>(kSecondsPerHour);
    double r = std::fmod(static_cast<double>(t), period_s);
    if (r < 0.0) r += period_s;
    return 2.0 * std::numbers::pi * r / period_s;
}

bool clamps_at_zero(ChannelKind kind) { return kind != ChannelKind::DcVoltage; }

struct Trajectory {
    std::vector<OutageAlert> alerts;
};

Trajectory run_forecast(const std::vector<double>& generation, const std::vector<double>& load,
                        double shed, const BatteryState& battery, const MicrogridConfig& config,
                        const Series& grid) {
    Trajectory tr;
    BatteryState state = battery;
    std::optional<std::size_t> open;
    const double hours = static_cast<double>(grid.step()) / kSecondsPerHour;
    for (std::size_t i = 0; i < generation.size(); ++i) {
        const double demand = std::max(0.0, load[i] - shed);
        const bool was_online = state.online;
        const StepOutcome step = microgrid_step(state, generation[i], demand, grid.step(), config);
        state = step.state;
        if (was_online && !state.online) {
            tr.alerts.push_back({grid.time_at(i), state.terminal_v, 0.0, 0.0});
            open = tr.alerts.size() - 1;
        }
        if (!state.online && open) {
            OutageAlert& a = tr.alerts[*open];
            a.predicted_min_voltage = std::min(a.predicted_min_voltage, state.terminal_v);
            a.deficit_energy_kwh += (demand - step.delivered_kw) * hours;
        }
        if (state.online) open.reset();
    }
    return tr;
}

} // namespace

double HarmonicModel::value_at(Timestamp t) const {
    double v = mean;
    for (const auto& c : components) v += c.amplitude * std::cos(phase_angle(t, c.period_hours) + c.phase);
    return v;
}

HarmonicModel fit_harmonic(const Series& series, const std::vector<double>& periods_hours) {
    if (series.has_gaps()) throw std::invalid_argument("harmonic fit needs a gap-free series");
    for (std::size_t i = 0; i < periods_hours.size(); ++i) {
        if (!(periods_hours[i] > 0.0)) throw std::invalid_argument("periods must be positive");
        for (std::size_t j = 0; j < i; ++j) {
            if (periods_hours[i] == periods_hours[j]) {
                throw std::invalid_argument("duplicate period makes the fit rank deficient");
            }
        }
    }
    const double longest = periods_hours.empty()
                               ? 0.0
                               : *std::max_element(periods_hours.begin(), periods_hours.end());
    const double span_hours = static_cast<double>(series.size() * series.step()) / kSecondsPerHour;
    if (span_hours < 2.0 * longest) throw std::invalid_argument("series too short for the longest period");

    const auto y = series.dense_values();
    const std::size_t n = y.size();
    const std::size_t p = 1 + 2 * periods_hours.size();
    Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    Eigen::VectorXd aty = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::VectorXd row(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) {
        const Timestamp t = series.time_at(i);
        row(0) = 1.0;
        for (std::size_t k = 0; k < periods_hours.size(); ++k) {
            const double a = phase_angle(t, periods_hours[k]);
            row(static_cast<Eigen::Index>(1 + 2 * k)) = std::cos(a);
            row(static_cast<Eigen::Index>(2 + 2 * k)) = std::sin(a);
        }
        ata.noalias() += row * row.transpose();
        aty.noalias() += row * y[i];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
    lu.setThreshold(1e-10);
    if (lu.rank() < static_cast<Eigen::Index>(p)) throw std::invalid_argument("harmonic basis is rank deficient");
    const Eigen::VectorXd beta = lu.solve(aty);

    HarmonicModel model;
    model.channel = series.channel();
    model.mean = beta(0);
    for (std::size_t k = 0; k < periods_hours.size(); ++k) {
        // a cos + b sin = A cos(x + phi) with A = hypot(a, b), phi = atan2(-b, a).
        const double a = beta(static_cast<Eigen::Index>(1 + 2 * k));
        const double b = beta(static_cast<Eigen::Index>(2 + 2 * k));
        double phase = std::atan2(-b, a);
        if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
        model.components.push_back({periods_hours[k], std::hypot(a, b), phase});
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - model.value_at(series.time_at(i));
        ss += e * e;
    }
    model.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return model;
}

Series predict(const HarmonicModel& model, Timestamp from, Duration horizon, Duration step) {
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    if (step <= 0) throw std::invalid_argument("step must be positive");
    const auto n = static_cast<std::size_t>((horizon + step - 1) / step);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = model.value_at(from + static_cast<Timestamp>(i) * step);
        if (clamps_at_zero(model.channel)) v = std::max(0.0, v);
        values[i] = v;
    }
    return Series::dense(model.channel, from, step, values);
}

std::vector<OutageAlert> outage_risk(const Series& irradiance, const Series& wind, const Series& load,
                                     const BatteryState& battery, const MicrogridConfig& config,
                                     Duration horizon) {
    if (!irradiance.same_grid(wind) || !irradiance.same_grid(load)) {
        throw std::invalid_argument("forecasts do not share a grid");
    }
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    config.validate();

    const Timestamp stop = std::min(irradiance.end(), irradiance.start() + horizon);
    const Series irr = irradiance.slice(irradiance.start(), stop);
    const auto w = wind.slice(wind.start(), stop).dense_values();
    const auto l = load.slice(load.start(), stop).dense_values();
    const auto g = irr.dense_values();
    std::vector<double> generation(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        generation[i] = pv_power(std::max(0.0, g[i]), config) + wind_power(std::max(0.0, w[i]), config);
    }

    Trajectory base = run_forecast(generation, l, 0.0, battery, config, irr);
    if (base.alerts.empty()) return {};

    // Less load never lowers soc or terminal voltage, so "no alert" is monotone in
    // the shed and a bisection over hundredths of a kW finds the smallest one.
    const double peak = *std::max_element(l.begin(), l.end());
    long lo = 0;
    long hi = static_cast<long>(std::ceil(peak * 100.0));
    if (!run_forecast(generation, l, hi / 100.0, battery, config, irr).alerts.empty()) {
        lo = hi; // shedding everything is not enough; report the full load
    }
    while (lo < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (run_forecast(generation, l, mid / 100.0, battery, config, irr).alerts.empty()) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    for (auto& a : base.alerts) a.recommended_shed_kw = hi / 100.0;
    return base.alerts;
}

std::string alert_line(const OutageAlert& alert) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ALERT %s shed %.2f kW", format_timestamp(alert.predicted_outage_start).c_str(),
                  alert.recommended_shed_kw);
    return buf;
}

} // namespace mgi
