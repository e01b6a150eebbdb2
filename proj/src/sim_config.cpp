#include "mgi/sim_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>

namespace mgi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Setter = std::function<void(double)>;

std::map<std::string, Setter> setters(SimulationConfig& c) {
    auto& g = c.grid;
    auto& w = c.weather;
    auto& d = c.demand;
    auto real = [](double& field) { return Setter([&field](double v) { field = v; }); };
    return {
        {"pv.pv_kwp", real(g.pv_kwp)},
        {"pv.pv_derate", real(g.pv_derate)},
        {"wind.n_turbines", Setter([&g](double v) {
             if (v != static_cast<int>(v)) throw ConfigError("n_turbines must be an integer");
             g.n_turbines = static_cast<int>(v);
         })},
        {"wind.turbine_rated_kw", real(g.turbine_rated_kw)},
        {"wind.cut_in", real(g.cut_in)},
        {"wind.rated_speed", real(g.rated_speed)},
        {"wind.cut_out", real(g.cut_out)},
        {"battery.battery_kwh", real(g.battery_kwh)},
        {"battery.usable_depth", real(g.usable_depth)},
        {"battery.eta_charge", real(g.eta_charge)},
        {"battery.eta_discharge", real(g.eta_discharge)},
        {"battery.ocv_full_v", real(g.ocv_full_v)},
        {"battery.ocv_floor_v", real(g.ocv_floor_v)},
        {"battery.r_term_v_per_kw", real(g.r_term_v_per_kw)},
        {"battery.bus_nominal_v", real(g.bus_nominal_v)},
        {"battery.cutoff_v", real(g.cutoff_v)},
        {"battery.rearm_v", real(g.rearm_v)},
        {"inverter.inverter_limit_kw", real(g.inverter_limit_kw)},
        {"weather.clear_sky_max", real(w.clear_sky_max)},
        {"weather.sunrise_hour", real(w.sunrise_hour)},
        {"weather.sunset_hour", real(w.sunset_hour)},
        {"weather.low_day_probability", real(w.low_day_probability)},
        {"weather.low_min", real(w.low_min)},
        {"weather.low_max", real(w.low_max)},
        {"weather.normal_min", real(w.normal_min)},
        {"weather.normal_max", real(w.normal_max)},
        {"weather.fixed_cloudiness", Setter([&w](double v) { w.fixed_cloudiness = v; })},
        {"weather.low_day_flicker", real(w.low_day_flicker)},
        {"weather.wind_mean", real(w.wind_mean)},
        {"weather.wind_daily_amplitude", real(w.wind_daily_amplitude)},
        {"weather.wind_semidiurnal_amplitude", real(w.wind_semidiurnal_amplitude)},
        {"weather.wind_peak_hour", real(w.wind_peak_hour)},
        {"weather.wind_cloud_coupling", real(w.wind_cloud_coupling)},
        {"weather.wind_noise_sd", real(w.wind_noise_sd)},
        {"weather.wind_noise_ar", real(w.wind_noise_ar)},
        {"demand.mean_kw", real(d.mean_kw)},
        {"demand.scale", real(d.scale)},
        {"demand.growth_per_year", real(d.growth_per_year)},
        {"demand.evening_amplitude", real(d.evening_amplitude)},
        {"demand.evening_peak_hour", real(d.evening_peak_hour)},
        {"demand.semidiurnal_amplitude", real(d.semidiurnal_amplitude)},
        {"demand.semidiurnal_peak_hour", real(d.semidiurnal_peak_hour)},
        {"demand.day_factor_spread", real(d.day_factor_spread)},
        {"demand.noise_sd", real(d.noise_sd)},
    };
}

} // namespace

SimulationConfig parse_sim_config(std::istream& in) {
    SimulationConfig config;
    const auto table = setters(config);
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"pv", "wind", "battery", "inverter", "weather", "demand"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                throw ConfigError(where + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        if (section.empty()) throw ConfigError(where + "key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        auto it = table.find(section + "." + key);
        if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw ConfigError(where + "value of '" + key + "' is not a number");
        }
        it->second(v);
    }
    if (in.bad()) throw ConfigError("failed to read configuration");

    try {
        config.grid.validate();
        config.weather.validate();
        config.demand.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

SimulationConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration " + path.string());
    return parse_sim_config(in);
}

} // namespace mgi
