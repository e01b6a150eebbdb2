#pragma once

#include "mgi/simgrid.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace mgi {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationConfig {
    MicrogridConfig grid;
    WeatherParams weather;
    DemandParams demand;
};

/// Key-value configuration in TOML shape:
///
///     [pv]        pv_kwp, pv_derate
///     [wind]      n_turbines, turbine_rated_kw, cut_in, rated_speed, cut_out
///     [battery]   battery_kwh, usable_depth, eta_charge, eta_discharge, ocv_full_v,
///                 ocv_floor_v, r_term_v_per_kw, bus_nominal_v, cutoff_v, rearm_v
///     [inverter]  inverter_limit_kw
///     [weather]   WeatherParams fields
///     [demand]    DemandParams fields
///
/// Missing keys keep their defaults. Unknown sections or keys, malformed values and
/// values violating the model constraints raise ConfigError.
SimulationConfig parse_sim_config(std::istream& in);
SimulationConfig load_sim_config(const std::filesystem::path& path);

} // namespace mgi
