#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridfire {

/// Conductor data for the IEEE-738 style heat balance. Temperatures in K,
/// lengths in m, heat capacity per unit length in J/(m K).
struct ConductorParams {
    std::string name;
    double diameter = 0.021;       // m
    double solar_absorptivity = 18.0;
    double emissivity = 0.78;
    double resistivity_coeff = 4.04e-3;  // 1/K
    double r_ref = 15.0;           // resistive heating scale at t_ref, W/m per p.u. of squared current
    double t_ref = 293.0;          // K
    double heat_capacity = 1000.0; // mC_p, J/(m K)
    double t_max = 350.0;          // K, trip threshold
};

struct Bus {
    int id = 0;
    bool is_reference = false;
    bool has_load = false;
    bool has_mt = false;
    bool has_qs = false;
    bool has_pv = false;
    bool has_wt = false;
    bool has_es = false;
    bool ms_eligible = false;
    double criticality = 0.0;     // beta, load buses only
    double power_factor = 1.0;    // cos(phi) of the load
    double peak_load_mw = 0.0;    // scaled by the hourly profile and scenario noise
};

struct Line {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;        // p.u.
    double x = 0.0;        // p.u.
    double ell_max = 1.0;  // p.u. cap on squared current magnitude
    std::string conductor;
    bool fire_exposed = false;
};

/// Per-device-class limits; vectors are ordered by ascending bus id of the
/// hosting buses.
struct DeviceParams {
    // Microturbines
    double mt_p_max = 0.0;
    double mt_ramp_up = 0.0;
    double mt_ramp_down = 0.0;  // <= 0
    // Quick start units, one entry per QS bus
    std::vector<double> qs_burn_max;  // fuel units per hour
    std::vector<double> qs_burn_min;
    double qs_efficiency = 0.6;  // MW per fuel unit
    // Stationary storage, one entry per ES bus
    std::vector<double> es_charge_max;
    std::vector<double> es_discharge_max;
    double es_eta_charge = 0.9;
    double es_eta_discharge = 0.9;
    double es_soc_min = 0.0;
    double es_soc_max = 0.0;
    double es_soc_init = 0.0;
    // Mobile storage; identical units, fully charged when sited
    double ms_charge_max = 0.0;
    double ms_discharge_max = 0.0;
    double ms_soc_min = 0.0;
    double ms_soc_max = 0.0;
    double ms_soc_init = 0.0;
    // Reactive capability of non-load buses
    double q_cap = 0.0;
    // Grid exchange at the reference bus
    double grid_buy_max = 0.0;
    double grid_sell_max = 0.0;
    // Renewable nameplates, per PV / WT bus
    std::vector<double> pv_nameplate;
    std::vector<double> wt_nameplate;
};

struct CostParams {
    double gamma_mt = 0.0;
    double gamma_qs = 0.0;
    double gamma_fuel = 0.0;       // per fuel unit
    double gamma_ms = 0.0;         // per sited unit
    double gamma_load = 0.0;       // serving incentive, per MW
    double gamma_buy = 0.0;
    double gamma_sell = 0.0;
    double ms_budget = 0.0;
    int ms_max_units = 0;
    double fuel_cap = 0.0;         // Xbar
};

struct TimeConfig {
    int horizon = 15;          // T, hours
    int lead_hours = 4;        // T', first-stage lead
    double dt_hours = 1.0;
    int start_hour = 7;        // hour of day of step 0
};

/// Immutable after load_network(); shared read-only across scenario work.
struct NetworkModel {
    double base_mva = 1.0;
    double base_kv = 12.66;
    std::vector<Bus> buses;    // ascending id
    std::vector<Line> lines;
    std::map<std::string, ConductorParams> conductors;
    DeviceParams devices;
    CostParams costs;
    TimeConfig time;

    int reference_bus() const;
    const Bus& bus(int id) const;
    int bus_index(int id) const;
    std::vector<int> buses_with(bool Bus::* flag) const;
    const ConductorParams& conductor_of(const Line& line) const;
};

/// Parent/child decomposition of the radial feeder, oriented away from the
/// reference bus.
struct TopologyReport {
    std::vector<int> bus_ids;
    std::vector<int> parent;              // bus id, -1 for the reference
    std::vector<int> parent_line;         // index into model.lines, -1 for ref
    std::vector<int> depth;
    std::vector<std::vector<int>> children;  // bus ids

    std::string to_csv() const;
};

NetworkModel load_network(const std::string& path);
NetworkModel parse_network(const std::string& json_text);
std::string serialize_network(const NetworkModel& model);

TopologyReport validate_radial(const NetworkModel& model);

/// Bus ids in the subtree rooted at the receiving end of `line_index`
/// (the de-energized island if that line opens).
std::vector<int> downstream_buses(const NetworkModel& model, int line_index);

}  // namespace gridfire
