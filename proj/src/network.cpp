#include "gridfire/network.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "gridfire/errors.hpp"
#include "json.hpp"

namespace gridfire {

using nlohmann::json;

int NetworkModel::reference_bus() const {
    for (const auto& b : buses)
        if (b.is_reference) return b.id;
    throw Error(ErrorCode::MissingReference, "model has no reference bus");
}

const Bus& NetworkModel::bus(int id) const { return buses[static_cast<size_t>(bus_index(id))]; }

int NetworkModel::bus_index(int id) const {
    for (size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    throw Error(ErrorCode::UnknownBus, "bus " + std::to_string(id) + " not in model");
}

std::vector<int> NetworkModel::buses_with(bool Bus::* flag) const {
    std::vector<int> out;
    for (const auto& b : buses)
        if (b.*flag) out.push_back(b.id);
    return out;
}

const ConductorParams& NetworkModel::conductor_of(const Line& line) const {
    auto it = conductors.find(line.conductor);
    if (it == conductors.end())
        throw Error(ErrorCode::InvalidParameter, "line references unknown conductor '" + line.conductor + "'");
    return it->second;
}

namespace {

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number())
        throw Error(ErrorCode::ParseError, ctx + " is missing numeric field '" + key + "'");
    return j[key].get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    for (const auto& v : j[key]) out.push_back(v.get<double>());
    return out;
}

void check_nonnegative(double v, const std::string& what) {
    if (!(v >= 0.0))
        throw Error(ErrorCode::InvalidParameter, what + " must be nonnegative, got " + std::to_string(v));
}

void validate_model(const NetworkModel& m) {
    int refs = 0;
    for (const auto& b : m.buses) refs += b.is_reference ? 1 : 0;
    if (refs == 0) throw Error(ErrorCode::MissingReference, "feeder declares no reference bus");
    if (refs > 1) throw Error(ErrorCode::MultipleReference, "feeder declares more than one reference bus");

    for (size_t i = 0; i + 1 < m.buses.size(); ++i)
        if (m.buses[i].id == m.buses[i + 1].id)
            throw Error(ErrorCode::DuplicateBus, "bus " + std::to_string(m.buses[i].id) + " declared twice");

    for (const auto& b : m.buses) {
        if (b.has_load && b.ms_eligible)
            throw Error(ErrorCode::InvalidParameter,
                        "bus " + std::to_string(b.id) + ": load buses cannot host mobile storage");
        check_nonnegative(b.criticality, "criticality of bus " + std::to_string(b.id));
        if (b.has_load && (b.power_factor <= 0.0 || b.power_factor > 1.0))
            throw Error(ErrorCode::InvalidParameter,
                        "bus " + std::to_string(b.id) + ": power factor outside (0,1]");
    }

    for (const auto& l : m.lines) {
        std::string ctx = "line " + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
        if (l.r < 0.0 || l.x < 0.0) throw Error(ErrorCode::InvalidParameter, ctx + ": negative impedance");
        if (!(l.ell_max > 0.0)) throw Error(ErrorCode::InvalidParameter, ctx + ": squared-current cap must be positive");
        m.conductor_of(l);
    }

    const auto& d = m.devices;
    check_nonnegative(d.mt_p_max, "mt_p_max");
    if (!(d.mt_ramp_down <= 0.0 && 0.0 <= d.mt_ramp_up))
        throw Error(ErrorCode::InvalidParameter, "MT ramp limits must satisfy rd <= 0 <= ru");
    if (!(d.es_eta_charge > 0.0 && d.es_eta_charge <= 1.0 && d.es_eta_discharge > 0.0 && d.es_eta_discharge <= 1.0))
        throw Error(ErrorCode::InvalidParameter, "storage efficiencies must lie in (0,1]");
    if (!(d.es_soc_min <= d.es_soc_init && d.es_soc_init <= d.es_soc_max))
        throw Error(ErrorCode::InvalidParameter, "ES initial SoC outside [min,max]");
    if (!(d.ms_soc_min <= d.ms_soc_init && d.ms_soc_init <= d.ms_soc_max))
        throw Error(ErrorCode::InvalidParameter, "MS initial SoC outside [min,max]");
    check_nonnegative(d.qs_efficiency, "qs_efficiency");
    check_nonnegative(d.q_cap, "q_cap");
    check_nonnegative(d.grid_buy_max, "grid_buy_max");
    check_nonnegative(d.grid_sell_max, "grid_sell_max");

    auto count_flag = [&](bool Bus::* f) { return m.buses_with(f).size(); };
    if (d.qs_burn_max.size() != count_flag(&Bus::has_qs) || d.qs_burn_min.size() != count_flag(&Bus::has_qs))
        throw Error(ErrorCode::DimensionMismatch, "QS burn-limit lists must match the number of QS buses");
    if (d.es_charge_max.size() != count_flag(&Bus::has_es) || d.es_discharge_max.size() != count_flag(&Bus::has_es))
        throw Error(ErrorCode::DimensionMismatch, "ES power-limit lists must match the number of ES buses");
    if (d.pv_nameplate.size() != count_flag(&Bus::has_pv))
        throw Error(ErrorCode::DimensionMismatch, "PV nameplate list must match the number of PV buses");
    if (d.wt_nameplate.size() != count_flag(&Bus::has_wt))
        throw Error(ErrorCode::DimensionMismatch, "WT nameplate list must match the number of WT buses");
    for (size_t i = 0; i < d.qs_burn_max.size(); ++i)
        if (!(0.0 <= d.qs_burn_min[i] && d.qs_burn_min[i] <= d.qs_burn_max[i]))
            throw Error(ErrorCode::InvalidParameter, "QS burn limits must satisfy 0 <= min <= max");

    const auto& c = m.costs;
    for (double v : {c.gamma_mt, c.gamma_qs, c.gamma_fuel, c.gamma_ms, c.gamma_load, c.gamma_buy,
                     c.gamma_sell, c.ms_budget, c.fuel_cap})
        check_nonnegative(v, "cost parameter");
    if (c.ms_max_units < 0) throw Error(ErrorCode::InvalidParameter, "ms_max_units must be nonnegative");

    if (m.time.horizon <= 0 || m.time.dt_hours <= 0.0)
        throw Error(ErrorCode::InvalidParameter, "time config must have positive horizon and step");
    if (m.time.lead_hours >= m.time.horizon)
        throw Error(ErrorCode::InvalidParameter, "first-stage lead T' must be below the horizon T");

    validate_radial(m);
}

}  // namespace

NetworkModel parse_network(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }

    NetworkModel m;
    try {
        if (j.contains("base")) {
            m.base_mva = j["base"].value("mva", 1.0);
            m.base_kv = j["base"].value("kv", 12.66);
        }
        if (m.base_mva <= 0.0 || m.base_kv <= 0.0)
            throw Error(ErrorCode::InvalidParameter, "per-unit base must be positive");
        const double z_base = m.base_kv * m.base_kv / m.base_mva;

        if (j.contains("time")) {
            const auto& t = j["time"];
            m.time.horizon = t.value("horizon", 15);
            m.time.lead_hours = t.value("lead_hours", 4);
            m.time.dt_hours = t.value("dt_hours", 1.0);
            m.time.start_hour = t.value("start_hour", 7);
        }

        for (const auto& bj : j.at("buses")) {
            Bus b;
            b.id = bj.at("id").get<int>();
            b.is_reference = bj.value("reference", false);
            b.has_mt = bj.value("mt", false);
            b.has_qs = bj.value("qs", false);
            b.has_pv = bj.value("pv", false);
            b.has_wt = bj.value("wt", false);
            b.has_es = bj.value("es", false);
            if (bj.contains("load")) {
                const auto& lj = bj["load"];
                b.has_load = true;
                if (lj.contains("peak_pu"))
                    b.peak_load_mw = lj["peak_pu"].get<double>() * m.base_mva;
                else
                    b.peak_load_mw = require_number(lj, "peak_mw", "bus " + std::to_string(b.id));
                b.criticality = require_number(lj, "beta", "bus " + std::to_string(b.id));
                b.power_factor = lj.value("power_factor", 0.95);
            }
            b.ms_eligible = bj.value("ms_eligible", !b.has_load);
            m.buses.push_back(b);
        }
        std::sort(m.buses.begin(), m.buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });

        for (const auto& lj : j.at("lines")) {
            Line l;
            l.from_bus = lj.at("from").get<int>();
            l.to_bus = lj.at("to").get<int>();
            std::string ctx = "line " + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
            if (lj.contains("r_pu")) {
                l.r = lj["r_pu"].get<double>();
                l.x = lj["x_pu"].get<double>();
            } else {
                l.r = require_number(lj, "r_ohm", ctx) / z_base;
                l.x = require_number(lj, "x_ohm", ctx) / z_base;
            }
            l.ell_max = lj.value("ell_max_pu", 1.0);
            l.conductor = lj.value("conductor", "default");
            l.fire_exposed = lj.value("fire_exposed", false);
            m.lines.push_back(l);
        }

        if (j.contains("conductors")) {
            for (const auto& [name, cj] : j["conductors"].items()) {
                ConductorParams c;
                c.name = name;
                c.diameter = cj.value("diameter_m", c.diameter);
                c.solar_absorptivity = cj.value("solar_absorptivity", c.solar_absorptivity);
                c.emissivity = cj.value("emissivity", c.emissivity);
                c.resistivity_coeff = cj.value("resistivity_coeff", c.resistivity_coeff);
                c.r_ref = cj.value("r_ref", c.r_ref);
                c.t_ref = cj.value("t_ref_k", c.t_ref);
                c.heat_capacity = cj.value("heat_capacity", c.heat_capacity);
                c.t_max = cj.value("t_max_k", c.t_max);
                m.conductors[name] = c;
            }
        }
        if (m.conductors.empty()) m.conductors["default"] = ConductorParams{};

        const double to_pu = 1.0 / m.base_mva;
        if (j.contains("devices")) {
            const auto& dj = j["devices"];
            auto& d = m.devices;
            d.mt_p_max = dj.value("mt_p_max_mw", 0.0) * to_pu;
            d.mt_ramp_up = dj.value("mt_ramp_up_mw", 0.0) * to_pu;
            d.mt_ramp_down = dj.value("mt_ramp_down_mw", 0.0) * to_pu;
            d.qs_burn_max = number_list(dj, "qs_burn_max");
            d.qs_burn_min = number_list(dj, "qs_burn_min");
            d.qs_efficiency = dj.value("qs_efficiency_mw_per_unit", 0.6) * to_pu;
            for (double& v : d.qs_burn_max) check_nonnegative(v, "qs_burn_max");
            d.es_charge_max = number_list(dj, "es_charge_max_mw");
            d.es_discharge_max = number_list(dj, "es_discharge_max_mw");
            for (double& v : d.es_charge_max) v *= to_pu;
            for (double& v : d.es_discharge_max) v *= to_pu;
            d.es_eta_charge = dj.value("es_eta_charge", 0.9);
            d.es_eta_discharge = dj.value("es_eta_discharge", 0.9);
            d.es_soc_min = dj.value("es_soc_min_mwh", 0.0) * to_pu;
            d.es_soc_max = dj.value("es_soc_max_mwh", 0.0) * to_pu;
            d.es_soc_init = dj.value("es_soc_init_mwh", 0.0) * to_pu;
            d.ms_charge_max = dj.value("ms_charge_max_mw", 0.0) * to_pu;
            d.ms_discharge_max = dj.value("ms_discharge_max_mw", 0.0) * to_pu;
            d.ms_soc_min = dj.value("ms_soc_min_mwh", 0.0) * to_pu;
            d.ms_soc_max = dj.value("ms_soc_max_mwh", 0.0) * to_pu;
            d.ms_soc_init = dj.value("ms_soc_init_mwh", d.ms_soc_max * m.base_mva) * to_pu;
            d.q_cap = dj.value("q_cap_mvar", 0.0) * to_pu;
            d.grid_buy_max = dj.value("grid_buy_max_mw", 0.0) * to_pu;
            d.grid_sell_max = dj.value("grid_sell_max_mw", 0.0) * to_pu;
            d.pv_nameplate = number_list(dj, "pv_nameplate_mw");
            d.wt_nameplate = number_list(dj, "wt_nameplate_mw");
            for (double& v : d.pv_nameplate) v *= to_pu;
            for (double& v : d.wt_nameplate) v *= to_pu;
        }

        if (j.contains("costs")) {
            const auto& cj = j["costs"];
            auto& c = m.costs;
            c.gamma_mt = cj.value("gamma_mt", 0.0);
            c.gamma_qs = cj.value("gamma_qs", 0.0);
            c.gamma_fuel = cj.value("gamma_fuel", 0.0);
            c.gamma_ms = cj.value("gamma_ms", 0.0);
            c.gamma_load = cj.value("gamma_load", 0.0);
            c.gamma_buy = cj.value("gamma_buy", 0.0);
            c.gamma_sell = cj.value("gamma_sell", 0.0);
            c.ms_budget = cj.value("ms_budget", 0.0);
            c.ms_max_units = cj.value("ms_max_units", 0);
            c.fuel_cap = cj.value("fuel_cap", 0.0);
        }
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }

    // loads are stored in p.u. like every other electrical quantity
    for (auto& b : m.buses) b.peak_load_mw /= m.base_mva;

    validate_model(m);
    return m;
}

NetworkModel load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open feeder file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

std::string serialize_network(const NetworkModel& m) {
    json j;
    j["base"] = {{"mva", m.base_mva}, {"kv", m.base_kv}};
    j["time"] = {{"horizon", m.time.horizon},
                 {"lead_hours", m.time.lead_hours},
                 {"dt_hours", m.time.dt_hours},
                 {"start_hour", m.time.start_hour}};
    j["buses"] = json::array();
    for (const auto& b : m.buses) {
        json bj;
        bj["id"] = b.id;
        if (b.is_reference) bj["reference"] = true;
        if (b.has_mt) bj["mt"] = true;
        if (b.has_qs) bj["qs"] = true;
        if (b.has_pv) bj["pv"] = true;
        if (b.has_wt) bj["wt"] = true;
        if (b.has_es) bj["es"] = true;
        bj["ms_eligible"] = b.ms_eligible;
        if (b.has_load)
            bj["load"] = {{"peak_pu", b.peak_load_mw}, {"beta", b.criticality}, {"power_factor", b.power_factor}};
        j["buses"].push_back(bj);
    }
    j["lines"] = json::array();
    for (const auto& l : m.lines) {
        json lj;
        lj["from"] = l.from_bus;
        lj["to"] = l.to_bus;
        lj["r_pu"] = l.r;
        lj["x_pu"] = l.x;
        lj["ell_max_pu"] = l.ell_max;
        lj["conductor"] = l.conductor;
        if (l.fire_exposed) lj["fire_exposed"] = true;
        j["lines"].push_back(lj);
    }
    j["conductors"] = json::object();
    for (const auto& [name, c] : m.conductors) {
        j["conductors"][name] = {{"diameter_m", c.diameter},
                                 {"solar_absorptivity", c.solar_absorptivity},
                                 {"emissivity", c.emissivity},
                                 {"resistivity_coeff", c.resistivity_coeff},
                                 {"r_ref", c.r_ref},
                                 {"t_ref_k", c.t_ref},
                                 {"heat_capacity", c.heat_capacity},
                                 {"t_max_k", c.t_max}};
    }
    const auto& d = m.devices;
    const double mva = m.base_mva;
    auto scaled = [&](const std::vector<double>& v) {
        std::vector<double> out(v);
        for (double& x : out) x *= mva;
        return out;
    };
    j["devices"] = {{"mt_p_max_mw", d.mt_p_max * mva},
                    {"mt_ramp_up_mw", d.mt_ramp_up * mva},
                    {"mt_ramp_down_mw", d.mt_ramp_down * mva},
                    {"qs_burn_max", d.qs_burn_max},
                    {"qs_burn_min", d.qs_burn_min},
                    {"qs_efficiency_mw_per_unit", d.qs_efficiency * mva},
                    {"es_charge_max_mw", scaled(d.es_charge_max)},
                    {"es_discharge_max_mw", scaled(d.es_discharge_max)},
                    {"es_eta_charge", d.es_eta_charge},
                    {"es_eta_discharge", d.es_eta_discharge},
                    {"es_soc_min_mwh", d.es_soc_min * mva},
                    {"es_soc_max_mwh", d.es_soc_max * mva},
                    {"es_soc_init_mwh", d.es_soc_init * mva},
                    {"ms_charge_max_mw", d.ms_charge_max * mva},
                    {"ms_discharge_max_mw", d.ms_discharge_max * mva},
                    {"ms_soc_min_mwh", d.ms_soc_min * mva},
                    {"ms_soc_max_mwh", d.ms_soc_max * mva},
                    {"ms_soc_init_mwh", d.ms_soc_init * mva},
                    {"q_cap_mvar", d.q_cap * mva},
                    {"grid_buy_max_mw", d.grid_buy_max * mva},
                    {"grid_sell_max_mw", d.grid_sell_max * mva},
                    {"pv_nameplate_mw", scaled(d.pv_nameplate)},
                    {"wt_nameplate_mw", scaled(d.wt_nameplate)}};
    const auto& c = m.costs;
    j["costs"] = {{"gamma_mt", c.gamma_mt},       {"gamma_qs", c.gamma_qs},
                  {"gamma_fuel", c.gamma_fuel},   {"gamma_ms", c.gamma_ms},
                  {"gamma_load", c.gamma_load},   {"gamma_buy", c.gamma_buy},
                  {"gamma_sell", c.gamma_sell},   {"ms_budget", c.ms_budget},
                  {"ms_max_units", c.ms_max_units}, {"fuel_cap", c.fuel_cap}};
    return j.dump(2);
}

TopologyReport validate_radial(const NetworkModel& m) {
    const size_t n = m.buses.size();
    TopologyReport rep;
    rep.bus_ids.resize(n);
    rep.parent.assign(n, -1);
    rep.parent_line.assign(n, -1);
    rep.depth.assign(n, -1);
    rep.children.assign(n, {});
    for (size_t i = 0; i < n; ++i) rep.bus_ids[i] = m.buses[i].id;

    const int ref = m.reference_bus();
    std::vector<int> in_degree(n, 0);
    std::vector<std::vector<std::pair<int, int>>> out_edges(n);  // (child index, line index)
    for (size_t li = 0; li < m.lines.size(); ++li) {
        const auto& l = m.lines[li];
        int fi = m.bus_index(l.from_bus);
        int ti = m.bus_index(l.to_bus);
        in_degree[static_cast<size_t>(ti)]++;
        out_edges[static_cast<size_t>(fi)].push_back({ti, static_cast<int>(li)});
    }

    const int ref_idx = m.bus_index(ref);
    if (in_degree[static_cast<size_t>(ref_idx)] > 0)
        throw Error(ErrorCode::CycleDetected, "a line is oriented into the reference bus; the feeder must be a tree fed from it");
    for (size_t i = 0; i < n; ++i)
        if (in_degree[i] > 1)
            throw Error(ErrorCode::MultipleParents,
                        "bus " + std::to_string(m.buses[i].id) + " has " + std::to_string(in_degree[i]) + " incoming lines");

    std::deque<int> queue{ref_idx};
    rep.depth[static_cast<size_t>(ref_idx)] = 0;
    size_t visited = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        ++visited;
        for (auto [v, li] : out_edges[static_cast<size_t>(u)]) {
            rep.parent[static_cast<size_t>(v)] = m.buses[static_cast<size_t>(u)].id;
            rep.parent_line[static_cast<size_t>(v)] = li;
            rep.depth[static_cast<size_t>(v)] = rep.depth[static_cast<size_t>(u)] + 1;
            rep.children[static_cast<size_t>(u)].push_back(m.buses[static_cast<size_t>(v)].id);
            queue.push_back(v);
        }
    }
    if (visited != n) {
        for (size_t i = 0; i < n; ++i) {
            if (rep.depth[i] >= 0) continue;
            if (in_degree[i] > 0)
                throw Error(ErrorCode::CycleDetected,
                            "bus " + std::to_string(m.buses[i].id) + " is fed only through a loop");
            throw Error(ErrorCode::DisconnectedBus,
                        "bus " + std::to_string(m.buses[i].id) + " is not reachable from the reference");
        }
    }
    return rep;
}

std::string TopologyReport::to_csv() const {
    std::ostringstream out;
    out << "bus,parent,depth,children\n";
    for (size_t i = 0; i < bus_ids.size(); ++i) {
        out << bus_ids[i] << "," << parent[i] << "," << depth[i] << ",";
        for (size_t k = 0; k < children[i].size(); ++k) {
            if (k) out << " ";
            out << children[i][k];
        }
        out << "\n";
    }
    return out.str();
}

std::vector<int> downstream_buses(const NetworkModel& m, int line_index) {
    auto rep = validate_radial(m);
    const auto& line = m.lines[static_cast<size_t>(line_index)];
    std::vector<int> out;
    std::deque<int> queue{line.to_bus};
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        out.push_back(id);
        for (int child : rep.children[static_cast<size_t>(m.bus_index(id))]) queue.push_back(child);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gridfire
