#include "gridfire/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridfire/errors.hpp"

namespace gridfire {

namespace {
constexpr double kRadiationConstant = 1.78e-7;  // W/(m K^4) per unit diameter and emissivity

double radiation_coeff(const ConductorParams& cond) {
    return kRadiationConstant * cond.diameter * cond.emissivity;
}

// Tangent of the quartic radiative loss at t_max: q_r ~ lambda*T + beta(ambient)
double radiative_slope(const ConductorParams& cond) {
    return 4.0 * radiation_coeff(cond) * std::pow(cond.t_max, 3);
}

double radiative_offset(const ConductorParams& cond, double ambient_k) {
    const double c = radiation_coeff(cond);
    return c * (std::pow(cond.t_max, 4) - std::pow(ambient_k, 4)) - radiative_slope(cond) * cond.t_max;
}
}  // namespace

DlrMode dlr_mode_from_string(const std::string& name) {
    if (name == "exact") return DlrMode::Exact;
    if (name == "separated") return DlrMode::Separated;
    if (name == "baseline") return DlrMode::Baseline;
    throw Error(ErrorCode::InvalidMode, "unknown DLR mode '" + name + "'");
}

const char* to_string(DlrMode mode) {
    switch (mode) {
        case DlrMode::Exact: return "exact";
        case DlrMode::Separated: return "separated";
        case DlrMode::Baseline: return "baseline";
    }
    return "?";
}

double conductor_resistance(const ConductorParams& cond, double temp_k) {
    return cond.r_ref * (1.0 + cond.resistivity_coeff * (temp_k - cond.t_ref));
}

double wind_angle_factor(double psi) {
    return 1.194 + 0.194 * std::cos(2.0 * psi) + 0.368 * std::sin(2.0 * psi) - std::cos(psi);
}

double reynolds_number(const ConductorParams& cond, double wind_speed, const AirProperties& air) {
    return cond.diameter * air.density * wind_speed / air.viscosity;
}

double nusselt_factor(double reynolds) {
    if (reynolds <= 0.0) return 1.01;
    return std::max(1.01 + 1.35 * std::pow(reynolds, 0.52), 0.754 * std::pow(reynolds, 0.6));
}

HeatRates heat_rates(const ConductorParams& cond, const ThermalWeather& weather, double temp_k,
                     double fire_flux, double ell, DlrMode mode, const AirProperties& air) {
    if (!(temp_k > 0.0)) throw Error(ErrorCode::InvalidParameter, "conductor temperature must be positive");
    HeatRates q;
    q.fire = cond.diameter * fire_flux;
    q.solar = cond.diameter * cond.solar_absorptivity * weather.solar;

    switch (mode) {
        case DlrMode::Exact:
            q.joule = conductor_resistance(cond, temp_k) * ell;
            break;
        case DlrMode::Separated:
            // current pinned at the cap so the rating decouples from dispatch
            q.joule = conductor_resistance(cond, temp_k) * ell;
            break;
        case DlrMode::Baseline:
            q.joule = conductor_resistance(cond, cond.t_max) * ell;
            break;
    }

    if (mode == DlrMode::Baseline) {
        q.radiative = radiative_slope(cond) * temp_k + radiative_offset(cond, weather.ambient_k);
    } else {
        q.radiative = radiation_coeff(cond) * (std::pow(temp_k, 4) - std::pow(weather.ambient_k, 4));
    }

    const double re = reynolds_number(cond, weather.wind_speed, air);
    q.convective = air.conductivity * wind_angle_factor(weather.wind_angle) *
                   (temp_k - weather.ambient_k) * nusselt_factor(re);
    return q;
}

ThermalTrace integrate_temperature(const ConductorParams& cond,
                                   const std::vector<ThermalWeather>& weather,
                                   const std::vector<double>& fire_flux,
                                   const std::vector<double>& ell, double initial_k, DlrMode mode,
                                   double substep_seconds, const AirProperties& air) {
    const size_t horizon = weather.size();
    if (fire_flux.size() != horizon || ell.size() != horizon)
        throw Error(ErrorCode::DimensionMismatch, "weather, flux and current series must align");
    if (!(substep_seconds > 0.0)) throw Error(ErrorCode::InvalidParameter, "substep must be positive");

    ThermalTrace trace;
    trace.initial_k = initial_k;
    double temp = initial_k;
    for (size_t t = 0; t < horizon; ++t) {
        trace.rates.push_back(heat_rates(cond, weather[t], temp, fire_flux[t], ell[t], mode, air));
        double remaining = 3600.0;
        while (remaining > 1e-9) {
            const HeatRates q = heat_rates(cond, weather[t], temp, fire_flux[t], ell[t], mode, air);
            // local damping estimate keeps explicit Euler inside its
            // stability region even for extreme wind draws
            const double re = reynolds_number(cond, weather[t].wind_speed, air);
            double slope = air.conductivity * wind_angle_factor(weather[t].wind_angle) * nusselt_factor(re);
            slope += (mode == DlrMode::Baseline) ? radiative_slope(cond)
                                                 : 4.0 * radiation_coeff(cond) * std::pow(temp, 3);
            double dt = std::min(substep_seconds, remaining);
            if (slope > 0.0) dt = std::min(dt, cond.heat_capacity / slope);
            temp += dt / cond.heat_capacity * q.net();
            if (!std::isfinite(temp))
                throw Error(ErrorCode::IntegrationFailure,
                            "temperature diverged at hour " + std::to_string(t));
            remaining -= dt;
        }
        trace.temperature.push_back(temp);
    }
    return trace;
}

std::string ThermalTrace::to_csv() const {
    std::ostringstream out;
    out << "hour,temperature_k,q_fire,q_solar,q_joule,q_radiative,q_convective\n";
    for (size_t t = 0; t < temperature.size(); ++t) {
        const auto& q = rates[t];
        out << t << "," << temperature[t] << "," << q.fire << "," << q.solar << "," << q.joule << ","
            << q.radiative << "," << q.convective << "\n";
    }
    return out.str();
}

OutageSchedule outage_schedule(const ThermalTrace& trace, double t_max) {
    OutageSchedule sched;
    sched.in_service.assign(trace.temperature.size(), 1);
    bool tripped = false;
    for (size_t t = 0; t < trace.temperature.size(); ++t) {
        if (!tripped && trace.temperature[t] > t_max) {  // strict exceedance
            tripped = true;
            sched.first_trip_hour = static_cast<int>(t);
        }
        if (tripped) sched.in_service[t] = 0;
    }
    return sched;
}

double pmad(const std::vector<OutageSchedule>& a, const std::vector<OutageSchedule>& b) {
    if (a.size() != b.size() || a.empty())
        throw Error(ErrorCode::DimensionMismatch, "schedule sets must be nonempty and equally sized");
    size_t cells = 0;
    double total = 0.0;
    for (size_t s = 0; s < a.size(); ++s) {
        if (a[s].in_service.size() != b[s].in_service.size())
            throw Error(ErrorCode::DimensionMismatch, "schedule horizons differ at scenario " + std::to_string(s));
        for (size_t t = 0; t < a[s].in_service.size(); ++t) {
            total += std::abs(a[s].in_service[t] - b[s].in_service[t]);
            ++cells;
        }
    }
    return total / static_cast<double>(cells) * 100.0;
}

HourlyAffineDynamics hourly_affine_dynamics(const ConductorParams& cond,
                                            const std::vector<ThermalWeather>& weather,
                                            const std::vector<double>& fire_flux,
                                            double substep_seconds, const AirProperties& air) {
    if (weather.size() != fire_flux.size())
        throw Error(ErrorCode::DimensionMismatch, "weather and flux series must align");
    HourlyAffineDynamics dyn;
    const double lam_r = radiative_slope(cond);
    for (size_t t = 0; t < weather.size(); ++t) {
        const double conv =
            air.conductivity * wind_angle_factor(weather[t].wind_angle) *
            nusselt_factor(reynolds_number(cond, weather[t].wind_speed, air));
        const double loss_slope = lam_r + conv;
        double dt = substep_seconds;
        if (loss_slope > 0.0) dt = std::min(dt, cond.heat_capacity / loss_slope);
        const int steps = std::max(1, static_cast<int>(std::ceil(3600.0 / dt)));
        dt = 3600.0 / steps;

        const double q_fire = cond.diameter * fire_flux[t];
        const double q_solar = cond.diameter * cond.solar_absorptivity * weather[t].solar;
        const double drive = q_fire + q_solar - radiative_offset(cond, weather[t].ambient_k) +
                             conv * weather[t].ambient_k;
        const double a_sub = 1.0 - dt / cond.heat_capacity * loss_slope;
        const double a_hour = std::pow(a_sub, steps);
        const double series = std::abs(1.0 - a_sub) < 1e-14
                                  ? static_cast<double>(steps)
                                  : (1.0 - a_hour) / (1.0 - a_sub);
        dyn.a.push_back(a_hour);
        dyn.b.push_back(series * dt / cond.heat_capacity * drive);
        dyn.c.push_back(series * dt / cond.heat_capacity);
    }
    return dyn;
}

TemperatureEnvelope propagate_envelope(const HourlyAffineDynamics& dyn, double initial_k, double q_max) {
    TemperatureEnvelope env;
    double lo = initial_k, hi = initial_k;
    for (size_t t = 0; t < dyn.a.size(); ++t) {
        // a >= 0 by construction, so the map is monotone in T
        lo = dyn.a[t] * lo + dyn.b[t];
        hi = dyn.a[t] * hi + dyn.b[t] + dyn.c[t] * q_max;
        env.t_min.push_back(lo);
        env.t_max.push_back(hi);
    }
    return env;
}

}  // namespace gridfire
