#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridfire/network.hpp"

namespace gridfire {

/// How the resistive gain and radiative loss enter the heat balance.
///  - Exact:     q_l = R(T) * ell,       q_r quartic
///  - Separated: q_l = R(T) * ell_max,   q_r quartic (line rating solved outside the OPF)
///  - Baseline:  q_l = R(Tmax) * ell,    q_r tangent-linearized at Tmax (coupled OPF surrogate)
enum class DlrMode { Exact, Separated, Baseline };

DlrMode dlr_mode_from_string(const std::string& name);
const char* to_string(DlrMode mode);

struct AirProperties {
    double conductivity = 2.624e-2;  // W/(m K)
    double density = 1.184;          // kg/m^3
    double viscosity = 1.849e-5;     // kg/(m s)
};

struct ThermalWeather {
    double wind_speed = 0.0;   // m/s
    double wind_angle = 0.0;   // rad, relative to the conductor
    double ambient_k = 293.0;  // K
    double solar = 0.0;        // W/m^2
};

struct HeatRates {
    double fire = 0.0;        // q_f, W/m
    double solar = 0.0;       // q_s
    double joule = 0.0;       // q_l
    double radiative = 0.0;   // q_r
    double convective = 0.0;  // q_c

    double net() const { return fire + solar + joule - radiative - convective; }
};

double conductor_resistance(const ConductorParams& cond, double temp_k);
double wind_angle_factor(double psi);   // chi
double reynolds_number(const ConductorParams& cond, double wind_speed, const AirProperties& air = {});
double nusselt_factor(double reynolds); // f(Re)

HeatRates heat_rates(const ConductorParams& cond, const ThermalWeather& weather, double temp_k,
                     double fire_flux, double ell, DlrMode mode, const AirProperties& air = {});

struct ThermalTrace {
    double initial_k = 293.0;
    std::vector<double> temperature;  // K at the end of each hour
    std::vector<HeatRates> rates;     // evaluated at the start of each hour

    std::string to_csv() const;
};

/// Forward-Euler heat balance with sub-hourly stepping. `ell` is the squared
/// current per hour; pass the cap itself in Separated mode. The sub-step
/// halves itself whenever the local loss slope would make Euler unstable.
ThermalTrace integrate_temperature(const ConductorParams& cond,
                                   const std::vector<ThermalWeather>& weather,
                                   const std::vector<double>& fire_flux,
                                   const std::vector<double>& ell, double initial_k, DlrMode mode,
                                   double substep_seconds = 60.0, const AirProperties& air = {});

struct OutageSchedule {
    std::vector<int> in_service;  // u, one per hour
    std::optional<int> first_trip_hour;
};

/// Latched trip on strict exceedance of t_max anywhere in the trace so far.
OutageSchedule outage_schedule(const ThermalTrace& trace, double t_max);

/// Percentage of mean absolute difference between two schedule tensors.
double pmad(const std::vector<OutageSchedule>& a, const std::vector<OutageSchedule>& b);

/// Hour transition T_{t+1} = a[t] T_t + b[t] + c[t] q_l for the coupled OPF,
/// obtained by composing the baseline-linearized sub-steps within each hour.
/// q_l is held constant over the hour, matching an hourly dispatch variable.
struct HourlyAffineDynamics {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;
};

HourlyAffineDynamics hourly_affine_dynamics(const ConductorParams& cond,
                                            const std::vector<ThermalWeather>& weather,
                                            const std::vector<double>& fire_flux,
                                            double substep_seconds = 60.0,
                                            const AirProperties& air = {});

/// Temperature envelope under q_l in [0, q_max]; used for fixing outage
/// binaries that no admissible current schedule could alter.
struct TemperatureEnvelope {
    std::vector<double> t_min;
    std::vector<double> t_max;
};

TemperatureEnvelope propagate_envelope(const HourlyAffineDynamics& dyn, double initial_k, double q_max);

}  // namespace gridfire
