#include "gridfire/wildfire.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridfire/errors.hpp"

namespace gridfire {

double spread_rate(const TerrainConfig& terrain, double wind_speed) {
    if (!(terrain.bulk_fuel_density > 0.0))
        throw Error(ErrorCode::InvalidParameter, "bulk fuel density must be positive");
    if (terrain.effort < 0.0 || terrain.obstacle < 0.0 || terrain.slope < 0.0)
        throw Error(ErrorCode::InvalidParameter, "effort, obstacle and slope must be nonnegative");
    const double slope_factor = terrain.slope_dir == SlopeDirection::Uphill
                                    ? std::exp(std::abs(terrain.slope))
                                    : std::exp(-std::abs(terrain.slope));
    return 0.07 * (1.0 + wind_speed) / terrain.bulk_fuel_density * std::exp(-terrain.effort) *
           std::exp(-terrain.obstacle) * slope_factor;
}

double advance_front(double d_prev, double rate, double wind_angle, double dt_seconds) {
    const double d = d_prev - rate * dt_seconds * std::cos(wind_angle);
    return std::max(kMinFireDistance, d);
}

HeatFlux heat_flux_at_line(const FireFrontState& state) {
    const double num = state.flame_height * std::cos(state.flame_tilt);
    const double den = state.distance - state.flame_height * std::sin(state.flame_tilt);
    double angle;
    if (den <= 0.0) {
        angle = std::numbers::pi / 2.0;  // fire at or past the conductor
    } else {
        angle = std::clamp(std::atan(num / den), 0.0, std::numbers::pi / 2.0);
    }
    const double flux = 0.5 * state.flame_emissivity * kStefanBoltzmann * state.transmissivity *
                        std::pow(state.flame_temp, 4) * std::sin(angle);
    return {angle, std::max(0.0, flux)};
}

FireTrajectory simulate_front(const TerrainConfig& terrain, const FireFrontState& initial,
                              const std::vector<double>& wind_speed,
                              const std::vector<double>& wind_angle, double dt_seconds) {
    if (wind_speed.size() != wind_angle.size())
        throw Error(ErrorCode::DimensionMismatch, "wind speed and angle series differ in length");
    FireTrajectory traj;
    FireFrontState state = initial;
    for (size_t t = 0; t < wind_speed.size(); ++t) {
        const double rate = spread_rate(terrain, wind_speed[t]);
        state.distance = advance_front(state.distance, rate, wind_angle[t], dt_seconds);
        const HeatFlux hf = heat_flux_at_line(state);
        traj.distance.push_back(state.distance);
        traj.view_angle.push_back(hf.view_angle);
        traj.flux.push_back(hf.flux);
    }
    return traj;
}

}  // namespace gridfire
