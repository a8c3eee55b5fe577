#pragma once

#include <vector>

namespace gridfire {

enum class SlopeDirection { Uphill, Downhill };

struct TerrainConfig {
    double bulk_fuel_density = 40.0;  // kg/m^3
    double effort = 0.0;              // firefighting effort level
    double obstacle = 0.0;            // natural obstacle factor
    SlopeDirection slope_dir = SlopeDirection::Uphill;
    double slope = 0.0;               // magnitude, dimensionless
};

struct FireFrontState {
    double distance = 1000.0;      // m, fire to conductor
    double flame_height = 15.0;    // m
    double flame_tilt = 0.0;       // rad
    double flame_temp = 1400.0;    // K
    double flame_emissivity = 1.0;
    double transmissivity = 1.0;
};

/// Lower clamp on the fire distance; keeps the view-angle geometry defined.
inline constexpr double kMinFireDistance = 1.0;  // m
inline constexpr double kStefanBoltzmann = 5.67e-8;

/// Front speed in m/s. Suppression effort and obstacles damp it
/// exponentially; slope speeds it up uphill and slows it downhill.
double spread_rate(const TerrainConfig& terrain, double wind_speed);

/// One step of the fire-to-line distance. Wind blowing along the line
/// normal (angle 0) closes the gap; angles past pi/2 push the front away.
double advance_front(double d_prev, double rate, double wind_angle, double dt_seconds);

struct HeatFlux {
    double view_angle = 0.0;  // rad
    double flux = 0.0;        // W/m^2
};

HeatFlux heat_flux_at_line(const FireFrontState& state);

struct FireTrajectory {
    std::vector<double> distance;    // m, per hour
    std::vector<double> view_angle;  // rad
    std::vector<double> flux;        // W/m^2
};

/// Hourly front simulation against per-hour wind speed/angle series.
FireTrajectory simulate_front(const TerrainConfig& terrain, const FireFrontState& initial,
                              const std::vector<double>& wind_speed,
                              const std::vector<double>& wind_angle, double dt_seconds = 3600.0);

}  // namespace gridfire
