#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridfire/network.hpp"
#include "gridfire/smoke.hpp"

namespace gridfire {

/// Deterministic random stream. All samplers draw through this wrapper so a
/// (seed, scenario) pair fully determines every draw on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    /// Stream for scenario s derived from a master seed.
    static Rng for_scenario(std::uint64_t seed, int scenario);

    double uniform01();                   // [0, 1)
    double uniform(double lo, double hi);
    double normal();                      // standard normal
    double weibull(double shape, double scale);
    double von_mises(double mean, double kappa);  // wrapped to [0, 2pi)
    double gamma(double shape);
    double beta(double a, double b);
    double lognormal(double log_mean, double log_sigma);

  private:
    std::uint64_t state_;
    std::uint64_t next_u64();
};

struct WeibullParams {
    double shape = 2.0;
    double scale = 5.0;
};
struct VonMisesParams {
    double mean = 0.0;
    double kappa = 2.0;
};
struct BetaParams {
    double a = 2.0;
    double b = 2.0;
};
struct LognormalParams {
    double log_mean = 0.0;
    double log_sigma = 0.5;
};
struct UniformParams {
    double lo = 0.0;
    double hi = 1.0;
};

/// Hour-of-day indexed weather model plus the per-scenario nuisance factors
/// that only enter the PV regression.
struct HourlyDistributions {
    std::array<WeibullParams, 24> wind_speed{};
    std::array<VonMisesParams, 24> wind_direction{};
    std::array<BetaParams, 24> solar{};
    double ghi_max = 1000.0;           // W/m^2 scale of the Beta draw
    LognormalParams pm25{3.0, 0.4};    // ug/m^3
    LognormalParams pm10{3.5, 0.4};
    UniformParams cloud_opacity{0.0, 0.6};
    UniformParams humidity{15.0, 60.0};  // percent
    std::array<double, 24> ambient_mean_k{};
    double ambient_spread_k = 2.0;
    double load_sigma = 0.1;           // lognormal multiplicative spread, mean 1
    std::array<double, 24> load_shape{};  // base profile multiplier

    void validate() const;
};

HourlyDistributions default_distributions();
/// Load the "hour,multiplier" base profile CSV into load_shape.
void load_profile_csv(HourlyDistributions& dists, const std::string& path);

struct WeatherDraw {
    double wind_speed = 0.0;   // m/s
    double wind_dir = 0.0;     // rad, absolute
    double solar = 0.0;        // W/m^2
    double pm25 = 1.0;
    double pm10 = 1.0;
    double cloud = 0.0;
    double humidity = 0.0;
    double ambient_k = 293.0;
    double load_mult = 1.0;
};

std::vector<std::vector<WeatherDraw>> sample_weather(const HourlyDistributions& dists, int n,
                                                     std::uint64_t seed, int horizon = 24,
                                                     int start_hour = 0);

struct WtPowerCurve {
    double cut_in = 3.0;     // m/s
    double rated_speed = 12.0;
    double cut_out = 25.0;
    double rated_mw = 1.0;
};

/// Cut-in / cubic / rated / cut-out turbine curve.
double wt_power(double speed, const WtPowerCurve& curve);

struct Scenario {
    int index = 0;
    double probability = 1.0;
    std::vector<WeatherDraw> weather;               // per hour
    std::vector<std::vector<double>> load_p;        // [load ordinal][t], p.u.
    std::vector<std::vector<double>> load_q;
    std::vector<std::vector<double>> pv_p;          // [pv ordinal][t], p.u., smoke-adjusted
    std::vector<std::vector<double>> wt_p;          // [wt ordinal][t], p.u.
    std::map<int, std::vector<double>> line_wind_angle;  // line index -> rad per hour
};

struct ScenarioSet {
    int horizon = 0;
    int start_hour = 7;
    std::vector<int> load_buses;  // ids, ordinal order of load_p rows
    std::vector<int> pv_buses;
    std::vector<int> wt_buses;
    std::vector<Scenario> scenarios;

    std::string to_csv() const;
};

struct GenerationOptions {
    bool smoke_enabled = true;
    const RegressionModel* smoke_model = nullptr;  // required when a PV bus exists
    double train_nameplate = 100.0;  // output scale of the regression target
    double clean_pm25 = 5.0;         // substituted when smoke is disabled
    double clean_pm10 = 12.0;
    WtPowerCurve wt_curve{};         // rated_mw is per-unit of nameplate
    std::map<int, double> line_bearing;  // line index -> conductor bearing, rad
};

ScenarioSet generate_scenarios(const NetworkModel& model, const HourlyDistributions& dists,
                               const GenerationOptions& opts, int n, std::uint64_t seed);

}  // namespace gridfire
