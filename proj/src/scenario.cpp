#include "gridfire/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gridfire/errors.hpp"

namespace gridfire {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed ^ 0xd1b54a32d192ed03ULL) {
    // warm up so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) splitmix64(state_);
}

Rng Rng::for_scenario(std::uint64_t seed, int scenario) {
    std::uint64_t s = seed;
    std::uint64_t mixed = splitmix64(s) + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(scenario + 1);
    return Rng(mixed);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
    // Box-Muller, one variate per call so streams replay exactly
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Rng::weibull(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw Error(ErrorCode::InvalidDistribution, "Weibull parameters must be positive");
    double u = uniform01();
    return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

double Rng::von_mises(double mean, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidDistribution, "von Mises kappa must be positive");
    // Best & Fisher (1979) wrapped Cauchy envelope
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    double f = 0.0;
    for (;;) {
        double u1 = uniform01();
        double u2 = 1.0 - uniform01();
        double z = std::cos(std::numbers::pi * u1);
        f = (1.0 + r * z) / (r + z);
        double c = kappa * (r - f);
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    double u3 = uniform01();
    double theta = mean + (u3 < 0.5 ? -1.0 : 1.0) * std::acos(std::clamp(f, -1.0, 1.0));
    theta = std::fmod(theta, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    return theta;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw Error(ErrorCode::InvalidDistribution, "gamma shape must be positive");
    if (shape < 1.0) {
        // Marsaglia-Tsang boost for shape < 1
        double u = 1.0 - uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = 1.0 - uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidDistribution, "Beta parameters must be positive");
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
}

double Rng::lognormal(double log_mean, double log_sigma) {
    if (!(log_sigma >= 0.0)) throw Error(ErrorCode::InvalidDistribution, "lognormal sigma must be nonnegative");
    return std::exp(log_mean + log_sigma * normal());
}

void HourlyDistributions::validate() const {
    for (int h = 0; h < 24; ++h) {
        const auto& w = wind_speed[static_cast<size_t>(h)];
        const auto& v = wind_direction[static_cast<size_t>(h)];
        const auto& s = solar[static_cast<size_t>(h)];
        if (!(w.shape > 0.0 && w.scale > 0.0 && v.kappa > 0.0 && s.a > 0.0 && s.b > 0.0))
            throw Error(ErrorCode::InvalidDistribution, "hour " + std::to_string(h) + " has nonpositive parameters");
    }
    if (!(ghi_max > 0.0)) throw Error(ErrorCode::InvalidDistribution, "ghi_max must be positive");
    if (!(load_sigma >= 0.0)) throw Error(ErrorCode::InvalidDistribution, "load_sigma must be nonnegative");
}

HourlyDistributions default_distributions() {
    HourlyDistributions d;
    for (int h = 0; h < 24; ++h) {
        double daylight = std::max(0.0, std::sin(std::numbers::pi * (h - 6) / 14.0));
        d.wind_speed[static_cast<size_t>(h)] = {2.0, 4.0 + 2.0 * daylight};
        d.wind_direction[static_cast<size_t>(h)] = {0.0, 2.5};
        d.solar[static_cast<size_t>(h)] = {0.5 + 4.0 * daylight, 1.8};
        d.ambient_mean_k[static_cast<size_t>(h)] = 293.0 + 10.0 * daylight;
        d.load_shape[static_cast<size_t>(h)] = 0.6 + 0.4 * daylight;
    }
    return d;
}

void load_profile_csv(HourlyDistributions& dists, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open load profile '" + path + "'");
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string hour_s, mult_s;
        if (!std::getline(ss, hour_s, ',') || !std::getline(ss, mult_s, ','))
            throw Error(ErrorCode::ParseError, "load profile rows need 'hour,multiplier'");
        int hour = std::stoi(hour_s);
        if (hour < 0 || hour > 23) throw Error(ErrorCode::ParseError, "profile hour outside 0..23");
        dists.load_shape[static_cast<size_t>(hour)] = std::stod(mult_s);
    }
}

std::vector<std::vector<WeatherDraw>> sample_weather(const HourlyDistributions& dists, int n,
                                                     std::uint64_t seed, int horizon, int start_hour) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "scenario count must be at least 1");
    dists.validate();
    std::vector<std::vector<WeatherDraw>> out(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        Rng rng = Rng::for_scenario(seed, s);
        auto& row = out[static_cast<size_t>(s)];
        row.resize(static_cast<size_t>(horizon));
        for (int t = 0; t < horizon; ++t) {
            const int h = (start_hour + t) % 24;
            WeatherDraw& w = row[static_cast<size_t>(t)];
            const auto& wd = dists.wind_speed[static_cast<size_t>(h)];
            const auto& vd = dists.wind_direction[static_cast<size_t>(h)];
            const auto& sd = dists.solar[static_cast<size_t>(h)];
            w.wind_speed = rng.weibull(wd.shape, wd.scale);
            w.wind_dir = rng.von_mises(vd.mean, vd.kappa);
            w.solar = dists.ghi_max * rng.beta(sd.a, sd.b);
            w.pm25 = rng.lognormal(dists.pm25.log_mean, dists.pm25.log_sigma);
            w.pm10 = rng.lognormal(dists.pm10.log_mean, dists.pm10.log_sigma);
            w.cloud = rng.uniform(dists.cloud_opacity.lo, dists.cloud_opacity.hi);
            w.humidity = rng.uniform(dists.humidity.lo, dists.humidity.hi);
            w.ambient_k = dists.ambient_mean_k[static_cast<size_t>(h)] +
                          rng.uniform(-dists.ambient_spread_k, dists.ambient_spread_k);
            // mean-one multiplicative load noise
            w.load_mult = rng.lognormal(-0.5 * dists.load_sigma * dists.load_sigma, dists.load_sigma);
        }
    }
    return out;
}

double wt_power(double speed, const WtPowerCurve& curve) {
    if (speed < curve.cut_in || speed >= curve.cut_out) return 0.0;
    if (speed >= curve.rated_speed) return curve.rated_mw;
    const double v3 = speed * speed * speed;
    const double ci3 = curve.cut_in * curve.cut_in * curve.cut_in;
    const double r3 = curve.rated_speed * curve.rated_speed * curve.rated_speed;
    return curve.rated_mw * (v3 - ci3) / (r3 - ci3);
}

ScenarioSet generate_scenarios(const NetworkModel& model, const HourlyDistributions& dists,
                               const GenerationOptions& opts, int n, std::uint64_t seed) {
    const int horizon = model.time.horizon;
    const int start = model.time.start_hour;
    auto weather = sample_weather(dists, n, seed, horizon, start);

    ScenarioSet set;
    set.horizon = horizon;
    set.start_hour = start;
    set.load_buses = model.buses_with(&Bus::has_load);
    set.pv_buses = model.buses_with(&Bus::has_pv);
    set.wt_buses = model.buses_with(&Bus::has_wt);
    if (!set.pv_buses.empty() && opts.smoke_model == nullptr)
        throw Error(ErrorCode::UnfittedModel, "PV buses present but no smoke regression model supplied");

    set.scenarios.resize(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        Scenario& sc = set.scenarios[static_cast<size_t>(s)];
        sc.index = s;
        sc.probability = 1.0 / static_cast<double>(n);
        sc.weather = std::move(weather[static_cast<size_t>(s)]);

        sc.load_p.assign(set.load_buses.size(), std::vector<double>(static_cast<size_t>(horizon), 0.0));
        sc.load_q = sc.load_p;
        for (size_t li = 0; li < set.load_buses.size(); ++li) {
            const Bus& b = model.bus(set.load_buses[li]);
            const double tan_phi = std::tan(std::acos(b.power_factor));
            for (int t = 0; t < horizon; ++t) {
                const int h = (start + t) % 24;
                const double p = b.peak_load_mw * dists.load_shape[static_cast<size_t>(h)] *
                                 sc.weather[static_cast<size_t>(t)].load_mult;
                sc.load_p[li][static_cast<size_t>(t)] = p;
                sc.load_q[li][static_cast<size_t>(t)] = p * tan_phi;
            }
        }

        sc.pv_p.assign(set.pv_buses.size(), std::vector<double>(static_cast<size_t>(horizon), 0.0));
        for (int t = 0; t < horizon; ++t) {
            const WeatherDraw& w = sc.weather[static_cast<size_t>(t)];
            double fraction = 0.0;
            if (!set.pv_buses.empty()) {
                SmokeFeatures f;
                f.temperature = w.ambient_k - 273.15;
                f.humidity = w.humidity;
                f.irradiance = w.solar;
                f.cloud = w.cloud;
                f.pm25 = opts.smoke_enabled ? w.pm25 : opts.clean_pm25;
                f.pm10 = opts.smoke_enabled ? w.pm10 : opts.clean_pm10;
                const double raw = opts.smoke_model->predict(f);
                fraction = std::clamp(raw / opts.train_nameplate, 0.0, 1.0);
            }
            for (size_t pi = 0; pi < set.pv_buses.size(); ++pi)
                sc.pv_p[pi][static_cast<size_t>(t)] = fraction * model.devices.pv_nameplate[pi];
        }

        sc.wt_p.assign(set.wt_buses.size(), std::vector<double>(static_cast<size_t>(horizon), 0.0));
        for (size_t wi = 0; wi < set.wt_buses.size(); ++wi) {
            for (int t = 0; t < horizon; ++t) {
                const double frac = wt_power(sc.weather[static_cast<size_t>(t)].wind_speed, opts.wt_curve) /
                                    std::max(opts.wt_curve.rated_mw, 1e-12);
                sc.wt_p[wi][static_cast<size_t>(t)] =
                    std::clamp(frac, 0.0, 1.0) * model.devices.wt_nameplate[wi];
            }
        }

        for (size_t li = 0; li < model.lines.size(); ++li) {
            if (!model.lines[li].fire_exposed) continue;
            double bearing = 0.0;
            if (auto it = opts.line_bearing.find(static_cast<int>(li)); it != opts.line_bearing.end())
                bearing = it->second;
            auto& angles = sc.line_wind_angle[static_cast<int>(li)];
            angles.resize(static_cast<size_t>(horizon));
            for (int t = 0; t < horizon; ++t) {
                double a = std::fmod(sc.weather[static_cast<size_t>(t)].wind_dir - bearing, kTwoPi);
                if (a < 0.0) a += kTwoPi;
                angles[static_cast<size_t>(t)] = a;
            }
        }
    }
    return set;
}

std::string ScenarioSet::to_csv() const {
    std::ostringstream out;
    out << "scenario,hour,wind_speed,wind_dir,solar,pm25,pm10,cloud,humidity,ambient_k,load_mult,"
           "total_load_p,total_pv_p,total_wt_p\n";
    for (const auto& sc : scenarios) {
        for (int t = 0; t < horizon; ++t) {
            const auto& w = sc.weather[static_cast<size_t>(t)];
            double lp = 0.0, pv = 0.0, wt = 0.0;
            for (const auto& row : sc.load_p) lp += row[static_cast<size_t>(t)];
            for (const auto& row : sc.pv_p) pv += row[static_cast<size_t>(t)];
            for (const auto& row : sc.wt_p) wt += row[static_cast<size_t>(t)];
            out << sc.index << "," << t << "," << w.wind_speed << "," << w.wind_dir << "," << w.solar
                << "," << w.pm25 << "," << w.pm10 << "," << w.cloud << "," << w.humidity << ","
                << w.ambient_k << "," << w.load_mult << "," << lp << "," << pv << "," << wt << "\n";
        }
    }
    return out.str();
}

}  // namespace gridfire
