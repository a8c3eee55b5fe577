#pragma once

#include <array>
#include <string>
#include <vector>

namespace gridfire {

/// Raw regression inputs in physical units. `irradiance` is the panel
/// effective value (direct normal component times cos of the zenith angle).
struct SmokeFeatures {
    double temperature = 0.0;  // degC
    double humidity = 0.0;     // percent
    double irradiance = 0.0;   // W/m^2
    double cloud = 0.0;        // opacity fraction
    double pm25 = 1.0;         // ug/m^3
    double pm10 = 1.0;
};

/// (Z1, Z2, Z3, Z4, ln Z5, ln Z6). Throws on nonpositive particulate values.
std::array<double, 6> transform(const SmokeFeatures& features);

/// Ordinary least squares on standardized transformed features. The
/// intercept is in target units; feature coefficients are per standard
/// deviation of the training columns.
class RegressionModel {
  public:
    RegressionModel() = default;
    RegressionModel(const std::array<double, 7>& coeffs, const std::array<double, 6>& mean,
                    const std::array<double, 6>& stddev);

    bool fitted() const { return fitted_; }
    const std::array<double, 7>& coefficients() const { return coeffs_; }
    const std::array<double, 6>& feature_mean() const { return mean_; }
    const std::array<double, 6>& feature_std() const { return std_; }

    /// Prediction in target units, floored at zero.
    double predict(const SmokeFeatures& features) const;

    std::string to_json() const;
    static RegressionModel from_json(const std::string& text);

  private:
    std::array<double, 7> coeffs_{};
    std::array<double, 6> mean_{};
    std::array<double, 6> std_{};
    bool fitted_ = false;
};

struct SmokeDataset {
    std::vector<SmokeFeatures> features;
    std::vector<double> pv_output;
};

RegressionModel fit(const SmokeDataset& dataset);
double predict_pv(const RegressionModel& model, const SmokeFeatures& features);

/// CSV columns: temperature,humidity,irradiance,cloud,pm25,pm10,pv_output
SmokeDataset load_smoke_csv(const std::string& path);

}  // namespace gridfire
