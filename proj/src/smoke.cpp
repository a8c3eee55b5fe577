#include "gridfire/smoke.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridfire/errors.hpp"
#include "json.hpp"

namespace gridfire {

std::array<double, 6> transform(const SmokeFeatures& f) {
    if (!(f.pm25 > 0.0) || !(f.pm10 > 0.0))
        throw Error(ErrorCode::LogDomain, "particulate concentrations must be positive");
    return {f.temperature, f.humidity, f.irradiance, f.cloud, std::log(f.pm25), std::log(f.pm10)};
}

RegressionModel::RegressionModel(const std::array<double, 7>& coeffs, const std::array<double, 6>& mean,
                                 const std::array<double, 6>& stddev)
    : coeffs_(coeffs), mean_(mean), std_(stddev), fitted_(true) {
    for (double s : std_)
        if (!(s > 0.0)) throw Error(ErrorCode::InvalidParameter, "standard deviations must be positive");
}

double RegressionModel::predict(const SmokeFeatures& features) const {
    if (!fitted_) throw Error(ErrorCode::UnfittedModel, "predict called before fit");
    const auto z = transform(features);
    double y = coeffs_[0];
    for (int k = 0; k < 6; ++k) y += coeffs_[static_cast<size_t>(k + 1)] * (z[static_cast<size_t>(k)] - mean_[static_cast<size_t>(k)]) / std_[static_cast<size_t>(k)];
    return std::max(0.0, y);
}

RegressionModel fit(const SmokeDataset& dataset) {
    const auto n = static_cast<Eigen::Index>(dataset.features.size());
    if (dataset.pv_output.size() != dataset.features.size())
        throw Error(ErrorCode::DimensionMismatch, "feature and target row counts differ");
    if (n < 7) throw Error(ErrorCode::TooFewRows, "need at least 7 rows to fit 7 coefficients");

    Eigen::MatrixXd raw(n, 6);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto z = transform(dataset.features[static_cast<size_t>(i)]);
        for (int k = 0; k < 6; ++k) raw(i, k) = z[static_cast<size_t>(k)];
        y(i) = dataset.pv_output[static_cast<size_t>(i)];
    }

    std::array<double, 6> mean{}, stddev{};
    for (int k = 0; k < 6; ++k) {
        mean[static_cast<size_t>(k)] = raw.col(k).mean();
        const double var = (raw.col(k).array() - mean[static_cast<size_t>(k)]).square().sum() / static_cast<double>(n);
        stddev[static_cast<size_t>(k)] = std::sqrt(var);
        if (!(stddev[static_cast<size_t>(k)] > 1e-12))
            throw Error(ErrorCode::RankDeficient, "feature column " + std::to_string(k) + " has zero variance");
    }

    Eigen::MatrixXd design(n, 7);
    design.col(0).setOnes();
    for (int k = 0; k < 6; ++k)
        design.col(k + 1) = (raw.col(k).array() - mean[static_cast<size_t>(k)]) / stddev[static_cast<size_t>(k)];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 7)
        throw Error(ErrorCode::RankDeficient, "standardized design matrix is rank deficient");
    Eigen::VectorXd alpha = qr.solve(y);

    std::array<double, 7> coeffs{};
    for (int k = 0; k < 7; ++k) coeffs[static_cast<size_t>(k)] = alpha(k);
    return RegressionModel(coeffs, mean, stddev);
}

double predict_pv(const RegressionModel& model, const SmokeFeatures& features) {
    return model.predict(features);
}

std::string RegressionModel::to_json() const {
    nlohmann::json j;
    j["coefficients"] = coeffs_;
    j["feature_mean"] = mean_;
    j["feature_std"] = std_;
    return j.dump(2);
}

RegressionModel RegressionModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        std::array<double, 7> c{};
        std::array<double, 6> m{}, s{};
        for (int k = 0; k < 7; ++k) c[static_cast<size_t>(k)] = j.at("coefficients").at(k).get<double>();
        for (int k = 0; k < 6; ++k) {
            m[static_cast<size_t>(k)] = j.at("feature_mean").at(k).get<double>();
            s[static_cast<size_t>(k)] = j.at("feature_std").at(k).get<double>();
        }
        return RegressionModel(c, m, s);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

SmokeDataset load_smoke_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open smoke dataset '" + path + "'");
    SmokeDataset data;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {  // first row carries column names
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 7)
            throw Error(ErrorCode::ParseError, "smoke dataset rows need 7 columns, got " + std::to_string(vals.size()));
        SmokeFeatures f;
        f.temperature = vals[0];
        f.humidity = vals[1];
        f.irradiance = vals[2];
        f.cloud = vals[3];
        f.pm25 = vals[4];
        f.pm10 = vals[5];
        data.features.push_back(f);
        data.pv_output.push_back(vals[6]);
    }
    return data;
}

}  // namespace gridfire
