#include "ccgeo/sampled_function.hpp"

#include <algorithm>
#include <cmath>

namespace ccgeo {

SampledFunction::SampledFunction(double z_min, double z_max, std::vector<double> values,
                                 std::vector<double> derivs)
    : z_min_(z_min), z_max_(z_max), values_(std::move(values)), derivs_(std::move(derivs)) {
    if (values_.size() < 2 || values_.size() != derivs_.size() || !(z_max_ > z_min_))
        throw std::invalid_argument("SampledFunction: bad grid");
    step_ = (z_max_ - z_min_) / static_cast<double>(values_.size() - 1);
}

SampledFunction SampledFunction::from_callable(double z_min, double z_max, int n_points,
                                               const std::function<double(double)>& f,
                                               const std::function<double(double)>& df) {
    std::vector<double> v(n_points), d(n_points);
    double h = (z_max - z_min) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        double z = z_min + i * h;
        v[i] = f(z);
        d[i] = df(z);
    }
    return SampledFunction(z_min, z_max, std::move(v), std::move(d));
}

double SampledFunction::operator()(double z) const {
    int n = size();
    if (z <= z_min_) return values_.front() + (z - z_min_) * derivs_.front();
    if (z >= z_max_) return values_.back() + (z - z_max_) * derivs_.back();
    double t = (z - z_min_) / step_;
    int i = std::min(static_cast<int>(t), n - 2);
    t -= i;
    double v0 = values_[i], v1 = values_[i + 1];
    double m0 = derivs_[i] * step_, m1 = derivs_[i + 1] * step_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * m1;
}

double SampledFunction::derivative(double z) const {
    int n = size();
    if (z <= z_min_) return derivs_.front();
    if (z >= z_max_) return derivs_.back();
    double t = (z - z_min_) / step_;
    int i = std::min(static_cast<int>(t), n - 2);
    t -= i;
    double v0 = values_[i], v1 = values_[i + 1];
    double m0 = derivs_[i] * step_, m1 = derivs_[i + 1] * step_;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * v1 +
            (3 * t2 - 2 * t) * m1) /
           step_;
}

double SampledFunction::second_difference(int i) const {
    if (i <= 0 || i >= size() - 1) throw OutOfRange("second_difference: interior nodes only");
    return (values_[i - 1] - 2 * values_[i] + values_[i + 1]) / (step_ * step_);
}

double SampledFunction::max_abs() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

double SampledFunction::parity_asymmetry(bool odd) const {
    // Requires a grid symmetric about 0 (all grids in this project are).
    double worst = 0;
    int n = size();
    for (int i = 0; i < n; ++i) {
        double z = grid_z(i);
        double zm = -z;
        if (zm < z_min_ - 1e-12 || zm > z_max_ + 1e-12) continue;
        int j = static_cast<int>(std::lround((zm - z_min_) / step_));
        j = std::clamp(j, 0, n - 1);
        double d = odd ? values_[i] + values_[j] : values_[i] - values_[j];
        worst = std::max(worst, std::fabs(d));
    }
    return worst;
}

SampledFunction SampledFunction::scaled(double s) const {
    SampledFunction out = *this;
    for (double& v : out.values_) v *= s;
    for (double& d : out.derivs_) d *= s;
    return out;
}

nlohmann::json SampledFunction::to_json() const {
    return {{"z_min", z_min_}, {"z_max", z_max_}, {"values", values_}, {"derivs", derivs_}};
}

SampledFunction SampledFunction::from_json(const nlohmann::json& j) {
    return SampledFunction(j.at("z_min").get<double>(), j.at("z_max").get<double>(),
                           j.at("values").get<std::vector<double>>(),
                           j.at("derivs").get<std::vector<double>>());
}

}  // namespace ccgeo
