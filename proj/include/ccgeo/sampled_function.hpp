#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace ccgeo {

struct OutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Real function of z on a uniform grid with Hermite data (value + derivative
// per node).  Evaluation between nodes is cubic Hermite; outside the grid the
// function continues linearly from the nearest end, which is exact for every
// function in this project (they are all affine beyond the grid).
class SampledFunction {
  public:
    SampledFunction() = default;
    SampledFunction(double z_min, double z_max, std::vector<double> values,
                    std::vector<double> derivs);

    static SampledFunction from_callable(double z_min, double z_max, int n_points,
                                         const std::function<double(double)>& f,
                                         const std::function<double(double)>& df);

    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    int size() const { return static_cast<int>(values_.size()); }
    double step() const { return step_; }
    double grid_z(int i) const { return z_min_ + i * step_; }

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }
    std::vector<double>& mutable_values() { return values_; }
    std::vector<double>& mutable_derivs() { return derivs_; }

    double operator()(double z) const;
    double derivative(double z) const;

    // Central second difference at interior node i, divided by step^2.
    double second_difference(int i) const;

    double max_abs() const;

    // Largest |f(z) - f(-z)| (or |f(z) + f(-z)| for odd_check) over the grid.
    double parity_asymmetry(bool odd) const;

    SampledFunction scaled(double s) const;

    nlohmann::json to_json() const;
    static SampledFunction from_json(const nlohmann::json& j);

  private:
    double z_min_ = 0.0, z_max_ = 0.0, step_ = 0.0;
    std::vector<double> values_, derivs_;
};

}  // namespace ccgeo
