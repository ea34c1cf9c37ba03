#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccgeo/certificate.hpp"

namespace ccgeo {

// Support function h(z, theta) of the horizontal sections of a z-convex body,
// sampled on a uniform grid: z on [z_min, z_max], theta on [0, 2pi) with
// n_theta equally spaced angles (periodic).
class SupportField {
  public:
    SupportField() = default;
    SupportField(double z_min, double z_max, int n_z, int n_theta);

    static SupportField from_callable(double z_min, double z_max, int n_z, int n_theta,
                                      const std::function<double(double, double)>& F);

    int n_z() const { return n_z_; }
    int n_theta() const { return n_theta_; }
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    double z_step() const { return z_step_; }
    double theta_step() const { return theta_step_; }
    double z_of(int iz) const { return z_min_ + iz * z_step_; }
    double theta_of(int it) const { return it * theta_step_; }

    double at(int iz, int it) const { return data_[static_cast<size_t>(iz) * n_theta_ + it]; }
    double& at(int iz, int it) { return data_[static_cast<size_t>(iz) * n_theta_ + it]; }
    const std::vector<double>& data() const { return data_; }

    // Bilinear interpolation (periodic in theta, clamped in z).
    double eval(double z, double theta) const;

    // Boundary point of the section at grid node (iz, it), reconstructed from
    // the support function: p = (h c - h' s, h s + h' c).  Valid where the
    // section is smooth and strictly convex.
    std::array<double, 2> section_point(int iz, int it) const;

    // Distance from (x, y) to the section at row iz: max(0, max_t(<p,dir>-h)).
    double point_distance(double x, double y, int iz) const;

    // Discrete radius of curvature h + h'' at (iz, it); the second difference
    // uses the 4 sin^2(dt/2) denominator so pure translations give exactly 0.
    double curvature(int iz, int it) const;

    // Raw central second difference in z (undivided).
    double z_second_difference(int iz, int it) const;

    SupportField scaled_combined(double a, const SupportField& other, double b) const;

    void save_binary(const std::string& path) const;
    static SupportField load_binary(const std::string& path);
    void save_csv(std::ostream& os) const;
    void save_obj(std::ostream& os, int z_stride = 1, int theta_stride = 1) const;

  private:
    double z_min_ = 0, z_max_ = 0, z_step_ = 0, theta_step_ = 0;
    int n_z_ = 0, n_theta_ = 0;
    std::vector<double> data_;
};

// Convexity in z of every theta-column over |z| <= z_window (undivided
// second differences >= -tol).
Certificate z_convexity_certificate(const SupportField& f, double z_window, double tol);

// Strict positivity of h + h'' over |z| <= z_window.
Certificate curvature_certificate(const SupportField& f, double z_window, double min_curvature);

}  // namespace ccgeo
