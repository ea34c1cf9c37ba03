#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccgeo/certificate.hpp"
#include "ccgeo/quadforms.hpp"

namespace ccgeo {

struct SingularPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A smooth implicit function P with derivatives; the surface is {P = 0}.
// Evaluators must be safe to call from parallel workers.
struct ScalarFieldOracle {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
    int dim = 0;
};

// Oracle for P = Q - epsilon with Q the standard (k,l) form.
ScalarFieldOracle quadric_oracle(int k, int l, double epsilon);
// Oracle for the unit sphere P = |x|^2 - 1 in dimension n.
ScalarFieldOracle sphere_oracle(int n);
// Oracle for a torus of radii (major, minor) around the z-axis in R^3.
ScalarFieldOracle torus_oracle(double major, double minor);

struct SurfaceSample {
    Eigen::VectorXd point;
    Eigen::VectorXd normal;
    Signature second_form;
};

struct SurfaceSampleSet {
    std::vector<SurfaceSample> samples;
    std::uint64_t seed = 0;
    double box_radius = 0.0;

    std::string to_csv() const;
    static SurfaceSampleSet from_csv(const std::string& text);
};

inline constexpr double kTolOnSurface = 1e-10;
inline constexpr double kTolGrad = 1e-10;
inline constexpr double kTolFold = 1e-6;

// Unit normal gradient/|gradient| at a point.
Eigen::VectorXd gauss_map(const ScalarFieldOracle& oracle, const Eigen::VectorXd& point);

// (x_1..x_k, -x_{k+1}..-x_n)/|x|, the closed form for standard quadrics.
Eigen::VectorXd gauss_quadric_closed_form(int k, int l, const Eigen::VectorXd& point);

// Signature of Hess P restricted to the tangent plane, scaled by 1/|grad P|.
Signature second_fundamental_signature(const ScalarFieldOracle& oracle,
                                       const Eigen::VectorXd& point);

// Newton-project quasi-random points from [-box,box]^n onto {P = 0}.
SurfaceSampleSet sample_surface(const ScalarFieldOracle& oracle, double box_radius,
                                int n_samples, std::uint64_t seed);

// Pass iff every sample has the expected second-form signature (up to the
// orientation swap; see Signature::same_unordered).
Certificate hyperbolicity_certificate(const ScalarFieldOracle& oracle, double box_radius,
                                      int n_samples, const Signature& expected,
                                      std::uint64_t seed = 1);

// ---- Rolle containment machinery ----

// f(x) = sqrt(a^2 + eps) - b with a, b the norms of the first k and last l
// coordinates.  Negative exactly on {Q < -eps}.
struct RolleField {
    int k = 1;
    int l = 1;
    double epsilon = 1.0;

    double a(const Eigen::VectorXd& x) const { return x.head(k).norm(); }
    double b(const Eigen::VectorXd& x) const { return x.tail(l).norm(); }
    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
};

double rolle_value(const RolleField& field, const Eigen::VectorXd& point);

// At points with f < 0, df must be parallel to dQ at the lambda-scaled point
// and the scaled point must land on {Q = -eps}; lambda = (b + f)/b.
Certificate rolle_gradient_identity_check(const RolleField& field, const Eigen::VectorXd& point);

// Pass iff min over samples of rolle_value >= -tol; margin is that minimum.
Certificate containment_certificate(const SurfaceSampleSet& samples, int k, int l,
                                    double epsilon, double tol = 1e-9);

// No tangent plane through the origin, and no two far-apart samples sharing a
// spherical direction cell.
Certificate radial_projection_injectivity(const SurfaceSampleSet& samples,
                                          double cell_deg = 1.0);

}  // namespace ccgeo
