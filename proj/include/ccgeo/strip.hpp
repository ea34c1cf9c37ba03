#pragma once

#include <Eigen/Dense>

#include "ccgeo/certificate.hpp"
#include "ccgeo/sampled_function.hpp"

namespace ccgeo {

// g(z) = exp(-1/(1-z^2)) on |z|<1, 0 outside: smooth, even, compactly supported.
double bump_g(double z);
double bump_g_deriv(double z);

// Even perturbation basis supported in |z| <= 1/2:
// beta_j(z) = cos(2*pi*j*z) * exp(-1/(1-(2z)^2)).
double bump_beta(int j, double z);

struct OdePair {
    SampledFunction f1;  // even, f1(0)=1, f1'(0)=0
    SampledFunction f2;  // odd,  f2(0)=0, f2'(0)=1
};

// Solve f'' = g f on [-z_max, z_max] with RK4 at fixed step <= h_max,
// integrating outward from 0 and mirroring so parity is exact.
OdePair solve_even_odd(double z_max, double h_max = 1e-3);

// Max over grid nodes of |W(z) - W(0)| where W = f1 f2' - f1' f2.
double wronskian_drift(const OdePair& fs);

// Scale so that the strip fits in the cone: s^2 (f1(2)^2+f2(2)^2) <= 1/4
// and the boundary-ray slopes satisfy s^2 (f1'(2)^2+f2'(2)^2) <= 1/2.
double cone_rescale_factor(const OdePair& fs);

struct RhoResult {
    SampledFunction rho;        // even, |rho| <= g/2, zero outside [-1/2, 1/2]
    Eigen::VectorXd coeffs;     // coefficients in the beta basis
    Eigen::MatrixXd obstruction;  // 4 x m matrix of ray slopes/intercepts
    Eigen::VectorXd singular_values;
};

// Find rho in span{beta_0..beta_{m-1}} such that the solutions of
// u'' = rho f_i with u(-1)=u'(-1)=0 vanish identically for |z| >= 1/2.
// Among the obstruction-kernel directions, picks the one maximizing the
// displacement of the strip midline off the unperturbed plane, then scales
// so max |rho/g| = 1/2.
RhoResult build_rho(const OdePair& fs, int m = 8, double h_max = 1e-3);

// Solve u'' = rho*f, u(-1) = u'(-1) = 0, on the grid of f; parity of the
// result is enforced exactly (even for f1, odd for f2).
SampledFunction solve_u(const SampledFunction& rho, const SampledFunction& f, bool even);

struct StripModel {
    double scale = 1.0;  // cone rescale applied to f1, f2 (and hence u1, u2)
    SampledFunction f1, f2, u1, u2, g, rho;
    Eigen::VectorXd rho_coeffs;

    // Support function of the section segment [(u-f), (u+f)] at height z:
    // F_S(z, theta) = psi + |phi|, psi = u.dir, phi = f.dir.
    double support(double z, double theta) const;

    // Midline displacement perpendicular to the segment direction, the
    // quantity that separates the perturbed strip from any plane.
    double perp_displacement(double z) const;

    nlohmann::json to_json() const;
    static StripModel from_json(const nlohmann::json& j);
};

StripModel build_strip(int m = 8, double h_max = 1e-3, double z_max = 4.0);

// Checks the defining ODEs by second differences, parity, Wronskian,
// compact support of u outside [-1/2,1/2], |rho| <= g/2, and the cone fit.
Certificate strip_invariants_certificate(const StripModel& s);

// Convex-concavity of the strip: for every direction theta on a grid,
// D^2(psi + |phi|) >= -tol on all z-cells where phi keeps its sign.
Certificate strip_cc_certificate(const StripModel& s, int n_theta = 256);

// Least-squares residual of rho against c*g over |z|<=1/2, normalized by
// ||rho||; positive bound away from 0 certifies rho != c*g.
double rho_nonproportionality(const StripModel& s);

}  // namespace ccgeo
