#pragma once

#include "ccgeo/certificate.hpp"
#include "ccgeo/strip.hpp"
#include "ccgeo/supportfield.hpp"

namespace ccgeo {

// Support of the quasi-cone section: |z| - 1 (valid for |z| >= 1).
inline double quasi_cone_support(double z) { return std::fabs(z) - 1.0; }

// Support of the glued body E: the strip for |z| < 1, hull of strip section
// and the cone disc for |z| >= 1.
double glued_support(const StripModel& s, double z, double theta);

// Deviation of E from the cone: G(z,theta) = F_E - (|z|-1).  Compactly
// supported in z: the strip lies inside the cone for |z| >= 2, so G = 0 there.
SupportField build_deviation_field(const StripModel& s, double z_core = 4.0, int n_z = 2049,
                                   int n_theta = 2048);

// ---- smoothing kernel ----
//
// Two-component kernel, separable in (z, theta):
//   (1-w) * delta(t) x k_sigma(psi)            -- narrow, rounds the corners
//   w     * bump(t/2) x bump(psi/pi)           -- wide, low-mass curvature floor
// k_sigma(psi) = (693/(512 sigma)) (1-(psi/sigma)^2)^5 on |psi| <= sigma: an
// even, nonnegative, C^4, compactly supported polynomial bump with exact unit
// mass.  Because it is a single polynomial piece, its convolution with the
// piecewise-sinusoidal section support of E has a closed form, so the narrow
// smoothing is evaluated pointwise with no angular grid at all; sigma can be
// far below any feasible grid resolution.

struct SmoothParams {
    double sigma_theta = 0.05;   // narrow angular width (radians); the epsilon
    double wide_weight = 1e-6;
    double sigma_z_wide = 2.0;
};

// Partial moments of k_sigma over [a,b] (subset of [-sigma, sigma]) against
// 1, cos x, sin x; exact up to the (rapidly convergent) cosine Taylor series.
struct NarrowMoments {
    double m1, mc, ms;
};
NarrowMoments narrow_moments(double sigma, double a, double b);
double narrow_kernel(double sigma, double x);

// Narrow-smoothed support of E at (z, theta), and optionally its first and
// second derivatives (d/dtheta, d/dz and mixed), all in closed form.
struct NarrowEval {
    double F;
    double Ft, Ftt;   // theta derivatives
    double Fz, Fzt, Fzz;
};
NarrowEval narrow_support(const StripModel& s, double z, double theta, double sigma,
                          bool with_derivs = false);

// ---- smoothed body ----

struct SmoothedBody {
    StripModel strip;
    SmoothParams params;
    SupportField wide;          // wide-component smoothing of F_E on the core grid
    double z_core = 4.0;

    double eval(double z, double theta) const;
    // grid snapshot of F_D on exactly the wide grid (for the certificates)
    SupportField snapshot() const;
};

SmoothedBody smooth_glued(const StripModel& s, const SmoothParams& p, double z_core = 4.0,
                          int n_z = 2049, int n_theta = 2048);

// sup over the snapshot grid of |F_D - F_E|, plus an analytic bound for the
// continuum sup (corner bulge <= 0.2256 sigma * slope jump, plus wide part).
struct SupDistance {
    double grid_sup = 0;
    double continuum_bound = 0;
};
SupDistance field_sup_distance(const SmoothedBody& D, const SupportField& snap);

// Mass, evenness, affine-in-z reproduction, and concentration of the kernel.
Certificate kernel_certificate(const SmoothParams& p, double h_z, double d_theta);

// Row max of |snap - F_cone| non-increasing in |z| beyond from_z.
Certificate tail_decreasing_certificate(const SupportField& snap, double from_z,
                                        double tol = 1e-14);

}  // namespace ccgeo
