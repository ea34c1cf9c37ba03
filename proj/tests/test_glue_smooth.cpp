#include <cmath>

#include "ccgeo/glue_smooth.hpp"
#include "doctest.h"

using namespace ccgeo;

namespace {

const StripModel& test_strip() {
    static StripModel s = build_strip(8, 1.0 / 1024);
    return s;
}

// Brute-force narrow convolution: Simpson quadrature of k(x) F_E(z, theta - x).
double narrow_numeric(const StripModel& s, double z, double theta, double sigma, int n = 4000) {
    double h = 2.0 * sigma / n, acc = 0;
    for (int i = 0; i <= n; ++i) {
        double x = -sigma + i * h;
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * narrow_kernel(sigma, x) * glued_support(s, z, theta - x);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("narrow kernel moments: mass, additivity, quadrature agreement") {
    for (double sigma : {0.05, 1e-3, 1e-5}) {
        NarrowMoments full = narrow_moments(sigma, -sigma, sigma);
        CHECK(std::fabs(full.m1 - 1.0) < 1e-13);
        CHECK(std::fabs(full.ms) < 1e-15);          // odd integrand over even window
        CHECK(full.mc <= 1.0);
        CHECK(full.mc > 1.0 - sigma * sigma);       // attenuation is O(sigma^2)

        NarrowMoments a = narrow_moments(sigma, -sigma, 0.37 * sigma);
        NarrowMoments b = narrow_moments(sigma, 0.37 * sigma, sigma);
        CHECK(std::fabs(a.m1 + b.m1 - full.m1) < 1e-14);
        CHECK(std::fabs(a.mc + b.mc - full.mc) < 1e-14);
        CHECK(std::fabs(a.ms + b.ms - full.ms) < 1e-14);
    }
    // Against direct Simpson quadrature at a resolvable width.
    double sigma = 0.01, lo = -0.006, hi = 0.004;
    int n = 20000;
    double h = (hi - lo) / n, q1 = 0, qc = 0, qs = 0;
    for (int i = 0; i <= n; ++i) {
        double x = lo + i * h;
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        double k = narrow_kernel(sigma, x);
        q1 += w * k;
        qc += w * k * std::cos(x);
        qs += w * k * std::sin(x);
    }
    NarrowMoments M = narrow_moments(sigma, lo, hi);
    CHECK(std::fabs(M.m1 - q1 * h / 3) < 1e-12);
    CHECK(std::fabs(M.mc - qc * h / 3) < 1e-12);
    CHECK(std::fabs(M.ms - qs * h / 3) < 1e-12);
}

TEST_CASE("closed-form narrow smoothing matches numeric convolution") {
    const StripModel& s = test_strip();
    double sigma = 0.01;
    // Heights covering: pure segment, hull with disc, disc-dominated, far tail.
    for (double z : {0.0, 0.31, 0.87, 1.2, 1.55, 2.5, 3.5}) {
        for (int it = 0; it < 24; ++it) {
            double theta = 2.0 * M_PI * it / 24 + 0.0371;
            double exact = narrow_support(s, z, theta, sigma).F;
            double numeric = narrow_numeric(s, z, theta, sigma, 16000);
            // Simpson on a kinked integrand carries O(h^2 * jump) error, so the
            // reference itself limits the comparison.
            CHECK(std::fabs(exact - numeric) < 1e-11);
        }
    }
    // Directions straddling the segment corner, where the kink lives.
    double z = 0.4;
    double corner = std::atan2(-s.f1(z), s.f2(z));  // phi = 0 direction
    for (double off : {-2.0, -0.5, -0.01, 0.0, 0.01, 0.5, 2.0}) {
        double theta = corner + off * sigma;
        CHECK(std::fabs(narrow_support(s, z, theta, sigma).F -
                        narrow_numeric(s, z, theta, sigma)) < 1e-11);
    }
}

TEST_CASE("narrow smoothing derivatives match finite differences") {
    const StripModel& s = test_strip();
    double sigma = 0.01;
    auto F = [&](double z, double t) { return narrow_support(s, z, t, sigma).F; };
    for (double z : {0.275, 1.21}) {
        double corner = std::atan2(-s.f1(z), s.f2(z));
        for (double off : {-3.0, -0.4, 0.3, 2.7}) {
            double theta = corner + off * sigma;
            NarrowEval d = narrow_support(s, z, theta, sigma, true);
            double ht = 1e-6 * (1 + std::fabs(theta)), hz = 1e-6;
            CHECK(d.Ft == doctest::Approx((F(z, theta + ht) - F(z, theta - ht)) / (2 * ht))
                              .epsilon(1e-5));
            CHECK(d.Ftt ==
                  doctest::Approx((F(z, theta + ht) - 2 * F(z, theta) + F(z, theta - ht)) /
                                  (ht * ht))
                      .epsilon(1e-3).scale(1.0));
            CHECK(d.Fz == doctest::Approx((F(z + hz, theta) - F(z - hz, theta)) / (2 * hz))
                              .epsilon(1e-5));
            CHECK(d.Fzt == doctest::Approx((F(z + hz, theta + ht) - F(z + hz, theta - ht) -
                                            F(z - hz, theta + ht) + F(z - hz, theta - ht)) /
                                           (4 * hz * ht))
                               .epsilon(1e-3).scale(1.0));
            CHECK(d.Fzz ==
                  doctest::Approx((F(z + hz, theta) - 2 * F(z, theta) + F(z - hz, theta)) /
                                  (hz * hz))
                      .epsilon(1e-3).scale(1.0));
        }
    }
}

TEST_CASE("narrow smoothing is exact on flat (disc) rows") {
    const StripModel& s = test_strip();
    // Far from the perturbation the section is the cone disc: smoothing a
    // theta-constant support must reproduce it exactly (unit mass).
    for (double z : {2.4, -3.1}) {
        for (double theta : {0.1, 1.7, 4.4})
            CHECK(std::fabs(narrow_support(s, z, theta, 1e-5).F - (std::fabs(z) - 1.0)) < 1e-14);
    }
}

TEST_CASE("smoothed body: snapshot, sup distance, tail, certificates") {
    const StripModel& s = test_strip();
    SmoothParams p;
    p.sigma_theta = 1e-5;
    p.wide_weight = 1e-6;
    SmoothedBody D = smooth_glued(s, p, 4.0, 513, 512);
    SupportField snap = D.snapshot();

    SupDistance d = field_sup_distance(D, snap);
    CHECK(d.grid_sup > 0);
    CHECK(d.grid_sup < 1e-5);
    CHECK(d.continuum_bound >= d.grid_sup);
    CHECK(d.continuum_bound < 1e-4);

    // eval agrees with the snapshot on grid nodes, cone outside the core.
    CHECK(std::fabs(D.eval(snap.z_of(200), snap.theta_of(37)) - snap.at(200, 37)) < 1e-15);
    CHECK(D.eval(7.5, 1.0) == doctest::Approx(6.5));

    Certificate kc = kernel_certificate(p, snap.z_step(), snap.theta_step());
    CHECK(kc.pass);

    Certificate tc = tail_decreasing_certificate(snap, 2.05);
    CHECK(tc.pass);

    Certificate zc = z_convexity_certificate(snap, 4.0, 1e-12);
    CHECK(zc.pass);
    Certificate zs = z_convexity_certificate(snap, 3.0, 0.0);
    CHECK(zs.margin > 0);

    Certificate cc = curvature_certificate(snap, 4.0, 0.0);
    CHECK(cc.pass);
}

TEST_CASE("deviation field is compactly supported and matches the glue") {
    const StripModel& s = test_strip();
    SupportField G = build_deviation_field(s, 4.0, 257, 128);
    for (int it = 0; it < G.n_theta(); ++it) {
        CHECK(G.at(0, it) == 0.0);                  // z = -4
        CHECK(G.at(G.n_z() - 1, it) == 0.0);        // z = +4
    }
    int iz = G.n_z() / 2 + 7;  // some interior row
    double z = G.z_of(iz);
    for (int it = 0; it < G.n_theta(); it += 17) {
        double expect = glued_support(s, z, G.theta_of(it)) - quasi_cone_support(z);
        CHECK(G.at(iz, it) == doctest::Approx(expect).epsilon(1e-12));
    }
}
