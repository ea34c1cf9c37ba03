#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccgeo/rng.hpp"
#include "ccgeo/supportfield.hpp"
#include "doctest.h"

using namespace ccgeo;

namespace {

// Disc of radius r centered at (cx, cy): h(theta) = r + cx cos + cy sin.
SupportField disc_field(double r, double cx = 0, double cy = 0) {
    return SupportField::from_callable(-1.0, 1.0, 33, 256, [=](double, double th) {
        return r + cx * std::cos(th) + cy * std::sin(th);
    });
}

}  // namespace

TEST_CASE("section reconstruction of discs") {
    // Centered disc: boundary points at radius r.
    auto f = disc_field(1.5);
    for (int it = 0; it < f.n_theta(); it += 7) {
        auto p = f.section_point(5, it);
        CHECK(std::hypot(p[0], p[1]) == doctest::Approx(1.5).epsilon(1e-8));
    }
    // Translated disc h = cos(theta) + 2: boundary = (1,0) + 2(cos,sin).
    auto g = disc_field(2.0, 1.0, 0.0);
    for (int it = 0; it < g.n_theta(); it += 5) {
        double th = g.theta_of(it);
        auto p = g.section_point(0, it);
        CHECK(p[0] == doctest::Approx(1.0 + 2.0 * std::cos(th)).epsilon(1e-7));
        CHECK(p[1] == doctest::Approx(2.0 * std::sin(th)).epsilon(1e-7));
    }
}

TEST_CASE("reconstruction round trip: support of boundary points equals h") {
    // A smooth strictly convex slice that is not a disc.
    auto f = SupportField::from_callable(-1, 1, 9, 512, [](double, double th) {
        return 2.0 + 0.3 * std::cos(2 * th) + 0.1 * std::sin(3 * th);
    });
    for (int it = 0; it < f.n_theta(); ++it) {
        double th = f.theta_of(it);
        double best = -1e300;
        for (int jt = 0; jt < f.n_theta(); ++jt) {
            auto p = f.section_point(4, jt);
            best = std::max(best, p[0] * std::cos(th) + p[1] * std::sin(th));
        }
        CHECK(std::abs(best - f.at(4, it)) < 1e-6);
    }
}

TEST_CASE("boundary points support their own direction") {
    auto f = disc_field(2.0, 0.4, -0.7);
    for (int it = 0; it < f.n_theta(); it += 3) {
        double th = f.theta_of(it);
        auto p = f.section_point(2, it);
        CHECK(std::abs(p[0] * std::cos(th) + p[1] * std::sin(th) - f.at(2, it)) < 1e-8);
    }
}

TEST_CASE("minkowski combination of discs") {
    auto a = disc_field(2.0);
    auto b = disc_field(0.0);  // the origin point
    auto half = a.scaled_combined(0.5, b, 0.5);
    for (int it = 0; it < half.n_theta(); it += 11)
        CHECK(half.at(3, it) == doctest::Approx(1.0).epsilon(1e-12));

    // Weights (1, 0) leave the first field unchanged.
    auto same = a.scaled_combined(1.0, b, 0.0);
    for (int it = 0; it < same.n_theta(); it += 11)
        CHECK(same.at(3, it) == a.at(3, it));

    // Combined disc radius is the weighted sum of radii.
    auto c = disc_field(1.0, 0.2, 0.0);
    auto mix = a.scaled_combined(0.25, c, 0.75);
    for (int it = 0; it < mix.n_theta(); ++it) {
        double th = mix.theta_of(it);
        double expect = 0.25 * 2.0 + 0.75 * (1.0 + 0.2 * std::cos(th));
        CHECK(std::abs(mix.at(3, it) - expect) < 1e-9);
    }
}

TEST_CASE("combination preserves z-convexity") {
    auto a = SupportField::from_callable(-2, 2, 65, 64,
                                         [](double z, double) { return z * z + 1; });
    auto b = SupportField::from_callable(-2, 2, 65, 64, [](double z, double th) {
        return std::cosh(z) + 0.1 * std::cos(th);
    });
    auto mix = a.scaled_combined(0.5, b, 0.5);
    CHECK(z_convexity_certificate(a, 2.0, 1e-12).pass);
    CHECK(z_convexity_certificate(b, 2.0, 1e-12).pass);
    CHECK(z_convexity_certificate(mix, 2.0, 1e-12).pass);
}

TEST_CASE("z-convexity fails on -z^2") {
    auto f = SupportField::from_callable(-2, 2, 65, 32,
                                         [](double z, double) { return -z * z; });
    auto cert = z_convexity_certificate(f, 2.0, 1e-12);
    CHECK_FALSE(cert.pass);
    CHECK(cert.margin < 0.0);
}

TEST_CASE("z-convexity margin unchanged by affine-in-z terms") {
    auto base = SupportField::from_callable(-2, 2, 129, 64, [](double z, double th) {
        return std::cosh(z) + 0.2 * std::cos(th);
    });
    auto shifted = SupportField::from_callable(-2, 2, 129, 64, [](double z, double th) {
        return std::cosh(z) + 0.2 * std::cos(th) + 3.0 * z - 7.0 + 0.5 * z * std::sin(th);
    });
    auto c0 = z_convexity_certificate(base, 2.0, 1e-12);
    auto c1 = z_convexity_certificate(shifted, 2.0, 1e-12);
    CHECK(std::abs(c0.margin - c1.margin) < 1e-12);
}

TEST_CASE("curvature certificate: disc passes, segment fails") {
    auto d = disc_field(1.0);
    auto cd = curvature_certificate(d, 1.0, 1e-6);
    CHECK(cd.pass);
    CHECK(cd.margin == doctest::Approx(1.0).epsilon(1e-9));

    // Unit segment on the x-axis: h = |cos(theta)|; h + h'' is a spike.
    auto seg = SupportField::from_callable(
        -1, 1, 9, 256, [](double, double th) { return std::abs(std::cos(th)); });
    CHECK_FALSE(curvature_certificate(seg, 1.0, 1e-6).pass);
}

TEST_CASE("point distance to sections") {
    auto d = disc_field(1.0);
    CHECK(d.point_distance(3.0, 0.0, 4) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d.point_distance(0.2, -0.3, 4) == 0.0);

    // Unit segment: distance from (2,2) to nearest endpoint (1,0) is sqrt(5).
    auto seg = SupportField::from_callable(
        -1, 1, 9, 4096, [](double, double th) { return std::abs(std::cos(th)); });
    CHECK(seg.point_distance(2.0, 2.0, 4) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-4));
}

TEST_CASE("point distance is 1-Lipschitz in the point") {
    auto f = SupportField::from_callable(-1, 1, 5, 256, [](double, double th) {
        return 1.0 + 0.25 * std::cos(3 * th);
    });
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        double px = rng.uniform(-3, 3), py = rng.uniform(-3, 3);
        double qx = rng.uniform(-3, 3), qy = rng.uniform(-3, 3);
        double dp = f.point_distance(px, py, 2);
        double dq = f.point_distance(qx, qy, 2);
        CHECK(std::abs(dp - dq) <= std::hypot(px - qx, py - qy) + 1e-12);
    }
}

TEST_CASE("binary save/load round trip") {
    auto f = SupportField::from_callable(-2, 3, 17, 64, [](double z, double th) {
        return std::cosh(z) + 0.3 * std::sin(2 * th);
    });
    std::string path = "/tmp/ccgeo_test_field.bin";
    f.save_binary(path);
    auto g = SupportField::load_binary(path);
    std::remove(path.c_str());
    CHECK(g.n_z() == f.n_z());
    CHECK(g.n_theta() == f.n_theta());
    CHECK(g.z_min() == f.z_min());
    CHECK(g.z_max() == f.z_max());
    CHECK(g.data() == f.data());
}

TEST_CASE("CSV export shape") {
    auto f = disc_field(1.0);
    std::ostringstream os;
    f.save_csv(os);
    std::istringstream is(os.str());
    std::string line;
    int rows = 0;
    std::getline(is, line);  // header
    CHECK(line == "z,theta,F");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == f.n_z() * f.n_theta());
}

TEST_CASE("OBJ export has full vertex grid") {
    auto f = disc_field(1.0);
    std::ostringstream os;
    f.save_obj(os, 4, 16);
    std::istringstream is(os.str());
    std::string line;
    int verts = 0, faces = 0;
    while (std::getline(is, line)) {
        if (line.rfind("v ", 0) == 0) ++verts;
        if (line.rfind("f ", 0) == 0) ++faces;
    }
    int nz = (f.n_z() - 1) / 4 + 1;
    int nt = f.n_theta() / 16;
    CHECK(verts == nz * nt);
    CHECK(faces == (nz - 1) * nt);
}
