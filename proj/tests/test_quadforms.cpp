#include <cmath>

#include "ccgeo/quadforms.hpp"
#include "ccgeo/rng.hpp"
#include "doctest.h"

using namespace ccgeo;

namespace {

Eigen::MatrixXd random_symmetric(int n, Rng& rng) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    return 0.5 * (m + m.transpose());
}

Eigen::VectorXd random_vector(int n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("standard_form diagonals") {
    auto q = standard_form(1, 1);
    CHECK(q.matrix().isApprox(Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix()));
    auto q21 = standard_form(2, 1);
    CHECK(q21.matrix().isApprox(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()));
    auto q12 = standard_form(1, 2);
    CHECK(q12.matrix().isApprox(Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()));
}

TEST_CASE("signature_of basic cases") {
    CHECK(signature_of(standard_form(2, 1)) == Signature{2, 1, 0});
    CHECK(signature_of(QuadraticForm(Eigen::MatrixXd::Zero(3, 3))) == Signature{0, 0, 3});
    Eigen::Vector3d d(1.0, -1.0, 1e-14);
    CHECK(signature_of(QuadraticForm(d.asDiagonal())) == Signature{1, 1, 1});
}

TEST_CASE("signature_of standard forms is exact") {
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l)
            CHECK(signature_of(standard_form(k, l)) == Signature{k, l, 0});
}

TEST_CASE("dual_form is matrix inverse and self-inverse on standard forms") {
    auto q = standard_form(1, 1);
    CHECK(dual_form(q).matrix().isApprox(q.matrix(), 1e-12));

    Eigen::Vector2d d(2.0, -1.0);
    auto qd = QuadraticForm(d.asDiagonal());
    Eigen::Vector2d expect(0.5, -1.0);
    CHECK(dual_form(qd).matrix().isApprox(expect.asDiagonal().toDenseMatrix(), 1e-12));

    for (int k = 1; k <= 3; ++k)
        for (int l = 1; l <= 3; ++l) {
            auto s = standard_form(k, l);
            CHECK(dual_form(s).matrix().isApprox(s.matrix(), 1e-12));
        }
}

TEST_CASE("dual form definition q*(l,l) = q(q~l, q~l) on random forms") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = rng.uniform_int(2, 6);
        QuadraticForm q(random_symmetric(n, rng));
        if (!q.nondegenerate()) continue;
        Eigen::VectorXd ell = random_vector(n, rng);
        // q~(ell) solves q(q~ell, x) = ell(x), i.e. A y = ell (A symmetric).
        Eigen::VectorXd y = q.matrix().ldlt().solve(ell);
        CHECK(dual_value(q, ell) == doctest::Approx(y.dot(q.matrix() * y)).epsilon(1e-9));
        // And q* matrix is the inverse.
        CHECK(dual_value(q, ell) ==
              doctest::Approx(ell.dot(dual_form(q).matrix() * ell)).epsilon(1e-9));
    }
}

TEST_CASE("dual_form involution") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int n = rng.uniform_int(2, 6);
        Eigen::MatrixXd m = random_symmetric(n, rng);
        m += n * Eigen::MatrixXd::Identity(n, n);  // keep it well-conditioned
        QuadraticForm q(m);
        CHECK((dual_form(dual_form(q)).matrix() - q.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("restrict_to_hyperplane worked examples") {
    auto q = standard_form(2, 1);
    {
        auto [r, sig] = restrict_to_hyperplane(q, Eigen::Vector3d(0, 0, 1));
        CHECK(sig == Signature{2, 0, 0});
        CHECK(r.matrix().isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    }
    {
        auto [r, sig] = restrict_to_hyperplane(q, Eigen::Vector3d(1, 0, 1));
        CHECK(sig == Signature{1, 0, 1});
    }
    {
        auto [r, sig] = restrict_to_hyperplane(standard_form(1, 2), Eigen::Vector3d(1, 0, 0));
        CHECK(sig == Signature{0, 2, 0});
    }
}

TEST_CASE("predict_restricted_signature worked examples") {
    auto q = standard_form(2, 1);
    CHECK(predict_restricted_signature(q, Eigen::Vector3d(0, 0, 1)) == Signature{2, 0, 0});
    CHECK(predict_restricted_signature(q, Eigen::Vector3d(1, 0, 1)) == Signature{1, 0, 1});
}

TEST_CASE("signature law: prediction matches eigen-computed restriction") {
    Rng rng(13);
    int checked = 0;
    for (int trial = 0; checked < 500; ++trial) {
        REQUIRE(trial < 20000);
        int n = rng.uniform_int(2, 6);
        QuadraticForm q(random_symmetric(n, rng));
        if (!q.nondegenerate()) continue;
        Eigen::VectorXd ell = random_vector(n, rng);
        double qs = dual_value(q, ell);
        double scale = ell.squaredNorm() / q.matrix().operatorNorm();
        if (std::abs(qs) <= 10 * QuadraticForm::kTolDegenerate * scale) continue;
        auto [r, sig] = restrict_to_hyperplane(q, ell);
        CHECK(sig == predict_restricted_signature(q, ell));
        ++checked;
    }
}

TEST_CASE("gauss identity q*(dQ(x),dQ(x)) = 4 Q(x)") {
    Rng rng(17);
    for (int k = 1; k <= 3; ++k)
        for (int l = 1; l <= 3; ++l) {
            auto q = standard_form(k, l);
            for (int trial = 0; trial < 200; ++trial) {
                Eigen::VectorXd x = random_vector(k + l, rng);
                double lhs = dual_value(q, q.gradient(x));
                CHECK(std::abs(lhs - 4.0 * q(x)) < 1e-10 * std::max(1.0, x.squaredNorm()));
            }
        }
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(dual_form(QuadraticForm(Eigen::MatrixXd::Zero(2, 2))), DegenerateForm);
    CHECK_THROWS_AS(restrict_to_hyperplane(standard_form(1, 1), Eigen::Vector2d(0, 0)),
                    ZeroCovector);
}

TEST_CASE("json round trip") {
    auto q = standard_form(2, 2);
    auto j = q.to_json();
    CHECK(QuadraticForm::from_json(j).matrix().isApprox(q.matrix()));
}
