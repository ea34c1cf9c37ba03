#include "ccgeo/arnold.hpp"

#include "ccgeo/rng.hpp"

namespace ccgeo {

PencilForm restrict_to_span(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                            const Eigen::Vector4d& q) {
    return {p.dot(A * p), p.dot(A * q), q.dot(A * q)};
}

Eigen::Matrix<double, 4, 2> plane_pencil_basis(const Eigen::Vector4d& p,
                                               const Eigen::Vector4d& q) {
    Eigen::Matrix<double, 4, 2> M;
    M.col(0) = p;
    M.col(1) = q;
    // Kernel of M^T = orthogonal complement of span(p, q).
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(M, Eigen::ComputeFullU);
    return svd.matrixU().rightCols<2>();
}

PencilForm dual_pencil_form(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                            const Eigen::Vector4d& q) {
    Eigen::Matrix4d Ainv = A.inverse();
    auto N = plane_pencil_basis(p, q);
    Eigen::Vector4d n0 = N.col(0), n1 = N.col(1);
    return {n0.dot(Ainv * n0), n0.dot(Ainv * n1), n1.dot(Ainv * n1)};
}

Eigen::Matrix4d hyperbolic_quadric() {
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A(0, 0) = A(1, 1) = 1.0;
    A(2, 2) = A(3, 3) = -1.0;
    return A;
}

ArnoldTrial arnold_trial(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                         const Eigen::Vector4d& q, double disc_tol) {
    ArnoldTrial t;
    PencilForm prim = restrict_to_span(A, p, q);
    PencilForm dual = dual_pencil_form(A, p, q);
    double scale_p = prim.app * prim.app + prim.apq * prim.apq + prim.aqq * prim.aqq;
    double scale_d = dual.app * dual.app + dual.apq * dual.apq + dual.aqq * dual.aqq;
    t.retained = std::fabs(prim.discriminant()) > disc_tol * std::max(scale_p, 1e-300) &&
                 std::fabs(dual.discriminant()) > disc_tol * std::max(scale_d, 1e-300);
    t.intersections = prim.root_count();
    t.tangencies = dual.root_count();
    return t;
}

Certificate arnold_certificate(const Eigen::Matrix4d& A, int n_lines, uint64_t seed,
                               double disc_tol) {
    Certificate cert;
    cert.name = "arnold_identity";
    cert.pass = true;
    Rng rng(seed, 77);
    int retained = 0, mismatches = 0, twos = 0, zeros = 0;
    for (int i = 0; i < n_lines; ++i) {
        Eigen::Vector4d p, q;
        for (int j = 0; j < 4; ++j) {
            p[j] = rng.normal();
            q[j] = rng.normal();
        }
        ArnoldTrial t = arnold_trial(A, p, q, disc_tol);
        if (!t.retained) continue;
        ++retained;
        if (t.intersections == 2) ++twos;
        if (t.intersections == 0) ++zeros;
        if (t.intersections != t.tangencies) {
            ++mismatches;
            cert.pass = false;
            if (cert.witness.empty())
                cert.witness = "trial " + std::to_string(i) + ": " +
                               std::to_string(t.intersections) + " vs " +
                               std::to_string(t.tangencies);
        }
    }
    cert.margin = retained > 0 ? 1.0 - static_cast<double>(mismatches) / retained : 0.0;
    cert.details = {{"n_lines", n_lines}, {"retained", retained}, {"mismatches", mismatches},
                    {"count_2", twos}, {"count_0", zeros}, {"disc_tol", disc_tol}};
    if (retained == 0) cert.pass = false;
    return cert;
}

double duality_involution_error(const Eigen::Matrix4d& A) {
    Eigen::Matrix4d back = A.inverse().inverse();
    return (back - A).norm() / A.norm();
}

}  // namespace ccgeo
