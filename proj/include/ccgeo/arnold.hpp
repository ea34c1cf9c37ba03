#pragma once

#include <Eigen/Dense>

#include "ccgeo/certificate.hpp"

namespace ccgeo {

// Counting for a projective quadric {x^T A x = 0} in RP^3 against a line
// spanned by two points p, q in R^4.

// The binary quadratic s^2 A(p,p) + 2 s t A(p,q) + t^2 A(q,q); its real
// projective root count (0, 1, or 2) is the number of intersection points.
struct PencilForm {
    double app, apq, aqq;
    double discriminant() const { return apq * apq - app * aqq; }
    int root_count(double tol = 0.0) const {
        double d = discriminant();
        return d > tol ? 2 : (d < -tol ? 0 : 1);
    }
};

PencilForm restrict_to_span(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                            const Eigen::Vector4d& q);

// Covector basis of planes containing the line span(p, q): a 4x2 matrix whose
// columns span the annihilator of {p, q}.
Eigen::Matrix<double, 4, 2> plane_pencil_basis(const Eigen::Vector4d& p, const Eigen::Vector4d& q);

// Tangency count: planes of the pencil tangent to the quadric, i.e. roots of
// the dual form A^{-1} restricted to the pencil.
PencilForm dual_pencil_form(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                            const Eigen::Vector4d& q);

// Signature (2,2) quadric x1^2 + x2^2 - x3^2 - x4^2 (the doubly ruled case).
Eigen::Matrix4d hyperbolic_quadric();

struct ArnoldTrial {
    int intersections = 0;
    int tangencies = 0;
    bool retained = false;  // false when either discriminant is near zero
};

ArnoldTrial arnold_trial(const Eigen::Matrix4d& A, const Eigen::Vector4d& p,
                         const Eigen::Vector4d& q, double disc_tol);

// n random lines: intersection count must equal tangency count on every
// retained (non-tangential) trial.
Certificate arnold_certificate(const Eigen::Matrix4d& A, int n_lines, uint64_t seed,
                               double disc_tol = 1e-6);

// Duality involution: dual of the dual form equals the original.
double duality_involution_error(const Eigen::Matrix4d& A);

}  // namespace ccgeo
