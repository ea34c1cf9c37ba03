#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "json.hpp"

namespace ccgeo {

struct DegenerateForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroCovector : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inertia of a symmetric form: eigenvalue counts above, below, and inside the
// zero threshold. plus + minus + zero always equals the ambient dimension.
struct Signature {
    int plus = 0;
    int minus = 0;
    int zero = 0;

    bool operator==(const Signature&) const = default;
    // Orientation of a normal is a convention, so (p,q) and (q,p) describe the
    // same local shape; several callers compare up to that swap.
    bool same_unordered(const Signature& o) const {
        return (*this == o) || (plus == o.minus && minus == o.plus && zero == o.zero);
    }
    std::string str() const {
        return "(" + std::to_string(plus) + "," + std::to_string(minus) + "," +
               std::to_string(zero) + ")";
    }
};

// Symmetric real quadratic form of small dimension with dense storage.
class QuadraticForm {
  public:
    // Relative eigenvalue threshold deciding degeneracy and signature zeros.
    static constexpr double kTolDegenerate = 1e-9;

    explicit QuadraticForm(Eigen::MatrixXd m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXd& matrix() const { return mat_; }

    double operator()(const Eigen::VectorXd& x) const { return x.dot(mat_ * x); }
    double bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
        return x.dot(mat_ * y);
    }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return 2.0 * mat_ * x; }

    bool nondegenerate() const;

    nlohmann::json to_json() const;
    static QuadraticForm from_json(const nlohmann::json& j);

  private:
    Eigen::MatrixXd mat_;  // symmetrized on construction
};

// diag(+1 x k, -1 x l).
QuadraticForm standard_form(int k, int l);

Signature signature_of(const QuadraticForm& q);

// Form q* on covectors; its matrix is the inverse of q's matrix.
QuadraticForm dual_form(const QuadraticForm& q);

// q*(ell, ell), the quantity whose sign drives the restricted signature.
double dual_value(const QuadraticForm& q, const Eigen::VectorXd& ell);

// Restriction of q to the hyperplane {ell = 0}, expressed in an orthonormal
// (Householder-complement) basis of the hyperplane.
std::pair<QuadraticForm, Signature> restrict_to_hyperplane(const QuadraticForm& q,
                                                           const Eigen::VectorXd& ell);

// Signature the restriction must have, by the sign of q*(ell, ell):
// (k,l-1) if negative, (k-1,l-1) plus kernel 1 if ~zero, (k-1,l) if positive.
Signature predict_restricted_signature(const QuadraticForm& q, const Eigen::VectorXd& ell);

// Orthonormal basis of {ell = 0} as columns of an n x (n-1) matrix.
Eigen::MatrixXd hyperplane_basis(const Eigen::VectorXd& ell);

}  // namespace ccgeo
