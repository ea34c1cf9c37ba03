#include "ccgeo/quadforms.hpp"

#include <cmath>

namespace ccgeo {

QuadraticForm::QuadraticForm(Eigen::MatrixXd m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument("QuadraticForm: matrix must be square and nonempty");
    mat_ = 0.5 * (m + m.transpose());
}

bool QuadraticForm::nondegenerate() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double scale = ev.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    return ev.cwiseAbs().minCoeff() > kTolDegenerate * scale;
}

nlohmann::json QuadraticForm::to_json() const {
    nlohmann::json j;
    j["dim"] = dim();
    std::vector<double> upper;
    for (int i = 0; i < dim(); ++i)
        for (int k = i; k < dim(); ++k) upper.push_back(mat_(i, k));
    j["upper"] = upper;
    return j;
}

QuadraticForm QuadraticForm::from_json(const nlohmann::json& j) {
    int n = j.at("dim").get<int>();
    auto upper = j.at("upper").get<std::vector<double>>();
    if (static_cast<int>(upper.size()) != n * (n + 1) / 2)
        throw std::invalid_argument("QuadraticForm::from_json: wrong upper-triangle size");
    Eigen::MatrixXd m(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k) {
            m(i, k) = upper[idx];
            m(k, i) = upper[idx];
            ++idx;
        }
    return QuadraticForm(m);
}

QuadraticForm standard_form(int k, int l) {
    if (k < 1 || l < 1) throw std::invalid_argument("standard_form: k, l must be >= 1");
    Eigen::VectorXd d(k + l);
    d.head(k).setOnes();
    d.tail(l).setConstant(-1.0);
    return QuadraticForm(d.asDiagonal());
}

Signature signature_of(const QuadraticForm& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.matrix(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double tol = QuadraticForm::kTolDegenerate * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Signature s;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] > tol)
            ++s.plus;
        else if (ev[i] < -tol)
            ++s.minus;
        else
            ++s.zero;
    }
    return s;
}

QuadraticForm dual_form(const QuadraticForm& q) {
    if (!q.nondegenerate()) throw DegenerateForm("dual_form: form is degenerate");
    return QuadraticForm(q.matrix().inverse());
}

double dual_value(const QuadraticForm& q, const Eigen::VectorXd& ell) {
    if (!q.nondegenerate()) throw DegenerateForm("dual_value: form is degenerate");
    Eigen::VectorXd y = q.matrix().ldlt().solve(ell);
    return ell.dot(y);
}

Eigen::MatrixXd hyperplane_basis(const Eigen::VectorXd& ell) {
    const int n = static_cast<int>(ell.size());
    double norm = ell.norm();
    if (norm == 0.0) throw ZeroCovector("hyperplane_basis: zero covector");
    Eigen::VectorXd u = ell / norm;
    // Householder reflector sending e_s -> u, with s chosen for stability.
    int s;
    u.cwiseAbs().maxCoeff(&s);
    Eigen::VectorXd v = u;
    v[s] += (u[s] >= 0.0 ? 1.0 : -1.0);
    v.normalize();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * v * v.transpose();
    // Column s of h is +-u; the remaining columns span {ell = 0}.
    Eigen::MatrixXd basis(n, n - 1);
    int col = 0;
    for (int j = 0; j < n; ++j)
        if (j != s) basis.col(col++) = h.col(j);
    return basis;
}

std::pair<QuadraticForm, Signature> restrict_to_hyperplane(const QuadraticForm& q,
                                                           const Eigen::VectorXd& ell) {
    Eigen::MatrixXd basis = hyperplane_basis(ell);
    QuadraticForm restricted(basis.transpose() * q.matrix() * basis);
    return {restricted, signature_of(restricted)};
}

Signature predict_restricted_signature(const QuadraticForm& q, const Eigen::VectorXd& ell) {
    if (ell.norm() == 0.0) throw ZeroCovector("predict_restricted_signature: zero covector");
    Signature sig = signature_of(q);
    if (sig.zero != 0) throw DegenerateForm("predict_restricted_signature: form is degenerate");
    const int k = sig.plus, l = sig.minus;
    double qstar = dual_value(q, ell);
    double scale = q.matrix().cwiseAbs().maxCoeff() > 0
                       ? ell.squaredNorm() / q.matrix().operatorNorm()
                       : ell.squaredNorm();
    double tol = QuadraticForm::kTolDegenerate * std::max(scale, std::abs(qstar) * 1e-16);
    if (qstar < -tol) return Signature{k, l - 1, 0};
    if (qstar > tol) return Signature{k - 1, l, 0};
    return Signature{k - 1, l - 1, 1};
}

}  // namespace ccgeo
