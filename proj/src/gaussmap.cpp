#include "ccgeo/gaussmap.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ccgeo/rng.hpp"

namespace ccgeo {

ScalarFieldOracle quadric_oracle(int k, int l, double epsilon) {
    auto q = standard_form(k, l);
    const int n = k + l;
    ScalarFieldOracle o;
    o.dim = n;
    Eigen::MatrixXd m = q.matrix();
    o.value = [m, epsilon](const Eigen::VectorXd& x) { return x.dot(m * x) - epsilon; };
    o.gradient = [m](const Eigen::VectorXd& x) { return Eigen::VectorXd(2.0 * m * x); };
    o.hessian = [m](const Eigen::VectorXd&) { return Eigen::MatrixXd(2.0 * m); };
    return o;
}

ScalarFieldOracle sphere_oracle(int n) {
    ScalarFieldOracle o;
    o.dim = n;
    o.value = [](const Eigen::VectorXd& x) { return x.squaredNorm() - 1.0; };
    o.gradient = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(2.0 * x); };
    o.hessian = [n](const Eigen::VectorXd&) {
        return Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(n, n));
    };
    return o;
}

ScalarFieldOracle torus_oracle(double major, double minor) {
    ScalarFieldOracle o;
    o.dim = 3;
    o.value = [major, minor](const Eigen::VectorXd& x) {
        double s = std::hypot(x[0], x[1]) - major;
        return s * s + x[2] * x[2] - minor * minor;
    };
    o.gradient = [major](const Eigen::VectorXd& x) {
        double rho = std::hypot(x[0], x[1]);
        double s = rho - major;
        Eigen::Vector3d g(2.0 * s * x[0] / rho, 2.0 * s * x[1] / rho, 2.0 * x[2]);
        return Eigen::VectorXd(g);
    };
    o.hessian = [major](const Eigen::VectorXd& x) {
        double rho = std::hypot(x[0], x[1]);
        double s = rho - major;
        Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
        // d/dxi of 2 s x_i / rho
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double dij = (i == j) ? 1.0 : 0.0;
                double drho = x[j] / rho;
                h(i, j) = 2.0 * (drho * x[i] / rho + s * (dij / rho - x[i] * x[j] / (rho * rho * rho)));
            }
        h(2, 2) = 2.0;
        return Eigen::MatrixXd(h);
    };
    return o;
}

Eigen::VectorXd gauss_map(const ScalarFieldOracle& oracle, const Eigen::VectorXd& point) {
    Eigen::VectorXd g = oracle.gradient(point);
    double n = g.norm();
    if (n <= kTolGrad) throw SingularPoint("gauss_map: gradient too small");
    return g / n;
}

Eigen::VectorXd gauss_quadric_closed_form(int k, int l, const Eigen::VectorXd& point) {
    if (point.norm() == 0.0) throw ZeroPoint("gauss_quadric_closed_form: zero point");
    Eigen::VectorXd g = point;
    g.tail(l) *= -1.0;
    return g / g.norm();
}

Signature second_fundamental_signature(const ScalarFieldOracle& oracle,
                                       const Eigen::VectorXd& point) {
    Eigen::VectorXd g = oracle.gradient(point);
    double gn = g.norm();
    if (gn <= kTolGrad) throw SingularPoint("second_fundamental_signature: singular point");
    Eigen::MatrixXd basis = hyperplane_basis(g);
    Eigen::MatrixXd second = basis.transpose() * oracle.hessian(point) * basis / gn;
    if (second.rows() == 2) {
        // Surfaces can have principal curvatures many orders of magnitude
        // apart (nearly flat faces), where a zero threshold relative to the
        // largest eigenvalue misclassifies the small one.  For the 2x2 case
        // the determinant sign separates the signatures at the rounding noise
        // floor of the entries instead.
        double det = second(0, 0) * second(1, 1) - second(0, 1) * second(1, 0);
        double scale = second.norm();
        double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale * scale;
        if (std::fabs(det) <= noise) {
            double tr = second.trace();
            return tr > 0 ? Signature{1, 0, 1} : (tr < 0 ? Signature{0, 1, 1} : Signature{0, 0, 2});
        }
        if (det < 0) return Signature{1, 1, 0};
        return second.trace() > 0 ? Signature{2, 0, 0} : Signature{0, 2, 0};
    }
    return signature_of(QuadraticForm(second));
}

namespace {

// Newton iteration along the gradient direction onto {P = 0}.
bool project_to_surface(const ScalarFieldOracle& oracle, Eigen::VectorXd& x) {
    for (int it = 0; it < 60; ++it) {
        double v = oracle.value(x);
        double scale = std::max(1.0, x.squaredNorm());
        if (std::abs(v) <= kTolOnSurface * scale) return true;
        Eigen::VectorXd g = oracle.gradient(x);
        double g2 = g.squaredNorm();
        if (g2 < 1e-18) return false;
        x -= (v / g2) * g;
    }
    return false;
}

}  // namespace

SurfaceSampleSet sample_surface(const ScalarFieldOracle& oracle, double box_radius,
                                int n_samples, std::uint64_t seed) {
    static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13};
    SurfaceSampleSet set;
    set.seed = seed;
    set.box_radius = box_radius;
    const int n = oracle.dim;
    std::uint64_t index = seed * 7919;
    int attempts = 0;
    while (static_cast<int>(set.samples.size()) < n_samples && attempts < 200 * n_samples) {
        ++attempts;
        ++index;
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
            x[i] = box_radius * (2.0 * halton(index, primes[i % 6]) - 1.0);
        if (!project_to_surface(oracle, x)) continue;
        if (x.cwiseAbs().maxCoeff() > 2.0 * box_radius) continue;
        Eigen::VectorXd g = oracle.gradient(x);
        if (g.norm() <= kTolGrad) continue;
        SurfaceSample s;
        s.point = x;
        s.normal = g / g.norm();
        s.second_form = second_fundamental_signature(oracle, x);
        set.samples.push_back(std::move(s));
    }
    return set;
}

Certificate hyperbolicity_certificate(const ScalarFieldOracle& oracle, double box_radius,
                                      int n_samples, const Signature& expected,
                                      std::uint64_t seed) {
    Certificate cert;
    cert.name = "hyperbolicity";
    auto set = sample_surface(oracle, box_radius, n_samples, seed);
    if (set.samples.empty()) {
        cert.pass = false;
        cert.witness = "no on-surface samples found";
        return cert;
    }
    cert.pass = true;
    cert.margin = static_cast<double>(set.samples.size());
    for (const auto& s : set.samples) {
        if (!s.second_form.same_unordered(expected)) {
            cert.pass = false;
            std::ostringstream os;
            os << "signature " << s.second_form.str() << " at point [";
            for (int i = 0; i < s.point.size(); ++i) os << (i ? "," : "") << s.point[i];
            os << "]";
            cert.witness = os.str();
            break;
        }
    }
    cert.details["samples"] = set.samples.size();
    cert.details["expected"] = expected.str();
    return cert;
}

double RolleField::value(const Eigen::VectorXd& x) const {
    double av = a(x), bv = b(x);
    return std::sqrt(av * av + epsilon) - bv;
}

Eigen::VectorXd RolleField::gradient(const Eigen::VectorXd& x) const {
    double av = a(x), bv = b(x);
    Eigen::VectorXd g(x.size());
    double sa = std::sqrt(av * av + epsilon);
    g.head(k) = x.head(k) / sa;
    g.tail(l) = -x.tail(l) / bv;
    return g;
}

double rolle_value(const RolleField& field, const Eigen::VectorXd& point) {
    return field.value(point);
}

Certificate rolle_gradient_identity_check(const RolleField& field,
                                          const Eigen::VectorXd& point) {
    const double b = field.b(point);
    const double t = field.value(point);
    if (b <= 1e-12) throw std::invalid_argument("rolle_gradient_identity_check: b ~ 0");
    if (t >= 0.0) throw std::invalid_argument("rolle_gradient_identity_check: requires f < 0");

    const double lambda = (b + t) / b;
    Eigen::VectorXd scaled = point;
    scaled.tail(field.l) *= lambda;

    auto q = standard_form(field.k, field.l);
    Eigen::VectorXd df = field.gradient(point).normalized();
    Eigen::VectorXd dq = q.gradient(scaled).normalized();
    // acos(dot) loses half the mantissa near parallel vectors; the chord
    // formula is exact down to rounding for small angles.
    double chord = std::min((df - dq).norm(), (df + dq).norm());
    double angle = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    double level_residual = std::abs(q(scaled) + field.epsilon);

    Certificate cert;
    cert.name = "rolle_gradient_identity";
    cert.pass = (angle < 1e-8) && (level_residual < 1e-10);
    cert.margin = angle;
    cert.details["angle_rad"] = angle;
    cert.details["level_residual"] = level_residual;
    cert.details["lambda"] = lambda;
    return cert;
}

Certificate containment_certificate(const SurfaceSampleSet& samples, int k, int l,
                                    double epsilon, double tol) {
    Certificate cert;
    cert.name = "rolle_containment";
    if (samples.samples.empty()) {
        cert.pass = false;
        cert.witness = "empty sample set";
        return cert;
    }
    RolleField field{k, l, epsilon};
    double worst = std::numeric_limits<double>::infinity();
    const SurfaceSample* worst_sample = nullptr;
    for (const auto& s : samples.samples) {
        double v = field.value(s.point);
        if (v < worst) {
            worst = v;
            worst_sample = &s;
        }
    }
    cert.margin = worst;
    cert.pass = worst >= -tol;
    if (!cert.pass && worst_sample) {
        std::ostringstream os;
        os << "rolle value " << worst << " at [";
        for (int i = 0; i < worst_sample->point.size(); ++i)
            os << (i ? "," : "") << worst_sample->point[i];
        os << "]";
        cert.witness = os.str();
    }
    return cert;
}

Certificate radial_projection_injectivity(const SurfaceSampleSet& samples, double cell_deg) {
    Certificate cert;
    cert.name = "radial_projection_injectivity";
    cert.pass = true;
    cert.margin = std::numeric_limits<double>::infinity();

    const double cell = cell_deg * M_PI / 180.0;
    struct CellEntry {
        long key;
        const SurfaceSample* s;
    };
    std::vector<CellEntry> entries;
    entries.reserve(samples.samples.size());

    for (const auto& s : samples.samples) {
        if (s.point.size() != 3) {
            cert.pass = false;
            cert.witness = "ambient dimension != 3";
            return cert;
        }
        double r = s.point.norm();
        // (i) no tangent plane through the origin
        double fold = std::abs(s.normal.dot(s.point)) / r;
        cert.margin = std::min(cert.margin, fold - kTolFold);
        if (fold <= kTolFold) {
            cert.pass = false;
            std::ostringstream os;
            os << "tangent plane through origin near [" << s.point[0] << "," << s.point[1]
               << "," << s.point[2] << "]";
            cert.witness = os.str();
            return cert;
        }
        Eigen::Vector3d dir = s.point / r;
        long itheta = std::lround(std::floor(std::acos(std::clamp(dir[2], -1.0, 1.0)) / cell));
        long iphi = std::lround(std::floor((std::atan2(dir[1], dir[0]) + M_PI) / cell));
        entries.push_back({itheta * 100000 + iphi, &s});
    }

    // (ii) no two samples from distinct neighborhoods in one direction cell.
    std::sort(entries.begin(), entries.end(),
              [](const CellEntry& a, const CellEntry& b) { return a.key < b.key; });
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].key == entries[i].key) {
            const auto& p = entries[i].s->point;
            const auto& q = entries[j].s->point;
            double scale = std::max(p.norm(), q.norm());
            double sep = (p - q).norm();
            // Same-sheet neighbours inside a cell are within ~cell * radius of
            // each other.  Larger separations can still be one sheet seen
            // nearly edge-on (e.g. near an asymptotic cone, where a 1-degree
            // cone of directions sweeps a long, almost radial patch), so a
            // flagged pair is confirmed only if the chord between the two
            // points is transverse to the surface at either end -- a chord
            // lying in both tangent planes stays on one sheet.
            double transverse = 0.0;
            if (sep > 0) {
                Eigen::VectorXd chord = (q - p) / sep;
                transverse = std::max(std::abs(entries[i].s->normal.dot(chord)),
                                      std::abs(entries[j].s->normal.dot(chord)));
            }
            if (sep > 5.0 * scale * cell && transverse > 0.3) {
                cert.pass = false;
                std::ostringstream os;
                os << "direction cell collision between [" << p[0] << "," << p[1] << "," << p[2]
                   << "] and [" << q[0] << "," << q[1] << "," << q[2] << "]";
                cert.witness = os.str();
                return cert;
            }
            ++j;
        }
    }
    cert.details["samples"] = samples.samples.size();
    cert.details["cell_deg"] = cell_deg;
    return cert;
}

std::string SurfaceSampleSet::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    if (samples.empty()) return "";
    int n = static_cast<int>(samples.front().point.size());
    for (int i = 0; i < n; ++i) os << "x" << i << ",";
    for (int i = 0; i < n; ++i) os << "n" << i << ",";
    os << "sig_plus,sig_minus,sig_zero\n";
    for (const auto& s : samples) {
        for (int i = 0; i < n; ++i) os << s.point[i] << ",";
        for (int i = 0; i < n; ++i) os << s.normal[i] << ",";
        os << s.second_form.plus << "," << s.second_form.minus << "," << s.second_form.zero
           << "\n";
    }
    return os.str();
}

SurfaceSampleSet SurfaceSampleSet::from_csv(const std::string& text) {
    SurfaceSampleSet set;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) return set;
    int cols = 1;
    for (char c : line)
        if (c == ',') ++cols;
    int n = (cols - 3) / 2;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
        if (static_cast<int>(vals.size()) != cols) continue;
        SurfaceSample s;
        s.point = Eigen::Map<Eigen::VectorXd>(vals.data(), n);
        s.normal = Eigen::Map<Eigen::VectorXd>(vals.data() + n, n);
        s.second_form = Signature{static_cast<int>(vals[2 * n]), static_cast<int>(vals[2 * n + 1]),
                                  static_cast<int>(vals[2 * n + 2])};
        set.samples.push_back(std::move(s));
    }
    return set;
}

}  // namespace ccgeo
