#include "ccgeo/strip.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace ccgeo {

double bump_g(double z) {
    double w = 1.0 - z * z;
    return w > 0 ? std::exp(-1.0 / w) : 0.0;
}

double bump_g_deriv(double z) {
    double w = 1.0 - z * z;
    if (w <= 0) return 0.0;
    return std::exp(-1.0 / w) * (-2.0 * z / (w * w));
}

double bump_beta(int j, double z) {
    return std::cos(2.0 * M_PI * j * z) * bump_g(2.0 * z);
}

static double bump_beta_deriv(int j, double z) {
    double c = 2.0 * M_PI * j;
    return -c * std::sin(c * z) * bump_g(2.0 * z) + std::cos(c * z) * 2.0 * bump_g_deriv(2.0 * z);
}

namespace {

// RK4 for y'' = rhs(z, y), recording (y, y') at every node from z0 onward.
struct Trace {
    std::vector<double> y, dy;
};

Trace integrate(double z0, double y0, double dy0, int n_steps, double h,
                const std::function<double(double, double)>& rhs) {
    Trace t;
    t.y.reserve(n_steps + 1);
    t.dy.reserve(n_steps + 1);
    double y = y0, dy = dy0, z = z0;
    t.y.push_back(y);
    t.dy.push_back(dy);
    for (int i = 0; i < n_steps; ++i) {
        double k1y = dy, k1d = rhs(z, y);
        double k2y = dy + 0.5 * h * k1d, k2d = rhs(z + 0.5 * h, y + 0.5 * h * k1y);
        double k3y = dy + 0.5 * h * k2d, k3d = rhs(z + 0.5 * h, y + 0.5 * h * k2y);
        double k4y = dy + h * k3d, k4d = rhs(z + h, y + h * k3y);
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
        z = z0 + (i + 1) * h;
        t.y.push_back(y);
        t.dy.push_back(dy);
    }
    return t;
}

SampledFunction mirror_to_full(double z_max, double h, const Trace& upper, bool even) {
    // upper holds nodes 0..n over [0, z_max]; reflect onto [-z_max, 0).
    int n = static_cast<int>(upper.y.size()) - 1;
    std::vector<double> v(2 * n + 1), d(2 * n + 1);
    for (int i = 0; i <= n; ++i) {
        v[n + i] = upper.y[i];
        d[n + i] = upper.dy[i];
        double s = even ? 1.0 : -1.0;
        v[n - i] = s * upper.y[i];
        d[n - i] = -s * upper.dy[i];
    }
    return SampledFunction(-z_max, z_max, std::move(v), std::move(d));
}

}  // namespace

OdePair solve_even_odd(double z_max, double h_max) {
    int per_unit = static_cast<int>(std::ceil(1.0 / h_max));
    double h = 1.0 / per_unit;
    int n = static_cast<int>(std::lround(z_max * per_unit));
    auto rhs = [](double z, double y) { return bump_g(z) * y; };
    Trace t1 = integrate(0.0, 1.0, 0.0, n, h, rhs);
    Trace t2 = integrate(0.0, 0.0, 1.0, n, h, rhs);
    return {mirror_to_full(z_max, h, t1, true), mirror_to_full(z_max, h, t2, false)};
}

double wronskian_drift(const OdePair& fs) {
    const auto &f1 = fs.f1, &f2 = fs.f2;
    int n = f1.size();
    double w0 = f1.values()[n / 2] * f2.derivs()[n / 2] - f1.derivs()[n / 2] * f2.values()[n / 2];
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        double w = f1.values()[i] * f2.derivs()[i] - f1.derivs()[i] * f2.values()[i];
        worst = std::max(worst, std::fabs(w - w0));
    }
    return worst;
}

double cone_rescale_factor(const OdePair& fs) {
    double r2 = std::hypot(fs.f1(2.0), fs.f2(2.0));
    double slope = std::hypot(fs.f1.derivative(2.0), fs.f2.derivative(2.0));
    double s = std::min({1.0, 0.5 / r2, std::sqrt(0.5) / slope});
    return s;
}

SampledFunction solve_u(const SampledFunction& rho, const SampledFunction& f, bool even) {
    double h = f.step();
    int n = f.size();
    int i_start = static_cast<int>(std::lround((-0.5 - f.z_min()) / h));
    auto src = [&](double z, double) { return rho(z) * f(z); };
    Trace t = integrate(f.grid_z(i_start), 0.0, 0.0, n - 1 - i_start, h, src);
    std::vector<double> v(n, 0.0), d(n, 0.0);
    for (int i = i_start; i < n; ++i) {
        v[i] = t.y[i - i_start];
        d[i] = t.dy[i - i_start];
    }
    // Enforce parity exactly: mirror the upper half.
    int mid = n / 2;
    double s = even ? 1.0 : -1.0;
    for (int i = 1; i <= mid; ++i) {
        v[mid - i] = s * v[mid + i];
        d[mid - i] = -s * d[mid + i];
    }
    return SampledFunction(f.z_min(), f.z_max(), std::move(v), std::move(d));
}

namespace {

SampledFunction rho_from_coeffs(const Eigen::VectorXd& c, const SampledFunction& like) {
    int n = like.size();
    std::vector<double> v(n, 0.0), d(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = like.grid_z(i);
        if (std::fabs(z) >= 0.5) continue;
        double s = 0, ds = 0;
        for (int k = 0; k < c.size(); ++k) {
            s += c[k] * bump_beta(2 * k, z);
            ds += c[k] * bump_beta_deriv(2 * k, z);
        }
        v[i] = s;
        d[i] = ds;
    }
    return SampledFunction(like.z_min(), like.z_max(), std::move(v), std::move(d));
}

double max_rho_over_g(const SampledFunction& rho) {
    double worst = 0;
    for (int i = 0; i < rho.size(); ++i) {
        double z = rho.grid_z(i);
        if (std::fabs(z) >= 0.5) continue;
        double g = bump_g(z);
        if (g > 1e-300) worst = std::max(worst, std::fabs(rho.values()[i]) / g);
    }
    return worst;
}

}  // namespace

RhoResult build_rho(const OdePair& fs, int m, double h_max) {
    if (m < 6) throw std::invalid_argument("build_rho: need m >= 6");
    int per_unit = static_cast<int>(std::ceil(1.0 / h_max));
    double h = 1.0 / per_unit;
    int n_steps = per_unit;  // from -1/2 to +1/2

    // Obstruction matrix: for each basis function, the slope and intercept of
    // each u_i on z >= 1/2 (where u'' = 0, so u is exactly the recorded ray).
    Eigen::MatrixXd A(4, m);
    for (int k = 0; k < m; ++k) {
        int j = 2 * k;
        for (int fi = 0; fi < 2; ++fi) {
            const SampledFunction& f = fi == 0 ? fs.f1 : fs.f2;
            auto src = [&](double z, double) { return bump_beta(j, z) * f(z); };
            Trace t = integrate(-0.5, 0.0, 0.0, n_steps, h, src);
            double slope = t.dy.back();
            double intercept = t.y.back() - 0.5 * slope;
            A(2 * fi, k) = intercept;
            A(2 * fi + 1, k) = slope;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    double smax = sv.size() ? sv[0] : 0.0;

    // Obstruction kernel basis: right singular vectors with negligible
    // singular value (plus those past the 4 possible nonzero ones).
    std::vector<int> kernel_cols;
    for (int k = 0; k < m; ++k)
        if (k >= sv.size() || sv[k] <= 1e-10 * std::max(smax, 1.0)) kernel_cols.push_back(k);
    int dim = static_cast<int>(kernel_cols.size());
    if (dim == 0) throw std::runtime_error("build_rho: obstruction kernel is trivial");

    // Maximize the perpendicular midline displacement over the whole kernel
    // subspace, normalized by the max |rho/g| that fixes the final scaling.
    // Both sides are positively homogeneous, so search the unit sphere:
    // random directions followed by a coordinate polish.
    std::vector<SampledFunction> rho_k, u1_k, u2_k;
    for (int k : kernel_cols) {
        rho_k.push_back(rho_from_coeffs(svd.matrixV().col(k), fs.f1));
        u1_k.push_back(solve_u(rho_k.back(), fs.f1, true));
        u2_k.push_back(solve_u(rho_k.back(), fs.f2, false));
    }
    // Scoring tables on a thinned grid around the perturbation window.
    std::vector<int> disp_idx, ratio_idx;
    std::vector<double> inv_fn, inv_g;
    for (int i = 0; i < fs.f1.size(); i += 4) {
        double z = fs.f1.grid_z(i);
        if (std::fabs(z) <= 0.55)
            disp_idx.push_back(i), inv_fn.push_back(1.0 / std::hypot(fs.f1.values()[i],
                                                                     fs.f2.values()[i]));
        double g = bump_g(z);
        if (std::fabs(z) < 0.5 && g > 1e-300) ratio_idx.push_back(i), inv_g.push_back(1.0 / g);
    }
    auto score = [&](const Eigen::VectorXd& v) {
        double disp = 0, ratio = 0;
        for (size_t a = 0; a < disp_idx.size(); ++a) {
            int i = disp_idx[a];
            double c1 = 0, c2 = 0;
            for (int k = 0; k < dim; ++k) {
                c1 += v[k] * u1_k[k].values()[i];
                c2 += v[k] * u2_k[k].values()[i];
            }
            double cross = c1 * fs.f2.values()[i] - c2 * fs.f1.values()[i];
            disp = std::max(disp, std::fabs(cross) * inv_fn[a]);
        }
        for (size_t a = 0; a < ratio_idx.size(); ++a) {
            int i = ratio_idx[a];
            double r = 0;
            for (int k = 0; k < dim; ++k) r += v[k] * rho_k[k].values()[i];
            ratio = std::max(ratio, std::fabs(r) * inv_g[a]);
        }
        return ratio > 1e-300 ? disp / ratio : -1.0;
    };

    uint64_t state = 0x9e3779b97f4a7c15ULL;
    auto next_normal = [&]() {
        // xorshift-based uniform pair -> Box-Muller; deterministic.
        auto u01 = [&]() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return (state >> 11) * (1.0 / 9007199254740992.0);
        };
        double a = std::max(u01(), 1e-300), b = u01();
        return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * M_PI * b);
    };
    Eigen::VectorXd best_v = Eigen::VectorXd::Unit(dim, 0);
    double best_score = score(best_v);
    for (int trial = 0; trial < 2000; ++trial) {
        Eigen::VectorXd v(dim);
        for (int k = 0; k < dim; ++k) v[k] = next_normal();
        v.normalize();
        double sc = score(v);
        if (sc > best_score) {
            best_score = sc;
            best_v = v;
        }
    }
    for (double delta = 0.25; delta > 1e-6; delta *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int k = 0; k < dim; ++k)
                for (double sgn : {1.0, -1.0}) {
                    Eigen::VectorXd v = best_v;
                    v[k] += sgn * delta;
                    v.normalize();
                    double sc = score(v);
                    if (sc > best_score) {
                        best_score = sc;
                        best_v = v;
                        improved = true;
                    }
                }
        }
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < dim; ++k) c += best_v[k] * svd.matrixV().col(kernel_cols[k]);
    RhoResult best;
    best.rho = rho_from_coeffs(c, fs.f1);
    double ratio = max_rho_over_g(best.rho);
    if (ratio < 1e-12) throw std::runtime_error("build_rho: degenerate kernel direction");
    double s = 0.5 / ratio;
    best.rho = best.rho.scaled(s);
    best.coeffs = c * s;
    best.obstruction = A;
    best.singular_values = sv;
    return best;
}

StripModel build_strip(int m, double h_max, double z_max) {
    OdePair fs = solve_even_odd(z_max, h_max);
    RhoResult rr = build_rho(fs, m, h_max);
    double s = cone_rescale_factor(fs);

    StripModel out;
    out.scale = s;
    out.f1 = fs.f1.scaled(s);
    out.f2 = fs.f2.scaled(s);
    out.u1 = solve_u(rr.rho, out.f1, true);
    out.u2 = solve_u(rr.rho, out.f2, false);
    out.rho = rr.rho;
    out.rho_coeffs = rr.coeffs;
    out.g = SampledFunction::from_callable(-z_max, z_max, fs.f1.size(), bump_g, bump_g_deriv);
    return out;
}

double StripModel::support(double z, double theta) const {
    double a = std::cos(theta), b = std::sin(theta);
    double psi = a * u1(z) + b * u2(z);
    double phi = a * f1(z) + b * f2(z);
    return psi + std::fabs(phi);
}

double StripModel::perp_displacement(double z) const {
    double a = f1(z), b = f2(z);
    return (u1(z) * b - u2(z) * a) / std::hypot(a, b);
}

nlohmann::json StripModel::to_json() const {
    std::vector<double> c(rho_coeffs.data(), rho_coeffs.data() + rho_coeffs.size());
    return {{"scale", scale}, {"f1", f1.to_json()}, {"f2", f2.to_json()},
            {"u1", u1.to_json()}, {"u2", u2.to_json()}, {"g", g.to_json()},
            {"rho", rho.to_json()}, {"rho_coeffs", c}};
}

StripModel StripModel::from_json(const nlohmann::json& j) {
    StripModel s;
    s.scale = j.at("scale").get<double>();
    s.f1 = SampledFunction::from_json(j.at("f1"));
    s.f2 = SampledFunction::from_json(j.at("f2"));
    s.u1 = SampledFunction::from_json(j.at("u1"));
    s.u2 = SampledFunction::from_json(j.at("u2"));
    s.g = SampledFunction::from_json(j.at("g"));
    s.rho = SampledFunction::from_json(j.at("rho"));
    auto c = j.at("rho_coeffs").get<std::vector<double>>();
    s.rho_coeffs = Eigen::Map<Eigen::VectorXd>(c.data(), c.size());
    return s;
}

Certificate strip_invariants_certificate(const StripModel& s) {
    Certificate cert;
    cert.name = "strip_invariants";
    cert.pass = true;
    auto record = [&](const std::string& what, double value, double tol) {
        bool ok = value <= tol;
        cert.details[what] = {{"value", value}, {"tol", tol}, {"pass", ok}};
        if (!ok) {
            cert.pass = false;
            if (cert.witness.empty()) cert.witness = what;
        }
    };

    // ODE residuals by second differences at interior nodes.  The source is
    // averaged with the (1,10,1)/12 weights so the h^2 truncation term of the
    // central difference cancels (Numerov consistency).
    auto ode_residual = [&](const SampledFunction& y, auto coeff_times_y) {
        double worst = 0;
        for (int i = 1; i + 1 < y.size(); ++i) {
            double sm = coeff_times_y(y.grid_z(i - 1), i - 1);
            double s0 = coeff_times_y(y.grid_z(i), i);
            double sp = coeff_times_y(y.grid_z(i + 1), i + 1);
            worst = std::max(worst,
                             std::fabs(y.second_difference(i) - (sm + 10 * s0 + sp) / 12.0));
        }
        return worst;
    };
    double fmax = std::max(s.f1.max_abs(), s.f2.max_abs());
    record("ode_residual_f1",
           ode_residual(s.f1, [&](double z, int i) { return bump_g(z) * s.f1.values()[i]; }),
           1e-8 * fmax);
    record("ode_residual_f2",
           ode_residual(s.f2, [&](double z, int i) { return bump_g(z) * s.f2.values()[i]; }),
           1e-8 * fmax);
    record("ode_residual_u1",
           ode_residual(s.u1, [&](double, int i) { return s.rho.values()[i] * s.f1.values()[i]; }),
           1e-8 * std::max(1.0, fmax));
    record("ode_residual_u2",
           ode_residual(s.u2, [&](double, int i) { return s.rho.values()[i] * s.f2.values()[i]; }),
           1e-8 * std::max(1.0, fmax));

    record("parity_f1_even", s.f1.parity_asymmetry(false), 1e-9);
    record("parity_f2_odd", s.f2.parity_asymmetry(true), 1e-9);
    record("parity_u1_even", s.u1.parity_asymmetry(false), 1e-9);
    record("parity_u2_odd", s.u2.parity_asymmetry(true), 1e-9);
    record("parity_rho_even", s.rho.parity_asymmetry(false), 1e-9);

    record("wronskian_drift", wronskian_drift({s.f1, s.f2}), 1e-8);

    double tail = 0;
    for (int i = 0; i < s.u1.size(); ++i) {
        if (std::fabs(s.u1.grid_z(i)) < 0.5) continue;
        tail = std::max({tail, std::fabs(s.u1.values()[i]), std::fabs(s.u2.values()[i])});
    }
    record("u_support_tail", tail, 1e-9);

    double rho_excess = 0;
    for (int i = 0; i < s.rho.size(); ++i)
        rho_excess = std::max(rho_excess,
                              std::fabs(s.rho.values()[i]) - 0.5 * bump_g(s.rho.grid_z(i)));
    record("rho_le_half_g", rho_excess, 1e-12);

    record("cone_radius_at_2", std::hypot(s.f1(2.0), s.f2(2.0)), 0.5 + 1e-12);
    record("cone_slope_at_2", std::hypot(s.f1.derivative(2.0), s.f2.derivative(2.0)),
           std::sqrt(0.5) + 1e-12);

    cert.margin = s.perp_displacement(0.0) == 0 ? 0 : std::fabs(s.perp_displacement(0.25));
    return cert;
}

Certificate strip_cc_certificate(const StripModel& s, int n_theta) {
    Certificate cert;
    cert.name = "strip_convex_concave";
    cert.pass = true;
    int n = s.f1.size();
    double tol = 64.0 * 1e-16 * std::max({1.0, s.f1.max_abs(), s.f2.max_abs()});
    double worst = 1e300;
    const auto &F1 = s.f1.values(), &F2 = s.f2.values(), &U1 = s.u1.values(),
               &U2 = s.u2.values();
    for (int it = 0; it < n_theta; ++it) {
        double theta = M_PI * it / n_theta;
        double a = std::cos(theta), b = std::sin(theta);
        double pm = a * U1[0] + b * U2[0], p0 = a * U1[1] + b * U2[1];
        double qm = a * F1[0] + b * F2[0], q0 = a * F1[1] + b * F2[1];
        for (int i = 1; i + 1 < n; ++i) {
            double pp = a * U1[i + 1] + b * U2[i + 1];
            double qp = a * F1[i + 1] + b * F2[i + 1];
            // Only cells where phi keeps a definite sign across the stencil.
            if ((qm > 0 && q0 > 0 && qp > 0) || (qm < 0 && q0 < 0 && qp < 0)) {
                double sign = q0 > 0 ? 1.0 : -1.0;
                double d2 = (pm - 2 * p0 + pp) + sign * (qm - 2 * q0 + qp);
                if (d2 < worst) {
                    worst = d2;
                    if (d2 < -tol) {
                        cert.pass = false;
                        cert.witness = "theta=" + std::to_string(theta) +
                                       " z=" + std::to_string(s.f1.grid_z(i));
                    }
                }
            }
            pm = p0; p0 = pp;
            qm = q0; q0 = qp;
        }
    }
    // Analytic dominance: the sign mechanism (psi +- phi)'' = (g +- rho) phi
    // needs |rho| <= g everywhere, independent of the grid check above.
    double dominance = -1e300;
    for (int i = 0; i < s.rho.size(); ++i) {
        double excess = std::fabs(s.rho.values()[i]) - bump_g(s.rho.grid_z(i));
        dominance = std::max(dominance, excess);
    }
    if (dominance > 0.0) {
        cert.pass = false;
        if (cert.witness.empty()) cert.witness = "|rho| exceeds g by " + std::to_string(dominance);
    }
    cert.margin = worst;
    cert.details = {{"min_second_difference", worst},
                    {"tol", tol},
                    {"n_theta", n_theta},
                    {"max_abs_rho_minus_g", dominance}};
    return cert;
}

double rho_nonproportionality(const StripModel& s) {
    double num_rg = 0, num_gg = 0, norm_rho = 0;
    for (int i = 0; i < s.rho.size(); ++i) {
        double z = s.rho.grid_z(i);
        if (std::fabs(z) > 1.0) continue;
        double g = bump_g(z), r = s.rho.values()[i];
        num_rg += r * g;
        num_gg += g * g;
        norm_rho += r * r;
    }
    double c = num_gg > 0 ? num_rg / num_gg : 0.0;
    double resid = 0;
    for (int i = 0; i < s.rho.size(); ++i) {
        double z = s.rho.grid_z(i);
        if (std::fabs(z) > 1.0) continue;
        double d = s.rho.values()[i] - c * bump_g(z);
        resid += d * d;
    }
    return norm_rho > 0 ? std::sqrt(resid / norm_rho) : 0.0;
}

}  // namespace ccgeo
