#include "ccgeo/glue_smooth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <fftw3.h>

namespace ccgeo {

double glued_support(const StripModel& s, double z, double theta) {
    double fs = s.support(z, theta);
    return std::fabs(z) >= 1.0 ? std::max(fs, quasi_cone_support(z)) : fs;
}

SupportField build_deviation_field(const StripModel& s, double z_core, int n_z, int n_theta) {
    SupportField G(-z_core, z_core, n_z, n_theta);
    std::vector<double> ct(n_theta), st(n_theta);
    for (int it = 0; it < n_theta; ++it) {
        ct[it] = std::cos(G.theta_of(it));
        st[it] = std::sin(G.theta_of(it));
    }
    for (int iz = 0; iz < n_z; ++iz) {
        double z = G.z_of(iz);
        double f1 = s.f1(z), f2 = s.f2(z), u1 = s.u1(z), u2 = s.u2(z);
        double cone = quasi_cone_support(z);
        bool outside = std::fabs(z) >= 1.0;
        for (int it = 0; it < n_theta; ++it) {
            double fs = u1 * ct[it] + u2 * st[it] + std::fabs(f1 * ct[it] + f2 * st[it]);
            G.at(iz, it) = outside ? std::max(fs - cone, 0.0) : fs - cone;
        }
    }
    return G;
}

// ---- narrow kernel: polynomial bump, closed-form partial moments ----

double narrow_kernel(double sigma, double x) {
    double t = x / sigma;
    if (std::fabs(t) >= 1.0) return 0.0;
    double b = 1.0 - t * t;
    double b2 = b * b;
    return (693.0 / 512.0) / sigma * b2 * b2 * b;
}

NarrowMoments narrow_moments(double sigma, double a, double b) {
    // Coefficients of (693/512)(1-t^2)^5 in even powers t^0..t^10.
    static const double binom5[6] = {1, 5, 10, 10, 5, 1};
    double c[6];
    for (int k = 0; k <= 5; ++k) c[k] = (693.0 / 512.0) * binom5[k] * ((k & 1) ? -1.0 : 1.0);

    double ta = std::clamp(a / sigma, -1.0, 1.0);
    double tb = std::clamp(b / sigma, -1.0, 1.0);
    // Power integrals P[m] = int_ta^tb t^m dt.
    constexpr int kMaxJ = 16;
    constexpr int kMaxPow = 10 + 2 * kMaxJ + 2;
    double P[kMaxPow + 1];
    double pa = ta, pb = tb;  // running powers t^{m+1}
    for (int m = 0; m <= kMaxPow; ++m) {
        pa *= (m == 0) ? 1.0 : ta;
        pb *= (m == 0) ? 1.0 : tb;
        P[m] = (pb - pa) / (m + 1);
    }
    auto poly_moment = [&](int extra) {  // int p(t) t^extra dt
        double s = 0;
        for (int k = 0; k <= 5; ++k) s += c[k] * P[2 * k + extra];
        return s;
    };

    NarrowMoments M{};
    M.m1 = poly_moment(0);
    // cos(sigma t) and sin(sigma t) by Taylor series in sigma*t (|sigma t| <= sigma,
    // sigma is small so this converges to machine precision in a few terms).
    double coef_c = 1.0, coef_s = sigma;
    for (int j = 0; j <= kMaxJ; ++j) {
        double term_c = coef_c * poly_moment(2 * j);
        double term_s = coef_s * poly_moment(2 * j + 1);
        M.mc += term_c;
        M.ms += term_s;
        if (std::fabs(coef_c) < 1e-22 && std::fabs(coef_s) < 1e-22) break;
        coef_c *= -sigma * sigma / ((2 * j + 1) * (2 * j + 2));
        coef_s *= -sigma * sigma / ((2 * j + 2) * (2 * j + 3));
    }
    return M;
}

// ---- narrow-smoothed support of E, closed form ----

namespace {

struct Piece {
    double ex = 0, ey = 0;    // endpoint (or unused for the disc piece)
    double dex = 0, dey = 0;  // d/dz
    double d2x = 0, d2y = 0;  // d2/dz2
    bool is_r = false;
    double r = 0, dr = 0;  // disc radius and d/dz

    double value(double cp, double sp) const { return is_r ? r : ex * cp + ey * sp; }
    double dpsi(double cp, double sp) const { return is_r ? 0.0 : -ex * sp + ey * cp; }
    double dz(double cp, double sp) const { return is_r ? dr : dex * cp + dey * sp; }
};

}  // namespace

NarrowEval narrow_support(const StripModel& s, double z, double theta, double sigma,
                          bool with_derivs) {
    double f1 = s.f1(z), f2 = s.f2(z), u1 = s.u1(z), u2 = s.u2(z);
    double df1 = s.f1.derivative(z), df2 = s.f2.derivative(z);
    double du1 = s.u1.derivative(z), du2 = s.u2.derivative(z);
    double g = s.g(z), rho = s.rho(z);

    Piece pc[3];
    int np = 0;
    // e0 = u - f, e1 = u + f; second derivatives from the ODEs u'' = rho f, f'' = g f.
    pc[np++] = {u1 - f1, u2 - f2, du1 - df1, du2 - df2,
                (rho - g) * f1, (rho - g) * f2, false, 0, 0};
    pc[np++] = {u1 + f1, u2 + f2, du1 + df1, du2 + df2,
                (rho + g) * f1, (rho + g) * f2, false, 0, 0};
    bool has_r = std::fabs(z) >= 1.0;
    if (has_r) {
        Piece p;
        p.is_r = true;
        p.r = std::fabs(z) - 1.0;
        p.dr = z > 0 ? 1.0 : -1.0;
        pc[np++] = p;
    }

    // Breakpoint candidates inside the window [theta - sigma, theta + sigma].
    double lo = theta - sigma, hi = theta + sigma;
    double bp[16];
    int nb = 0;
    auto add_candidate = [&](double psi) {
        double wrapped = psi + 2.0 * M_PI * std::round((theta - psi) / (2.0 * M_PI));
        if (wrapped > lo + 1e-15 && wrapped < hi - 1e-15 && nb < 16) bp[nb++] = wrapped;
    };
    {
        // s0 = s1: perpendicular to e0 - e1 = -2f.
        double base = std::atan2(-(-2.0 * f1), -2.0 * f2);
        add_candidate(base);
        add_candidate(base + M_PI);
    }
    if (has_r) {
        double r = std::fabs(z) - 1.0;
        for (int i = 0; i < 2; ++i) {
            double n = std::hypot(pc[i].ex, pc[i].ey);
            if (n > r && n > 0) {
                double arg = std::atan2(pc[i].ey, pc[i].ex);
                double half = std::acos(std::clamp(r / n, -1.0, 1.0));
                add_candidate(arg + half);
                add_candidate(arg - half);
            }
        }
    }
    std::sort(bp, bp + nb);

    // Sub-interval endpoints in psi, ascending.
    double pts[18];
    int npts = 0;
    pts[npts++] = lo;
    for (int i = 0; i < nb; ++i)
        if (npts == 1 || bp[i] > pts[npts - 1] + 1e-15) pts[npts++] = bp[i];
    pts[npts++] = hi;

    NarrowEval out{};
    int active[18];
    for (int i = 0; i + 1 < npts; ++i) {
        double psi_m = 0.5 * (pts[i] + pts[i + 1]);
        double cp = std::cos(psi_m), sp = std::sin(psi_m);
        int best = 0;
        double vbest = pc[0].value(cp, sp);
        for (int j = 1; j < np; ++j) {
            double v = pc[j].value(cp, sp);
            if (v > vbest) {
                vbest = v;
                best = j;
            }
        }
        active[i] = best;

        // Integration variable x = theta - psi over [theta - pts[i+1], theta - pts[i]].
        NarrowMoments M = narrow_moments(sigma, theta - pts[i + 1], theta - pts[i]);
        const Piece& p = pc[best];
        if (p.is_r) {
            out.F += p.r * M.m1;
            if (with_derivs) out.Fz += p.dr * M.m1;
        } else {
            double ct = std::cos(theta), st = std::sin(theta);
            double u = p.ex * ct + p.ey * st, v = p.ex * st - p.ey * ct;
            out.F += u * M.mc + v * M.ms;
            if (with_derivs) {
                double uz = p.dex * ct + p.dey * st, vz = p.dex * st - p.dey * ct;
                double uzz = p.d2x * ct + p.d2y * st, vzz = p.d2x * st - p.d2y * ct;
                out.Ft += -v * M.mc + u * M.ms;
                out.Ftt += -u * M.mc - v * M.ms;
                out.Fz += uz * M.mc + vz * M.ms;
                out.Fzt += -vz * M.mc + uz * M.ms;
                out.Fzz += uzz * M.mc + vzz * M.ms;
            }
        }
    }

    if (with_derivs) {
        // Kink corrections at breakpoints where the active piece changes:
        // h' and h_z jump there, contributing k(theta - psi*) terms to the
        // second derivatives (and a breakpoint-motion term to Fzz).
        for (int i = 1; i + 1 < npts; ++i) {
            if (active[i] == active[i - 1]) continue;
            double psi = pts[i];
            double cp = std::cos(psi), sp = std::sin(psi);
            const Piece& before = pc[active[i - 1]];  // psi < psi*
            const Piece& after = pc[active[i]];       // psi > psi*
            double J1 = after.dpsi(cp, sp) - before.dpsi(cp, sp);
            double Jz = after.dz(cp, sp) - before.dz(cp, sp);
            double kv = narrow_kernel(sigma, theta - psi);
            out.Ftt += J1 * kv;
            out.Fzt += Jz * kv;
            // Implicit motion of the crossing: G(psi, z) = val_after - val_before = 0.
            double Gpsi = after.dpsi(cp, sp) - before.dpsi(cp, sp);
            double Gz = Jz;
            if (std::fabs(Gpsi) > 1e-14) out.Fzz += Jz * kv * (Gz / Gpsi);
        }
    }
    return out;
}

// ---- wide component (grid convolution) ----

namespace {

struct Kernel1D {
    std::vector<double> taps;
    int half = 0;
    double step = 0;
};

Kernel1D bump_kernel(double sigma, double step) {
    Kernel1D k;
    k.step = step;
    k.half = std::max(1, static_cast<int>(std::ceil(sigma / step)) - 1);
    k.taps.resize(2 * k.half + 1);
    double sum = 0;
    for (int i = -k.half; i <= k.half; ++i) {
        double v = bump_g(i * step / sigma);
        k.taps[i + k.half] = v;
        sum += v;
    }
    for (double& v : k.taps) v /= sum;
    return k;
}

struct FftConv {
    int n = 0;
    fftw_plan fwd = nullptr, bwd = nullptr;
    double* buf = nullptr;
    fftw_complex* spec = nullptr;
    std::vector<double> kernel_spec;  // even kernel => real spectrum

    FftConv(int n_, const Kernel1D& k) : n(n_) {
        buf = fftw_alloc_real(n);
        spec = fftw_alloc_complex(n / 2 + 1);
        fwd = fftw_plan_dft_r2c_1d(n, buf, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, spec, buf, FFTW_ESTIMATE);
        std::memset(buf, 0, sizeof(double) * n);
        for (int j = -k.half; j <= k.half; ++j) buf[(j + n) % n] += k.taps[j + k.half];
        fftw_execute(fwd);
        kernel_spec.resize(n / 2 + 1);
        for (int i = 0; i <= n / 2; ++i) kernel_spec[i] = spec[i][0];
    }
    ~FftConv() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
        fftw_free(spec);
    }
    void run(double* data, int m) {
        std::memcpy(buf, data, sizeof(double) * m);
        std::memset(buf + m, 0, sizeof(double) * (n - m));
        fftw_execute(fwd);
        for (int i = 0; i <= n / 2; ++i) {
            spec[i][0] *= kernel_spec[i] / n;
            spec[i][1] *= kernel_spec[i] / n;
        }
        fftw_execute(bwd);
        std::memcpy(data, buf, sizeof(double) * m);
    }
};

}  // namespace

SmoothedBody smooth_glued(const StripModel& s, const SmoothParams& p, double z_core, int n_z,
                          int n_theta) {
    SmoothedBody D;
    D.strip = s;
    D.params = p;
    D.z_core = z_core;

    SupportField wide = build_deviation_field(s, z_core, n_z, n_theta);
    double h_z = (2.0 * z_core) / (n_z - 1);
    double d_theta = 2.0 * M_PI / n_theta;
    Kernel1D kt = bump_kernel(M_PI, d_theta);
    Kernel1D kz = bump_kernel(p.sigma_z_wide, h_z);
    {
        FftConv conv_t(n_theta, kt);
        for (int iz = 0; iz < n_z; ++iz) conv_t.run(&wide.at(iz, 0), n_theta);
    }
    {
        int L = 1;
        while (L < n_z + 2 * kz.half + 1) L <<= 1;
        FftConv conv_z(L, kz);
        std::vector<double> col(n_z);
        for (int it = 0; it < n_theta; ++it) {
            for (int iz = 0; iz < n_z; ++iz) col[iz] = wide.at(iz, it);
            conv_z.run(col.data(), n_z);
            for (int iz = 0; iz < n_z; ++iz) wide.at(iz, it) = col[iz];
        }
    }
    // Add the wide-smoothed cone: (wide_z * (|.| - 1))(z), constant in theta.
    for (int iz = 0; iz < n_z; ++iz) {
        double z = wide.z_of(iz), acc = 0;
        for (int j = -kz.half; j <= kz.half; ++j)
            acc += kz.taps[j + kz.half] * (std::fabs(z - j * h_z) - 1.0);
        for (int it = 0; it < n_theta; ++it) wide.at(iz, it) += acc;
    }
    D.wide = std::move(wide);
    return D;
}

double SmoothedBody::eval(double z, double theta) const {
    if (std::fabs(z) > z_core) return quasi_cone_support(z);
    double w = params.wide_weight;
    return (1.0 - w) * narrow_support(strip, z, theta, params.sigma_theta).F +
           w * wide.eval(z, theta);
}

SupportField SmoothedBody::snapshot() const {
    SupportField snap(-z_core, z_core, wide.n_z(), wide.n_theta());
    double w = params.wide_weight;
    for (int iz = 0; iz < snap.n_z(); ++iz) {
        double z = snap.z_of(iz);
        for (int it = 0; it < snap.n_theta(); ++it)
            snap.at(iz, it) = (1.0 - w) * narrow_support(strip, z, snap.theta_of(it),
                                                         params.sigma_theta).F +
                              w * wide.at(iz, it);
    }
    return snap;
}

SupDistance field_sup_distance(const SmoothedBody& D, const SupportField& snap) {
    const StripModel& s = D.strip;
    int n_t = snap.n_theta();
    std::vector<double> ct(n_t), st(n_t);
    for (int it = 0; it < n_t; ++it) {
        ct[it] = std::cos(snap.theta_of(it));
        st[it] = std::sin(snap.theta_of(it));
    }
    SupDistance d;
    double wide_sup = 0, jump_max = 0, h_max = 0;
    for (int iz = 0; iz < snap.n_z(); ++iz) {
        double z = snap.z_of(iz);
        double f1 = s.f1(z), f2 = s.f2(z), u1 = s.u1(z), u2 = s.u2(z);
        double cone = quasi_cone_support(z);
        bool outside = std::fabs(z) >= 1.0;
        double fn = std::hypot(f1, f2), un = std::hypot(u1, u2);
        jump_max = std::max(jump_max, 2.0 * (fn + un));
        for (int it = 0; it < n_t; ++it) {
            double fs = u1 * ct[it] + u2 * st[it] + std::fabs(f1 * ct[it] + f2 * st[it]);
            double fe = outside ? std::max(fs, cone) : fs;
            h_max = std::max(h_max, std::fabs(fe));
            d.grid_sup = std::max(d.grid_sup, std::fabs(snap.at(iz, it) - fe));
            wide_sup = std::max(wide_sup, std::fabs(D.wide.at(iz, it) - fe));
        }
    }
    // Continuum bound: the narrow convolution attenuates each sinusoidal piece
    // by (1 - c_hat) and bulges at a slope-jump J by at most (J/2) E|psi|,
    // E|psi| = 2 * 0.2256 sigma; the wide part is smooth at scale >= sigma_z_wide
    // so its grid sup is sharp up to O(h^2).
    double sigma = D.params.sigma_theta, w = D.params.wide_weight;
    double c_hat = narrow_moments(sigma, -sigma, sigma).mc;
    double e_abs = (693.0 / 3072.0) * sigma;
    d.continuum_bound = (1.0 - w) * ((1.0 - c_hat) * h_max + jump_max * e_abs) + w * wide_sup;
    return d;
}

Certificate kernel_certificate(const SmoothParams& p, double h_z, double d_theta) {
    Certificate cert;
    cert.name = "smoothing_kernel";
    cert.pass = true;
    auto record = [&](const std::string& what, double value, double tol) {
        bool ok = value <= tol;
        cert.details[what] = {{"value", value}, {"tol", tol}, {"pass", ok}};
        if (!ok) {
            cert.pass = false;
            if (cert.witness.empty()) cert.witness = what;
        }
    };

    double sigma = p.sigma_theta;
    // Narrow factor: exact unit mass and additivity of the closed-form moments.
    record("mass_narrow_theta", std::fabs(narrow_moments(sigma, -sigma, sigma).m1 - 1.0), 1e-12);
    {
        NarrowMoments a = narrow_moments(sigma, -sigma, 0.3 * sigma);
        NarrowMoments b = narrow_moments(sigma, 0.3 * sigma, sigma);
        record("narrow_moment_additivity", std::fabs(a.m1 + b.m1 - 1.0), 1e-12);
        double even = 0;
        for (double x : {0.1 * sigma, 0.45 * sigma, 0.9 * sigma})
            even = std::max(even,
                            std::fabs(narrow_kernel(sigma, x) - narrow_kernel(sigma, -x)));
        record("even_narrow_theta", even * sigma, 0.0);
    }

    auto mass_err = [](const Kernel1D& k) {
        double s = 0;
        for (double v : k.taps) s += v;
        return std::fabs(s - 1.0);
    };
    auto evenness = [](const Kernel1D& k) {
        double worst = 0;
        for (int j = 1; j <= k.half; ++j)
            worst = std::max(worst, std::fabs(k.taps[k.half + j] - k.taps[k.half - j]));
        return worst;
    };
    Kernel1D kt = bump_kernel(M_PI, d_theta);
    Kernel1D kz = bump_kernel(p.sigma_z_wide, h_z);
    record("mass_wide_theta", mass_err(kt), 1e-10);
    record("mass_wide_z", mass_err(kz), 1e-10);
    record("even_wide_theta", evenness(kt), 0.0);
    record("even_wide_z", evenness(kz), 0.0);

    // Affine-in-z reproduction: the narrow factor acts only in theta, so it
    // reproduces any z-profile exactly; the wide z-pass must reproduce affine
    // profiles by evenness and unit mass.
    {
        double worst = 0;
        for (double z : {-1.3, 0.0, 0.7, 2.1}) {
            double acc = 0;
            for (int j = -kz.half; j <= kz.half; ++j)
                acc += kz.taps[j + kz.half] * (0.375 - 1.25 * (z - j * h_z));
            worst = std::max(worst, std::fabs(acc - (0.375 - 1.25 * z)));
        }
        record("affine_in_z_reproduction", worst, 1e-9);
    }

    // Concentration: everything except the wide component (mass w) lies inside
    // |psi| <= sigma, |t| = 0.
    cert.details["mass_outside_narrow_support"] = p.wide_weight;
    cert.details["narrow_cos_attenuation"] =
        1.0 - narrow_moments(sigma, -sigma, sigma).mc;
    cert.margin = 1.0 - p.wide_weight;
    return cert;
}

Certificate tail_decreasing_certificate(const SupportField& snap, double from_z, double tol) {
    Certificate cert;
    cert.name = "tail_decreasing";
    cert.pass = true;
    std::vector<double> rowmax(snap.n_z(), 0.0);
    for (int iz = 0; iz < snap.n_z(); ++iz) {
        double z = snap.z_of(iz), m = 0;
        for (int it = 0; it < snap.n_theta(); ++it)
            m = std::max(m, std::fabs(snap.at(iz, it) - quasi_cone_support(z)));
        rowmax[iz] = m;
    }
    double worst = -1e300;
    for (int iz = 1; iz < snap.n_z(); ++iz) {
        double z0 = snap.z_of(iz - 1), z1 = snap.z_of(iz);
        double grow = 0;
        if (z0 >= from_z) grow = rowmax[iz] - rowmax[iz - 1];        // upper tail
        else if (z1 <= -from_z) grow = rowmax[iz - 1] - rowmax[iz];  // lower tail
        else continue;
        if (grow > worst) worst = grow;
        if (grow > tol) {
            cert.pass = false;
            if (cert.witness.empty()) cert.witness = "z=" + std::to_string(z1);
        }
    }
    cert.margin = -worst;
    cert.details = {{"max_row_growth", worst}, {"tol", tol}, {"from_z", from_z},
                    {"boundary_row_max", rowmax.back()}};
    return cert;
}

}  // namespace ccgeo
