// Acceptance checks for the full construction: one pass/fail line per
// criterion, exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "ccgeo/arnold.hpp"
#include "ccgeo/gaussmap.hpp"
#include "ccgeo/glue_smooth.hpp"
#include "ccgeo/linefree.hpp"
#include "ccgeo/pipeline.hpp"
#include "ccgeo/quadforms.hpp"
#include "ccgeo/rng.hpp"
#include "ccgeo/strip.hpp"
#include "ccgeo/supportfield.hpp"

using namespace ccgeo;

namespace {

// Artifacts shared between criteria; built once on first use so each
// criterion's reported time includes exactly the work it triggered.
struct Shared {
    PipelineConfig cfg;

    const StripModel& strip() {
        if (!strip_) {
            strip_model_ = build_strip(cfg.m, cfg.h_ode, cfg.z_max_ode);
            strip_ = true;
        }
        return strip_model_;
    }

    double glued_margin() {
        if (glued_margin_ < 0) {
            auto ls = line_search(glued_sections(strip()), -cfg.z_window, cfg.z_window,
                                  cfg.box, cfg.restarts, cfg.seed + 1);
            glued_margin_ = ls.margin;
        }
        return glued_margin_;
    }

    // Smallest epsilon of the halving schedule with sup distance below the
    // glued-body line margin (the "eps < c" budget rule).
    const SmoothedBody& body() {
        if (!body_built_) {
            double target = glued_margin();
            double eps = cfg.eps0;
            for (int i = 0; i <= cfg.max_halvings; ++i) {
                SmoothParams p;
                p.sigma_theta = std::max(eps, cfg.eps_floor);
                p.wide_weight = cfg.wide_weight;
                body_ = smooth_glued(strip(), p, cfg.z_core, cfg.n_z_core, cfg.n_theta);
                snapshot_ = body_.snapshot();
                SupDistance d = field_sup_distance(body_, snapshot_);
                delta_ = d.grid_sup;
                chosen_eps_ = p.sigma_theta;
                if ((delta_ < target && delta_ <= cfg.delta0) || p.sigma_theta <= cfg.eps_floor)
                    break;
                double predicted = eps * (0.45 * target / std::max(delta_, 1e-300));
                double next = eps / 2;
                while (next / 2 > predicted && next / 2 > cfg.eps_floor) next /= 2;
                eps = std::max(next, cfg.eps_floor);
            }
            body_built_ = true;
        }
        return body_;
    }
    const SupportField& snapshot() {
        body();
        return snapshot_;
    }
    double delta() {
        body();
        return delta_;
    }
    double chosen_eps() {
        body();
        return chosen_eps_;
    }

  private:
    bool strip_ = false, body_built_ = false;
    StripModel strip_model_;
    SmoothedBody body_;
    SupportField snapshot_;
    double glued_margin_ = -1, delta_ = 0, chosen_eps_ = 0;
};

Shared shared;

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d [%s] %-38s %7.2f s%s%s\n", number, ok ? "PASS" : "FAIL",
                name.c_str(), dt, detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

Eigen::MatrixXd random_symmetric(int n, Rng& rng) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    return 0.5 * (m + m.transpose());
}

}  // namespace

int main() {
    criterion(1, "restricted-signature law", [](std::string& detail) {
        Rng rng(101);
        int done = 0;
        while (done < 500) {
            int n = rng.uniform_int(2, 6);
            QuadraticForm q(random_symmetric(n, rng));
            if (!q.nondegenerate()) continue;
            Eigen::VectorXd ell(n);
            for (int i = 0; i < n; ++i) ell[i] = rng.normal();
            if (ell.norm() < 1e-3) continue;
            // Keep q*(ell,ell) bounded away from zero so the predicted case
            // is unambiguous.
            if (std::abs(dual_value(q, ell)) < 1e-3 * ell.squaredNorm()) continue;
            auto predicted = predict_restricted_signature(q, ell);
            auto actual = restrict_to_hyperplane(q, ell).second;
            if (!(predicted == actual)) {
                detail = "mismatch " + predicted.str() + " vs " + actual.str();
                return false;
            }
            ++done;
        }
        detail = "500 forms, dim <= 6";
        return true;
    });

    criterion(2, "Gauss identity q*(dQ,dQ) = 4Q", [](std::string& detail) {
        Rng rng(103);
        double worst = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            int k = rng.uniform_int(1, 3), l = rng.uniform_int(1, 3);
            auto q = standard_form(k, l);
            Eigen::VectorXd x(k + l);
            for (int i = 0; i < k + l; ++i) x[i] = rng.normal();
            double resid = std::abs(dual_value(q, q.gradient(x)) - 4.0 * q(x));
            worst = std::max(worst, resid);
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "max residual %.2e", worst);
        detail = buf;
        return worst < 1e-10;
    });

    criterion(3, "second-form signatures on {Q=+-1}", [](std::string& detail) {
        const int kl[4][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
        int checked = 0;
        for (auto& pair : kl) {
            int k = pair[0], l = pair[1];
            for (int sign = -1; sign <= 1; sign += 2) {
                auto oracle = quadric_oracle(k, l, sign);
                Signature expected =
                    sign > 0 ? Signature{k - 1, l, 0} : Signature{k, l - 1, 0};
                auto set = sample_surface(oracle, 3.0, 100, 1000 + 10 * k + l + sign);
                if (static_cast<int>(set.samples.size()) != 100) {
                    detail = "sampling failed";
                    return false;
                }
                for (const auto& s : set.samples) {
                    if (!s.second_form.same_unordered(expected)) {
                        detail = "got " + s.second_form.str() + " expected " + expected.str();
                        return false;
                    }
                    ++checked;
                }
            }
        }
        detail = std::to_string(checked) + " points";
        return true;
    });

    criterion(4, "Rolle gradient identity", [](std::string& detail) {
        Rng rng(107);
        const int kl[3][2] = {{1, 2}, {2, 1}, {2, 2}};
        int done = 0;
        double worst_angle = 0, worst_level = 0;
        while (done < 1000) {
            auto& pair = kl[rng.uniform_int(0, 2)];
            RolleField f{pair[0], pair[1], 0.5};
            Eigen::VectorXd x(f.k + f.l);
            for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(-3, 3);
            if (f.b(x) < 1e-3 || f.value(x) >= -1e-6) continue;
            auto cert = rolle_gradient_identity_check(f, x);
            worst_angle = std::max(worst_angle, cert.details["angle_rad"].get<double>());
            worst_level = std::max(worst_level, cert.details["level_residual"].get<double>());
            if (!cert.pass) {
                detail = "failed at trial " + std::to_string(done);
                return false;
            }
            ++done;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "max angle %.2e rad, level residual %.2e", worst_angle,
                      worst_level);
        detail = buf;
        return worst_angle < 1e-8 && worst_level < 1e-10;
    });

    criterion(5, "strip construction invariants", [](std::string& detail) {
        const auto& s = shared.strip();
        double tail = 0;
        for (int i = 0; i < s.u1.size(); ++i) {
            if (std::abs(s.u1.grid_z(i)) < 0.5) continue;
            tail = std::max({tail, std::abs(s.u1.values()[i]), std::abs(s.u2.values()[i]),
                             std::abs(s.u1.derivs()[i]), std::abs(s.u2.derivs()[i])});
        }
        double dominance = 0;  // max |rho| - g/2 <= 0 gives the factor-2 margin
        for (int i = 0; i < s.rho.size(); ++i)
            dominance = std::max(dominance, std::abs(s.rho.values()[i]) -
                                                0.5 * bump_g(s.rho.grid_z(i)));
        double nonprop = rho_nonproportionality(s);
        double wdrift = wronskian_drift(OdePair{s.f1, s.f2});
        char buf[128];
        std::snprintf(buf, sizeof buf, "u tail %.2e, nonprop %.3f, W drift %.2e", tail, nonprop,
                      wdrift);
        detail = buf;
        return tail < 1e-9 && dominance <= 1e-12 && nonprop > 0.1 && wdrift < 1e-8;
    });

    criterion(6, "z-convexity of S, E, D", [](std::string& detail) {
        const auto& s = shared.strip();
        auto sf = strip_field(s, shared.cfg.field_z_max, shared.cfg.coarse_h_z, 256);
        auto ef = glued_field(s, shared.cfg.field_z_max, shared.cfg.coarse_h_z, 256);
        auto cs = z_convexity_certificate(sf, shared.cfg.field_z_max, 1e-7);
        auto ce = z_convexity_certificate(ef, shared.cfg.field_z_max, 1e-7);
        Certificate cd = z_convexity_certificate(shared.snapshot(), 3.0, 0.0);
        bool strict = cd.pass && cd.margin > 0;
        char buf[128];
        std::snprintf(buf, sizeof buf, "margins S %.2e, E %.2e, D %.2e (strict)", cs.margin,
                      ce.margin, cd.margin);
        detail = buf;
        return cs.pass && cs.margin >= -1e-7 && ce.pass && ce.margin >= -1e-7 && strict;
    });

    criterion(7, "line-freeness margins", [](std::string& detail) {
        const auto& cfg = shared.cfg;
        const auto& s = shared.strip();
        auto strip_sec = strip_sections(s);
        auto ls = line_search(strip_sec, -cfg.z_window, cfg.z_window, cfg.box, cfg.restarts,
                              cfg.seed);
        if (!(ls.margin > 0)) {
            detail = "strip margin not positive";
            return false;
        }
        // Independent oracle: Lipschitz-pruned lattice scan at resolution
        // 0.01 over the kernel-reachable z-window.
        auto scan = grid_scan(strip_sec, -2, 2, 0.5, 0.01, 2.0);
        double cell_bound = 2.0 * 0.01 * std::sqrt(6.0);
        if (std::abs(scan.margin - ls.margin) > cell_bound) {
            detail = "scan " + std::to_string(scan.margin) + " vs search " +
                     std::to_string(ls.margin);
            return false;
        }
        // Degenerate strip (g = rho = 0) contains ruling lines.
        StripModel degen;
        {
            auto lin = [](double a, double b) {
                return SampledFunction::from_callable(
                    -4.0, 4.0, 257, [a, b](double z) { return a * z + b; },
                    [a](double) { return a; });
            };
            degen.f1 = lin(0, 1);
            degen.f2 = lin(1, 0);
            degen.u1 = lin(0, 0);
            degen.u2 = lin(0, 0);
            double sc = cone_rescale_factor(OdePair{degen.f1, degen.f2});
            degen.f1 = degen.f1.scaled(sc);
            degen.f2 = degen.f2.scaled(sc);
        }
        auto degen_ls = line_search(strip_sections(degen), -2, 2, 1.0, 8, 3);
        if (!(degen_ls.margin < 1e-6)) {
            detail = "degenerate margin " + std::to_string(degen_ls.margin);
            return false;
        }
        // Smoothed body: sup distance budget and positive margin.
        double margin_e = shared.glued_margin();
        if (!(shared.delta() < margin_e)) {
            detail = "delta " + std::to_string(shared.delta()) + " >= margin(E)";
            return false;
        }
        const SmoothedBody& body = shared.body();
        auto sec_d = support_sections(
            [&body](double z, double th) { return body.eval(z, th); }, cfg.z_core);
        auto ls_d = line_search(sec_d, -cfg.z_window, cfg.z_window, cfg.box,
                                cfg.restarts_smoothed, cfg.seed + 2);
        char buf[160];
        std::snprintf(buf, sizeof buf, "margins: strip %.3e, E %.3e, D %.3e, delta %.3e",
                      ls.margin, margin_e, ls_d.margin, shared.delta());
        detail = buf;
        return ls_d.margin > 0;
    });

    criterion(8, "smoothing surrogates on D", [](std::string& detail) {
        const auto& cfg = shared.cfg;
        SmoothParams p;
        p.sigma_theta = shared.chosen_eps();
        p.wide_weight = cfg.wide_weight;
        double h_z = 2.0 * cfg.z_core / (cfg.n_z_core - 1);
        double d_theta = 2.0 * M_PI / cfg.n_theta;
        auto kc = kernel_certificate(p, h_z, d_theta);
        auto cc = curvature_certificate(shared.snapshot(), cfg.z_core, 0.0);
        double T = std::min(std::sqrt(shared.chosen_eps() * std::log(1e14)), 2.0);
        auto tc = tail_decreasing_certificate(shared.snapshot(), 2.0 + T);
        auto oracle = oracle_from_body(shared.body());
        auto hc = hyperbolicity_certificate(oracle, 0.8, 500, Signature{1, 1, 0}, cfg.seed);
        char buf[128];
        std::snprintf(buf, sizeof buf, "curvature margin %.2e%s", cc.margin,
                      hc.pass ? ", 500 points (1,1)" : ", hyperbolicity FAILED");
        detail = buf;
        return kc.pass && cc.pass && cc.margin > 0 && tc.pass && hc.pass;
    });

    criterion(9, "Arnold counting identity", [](std::string& detail) {
        auto cert = arnold_certificate(hyperbolic_quadric(), 1000, 7);
        if (!cert.pass) {
            detail = "identity violated";
            return false;
        }
        Rng rng(109);
        double worst = 0;
        int done = 0;
        while (done < 500) {
            Eigen::Matrix4d A = random_symmetric(4, rng);
            if (std::abs(A.determinant()) < 1e-3) continue;
            worst = std::max(worst, duality_involution_error(A));
            ++done;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "1000 lines; duality error %.2e", worst);
        detail = buf;
        return worst < 1e-9;
    });

    criterion(10, "radial projection injectivity", [](std::string& detail) {
        auto hyp = sample_surface(quadric_oracle(2, 1, 1.0), 5.0, 400, 9);
        auto ok = radial_projection_injectivity(hyp);
        auto tor = sample_surface(torus_oracle(2.0, 0.5), 3.0, 400, 11);
        auto bad = radial_projection_injectivity(tor);
        detail = "hyperboloid " + std::string(ok.pass ? "passes" : "FAILS") + ", torus " +
                 std::string(bad.pass ? "PASSES (wrong)" : "fails");
        return ok.pass && !bad.pass;
    });

    if (failures == 0) {
        std::printf("acceptance: all criteria pass\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
