#include "ccgeo/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>

namespace ccgeo {

nlohmann::json PipelineConfig::to_json() const {
    return {{"m", m}, {"h_ode", h_ode}, {"z_max_ode", z_max_ode}, {"z_core", z_core},
            {"n_z_core", n_z_core}, {"n_theta", n_theta}, {"field_z_max", field_z_max},
            {"coarse_n_theta", coarse_n_theta}, {"coarse_h_z", coarse_h_z}, {"eps0", eps0},
            {"delta0", delta0}, {"max_halvings", max_halvings}, {"eps_floor", eps_floor},
            {"wide_weight", wide_weight},
            {"z_window", z_window}, {"box", box}, {"restarts", restarts},
            {"restarts_smoothed", restarts_smoothed}, {"seed", seed}};
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c;
    auto set = [&](const char* k, auto& field) {
        if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
    };
    set("m", c.m); set("h_ode", c.h_ode); set("z_max_ode", c.z_max_ode);
    set("z_core", c.z_core); set("n_z_core", c.n_z_core); set("n_theta", c.n_theta);
    set("field_z_max", c.field_z_max); set("coarse_n_theta", c.coarse_n_theta);
    set("coarse_h_z", c.coarse_h_z); set("eps0", c.eps0); set("delta0", c.delta0);
    set("max_halvings", c.max_halvings); set("eps_floor", c.eps_floor);
    set("wide_weight", c.wide_weight);
    set("z_window", c.z_window); set("box", c.box); set("restarts", c.restarts);
    set("restarts_smoothed", c.restarts_smoothed); set("seed", c.seed);
    return c;
}

SupportField strip_field(const StripModel& s, double z_max, double h_z, int n_theta) {
    int n_z = 2 * static_cast<int>(std::lround(z_max / h_z)) + 1;
    return SupportField::from_callable(-z_max, z_max, n_z, n_theta,
                                       [&](double z, double t) { return s.support(z, t); });
}

SupportField glued_field(const StripModel& s, double z_max, double h_z, int n_theta) {
    int n_z = 2 * static_cast<int>(std::lround(z_max / h_z)) + 1;
    return SupportField::from_callable(-z_max, z_max, n_z, n_theta,
                                       [&](double z, double t) { return glued_support(s, z, t); });
}

namespace {

// Location of the support maximum over theta for direction queries.
double support_argmax(const SupportField& f, double z, double x, double y) {
    int nt = f.n_theta();
    int stride = std::max(1, nt / 256);
    double best = -1e300, best_t = 0;
    for (int it = 0; it < nt; it += stride) {
        double th = f.theta_of(it);
        double v = x * std::cos(th) + y * std::sin(th) - f.eval(z, th);
        if (v > best) {
            best = v;
            best_t = th;
        }
    }
    const double gr = 0.6180339887498949;
    double a = best_t - stride * f.theta_step(), b = best_t + stride * f.theta_step();
    auto val = [&](double th) { return x * std::cos(th) + y * std::sin(th) - f.eval(z, th); };
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double v1 = val(x1), v2 = val(x2);
    for (int i = 0; i < 60; ++i) {
        if (v1 > v2) {
            b = x2; x2 = x1; v2 = v1;
            x1 = b - gr * (b - a); v1 = val(x1);
        } else {
            a = x1; x1 = x2; v1 = v2;
            x2 = a + gr * (b - a); v2 = val(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ScalarFieldOracle oracle_from_field(const SupportField& core) {
    auto f = std::make_shared<SupportField>(core);
    ScalarFieldOracle o;
    o.dim = 3;
    auto fD = [f](double z, double th, int dz, int dt) {
        // central-difference derivatives of F on the grid scales
        double hz = f->z_step(), ht = f->theta_step();
        if (dz == 0 && dt == 0) return f->eval(z, th);
        if (dz == 1 && dt == 0) return (f->eval(z + hz, th) - f->eval(z - hz, th)) / (2 * hz);
        if (dz == 0 && dt == 1) return (f->eval(z, th + ht) - f->eval(z, th - ht)) / (2 * ht);
        if (dz == 2 && dt == 0)
            return (f->eval(z + hz, th) - 2 * f->eval(z, th) + f->eval(z - hz, th)) / (hz * hz);
        if (dz == 0 && dt == 2)
            return (f->eval(z, th + ht) - 2 * f->eval(z, th) + f->eval(z, th - ht)) / (ht * ht);
        return (f->eval(z + hz, th + ht) - f->eval(z + hz, th - ht) - f->eval(z - hz, th + ht) +
                f->eval(z - hz, th - ht)) /
               (4 * hz * ht);
    };
    o.value = [f](const Eigen::VectorXd& p) {
        double th = support_argmax(*f, p[2], p[0], p[1]);
        return p[0] * std::cos(th) + p[1] * std::sin(th) - f->eval(p[2], th);
    };
    o.gradient = [f, fD](const Eigen::VectorXd& p) {
        double th = support_argmax(*f, p[2], p[0], p[1]);
        Eigen::VectorXd g(3);
        g << std::cos(th), std::sin(th), -fD(p[2], th, 1, 0);
        return g;
    };
    o.hessian = [f, fD](const Eigen::VectorXd& p) {
        double th = support_argmax(*f, p[2], p[0], p[1]);
        double c = std::cos(th), s = std::sin(th);
        double Ftt = fD(p[2], th, 0, 2), Fzt = fD(p[2], th, 1, 1), Fzz = fD(p[2], th, 2, 0);
        double W = p[0] * c + p[1] * s + Ftt;  // = h + h'' at the touching dir
        Eigen::MatrixXd H(3, 3);
        H(0, 0) = s * s / W;
        H(0, 1) = H(1, 0) = -s * c / W;
        H(1, 1) = c * c / W;
        H(0, 2) = H(2, 0) = s * Fzt / W;
        H(1, 2) = H(2, 1) = -c * Fzt / W;
        H(2, 2) = -Fzz + Fzt * Fzt / W;
        return H;
    };
    return o;
}

ScalarFieldOracle oracle_from_body(const SmoothedBody& body) {
    auto B = std::make_shared<SmoothedBody>(body);
    ScalarFieldOracle o;
    o.dim = 3;
    auto argmax_theta = [B](double z, double x, double y) {
        constexpr int kCoarse = 512;
        double best = -1e300, best_t = 0;
        for (int it = 0; it < kCoarse; ++it) {
            double th = 2.0 * M_PI * it / kCoarse;
            double v = x * std::cos(th) + y * std::sin(th) - B->eval(z, th);
            if (v > best) {
                best = v;
                best_t = th;
            }
        }
        const double gr = 0.6180339887498949;
        double a = best_t - 2.0 * M_PI / kCoarse, b = best_t + 2.0 * M_PI / kCoarse;
        auto val = [&](double th) { return x * std::cos(th) + y * std::sin(th) - B->eval(z, th); };
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double v1 = val(x1), v2 = val(x2);
        for (int i = 0; i < 70; ++i) {
            if (v1 > v2) {
                b = x2; x2 = x1; v2 = v1;
                x1 = b - gr * (b - a); v1 = val(x1);
            } else {
                a = x1; x1 = x2; v1 = v2;
                x2 = a + gr * (b - a); v2 = val(x2);
            }
        }
        return 0.5 * (a + b);
    };
    // Closed-form narrow derivatives; wide part by central differences on its
    // own grid steps (the wide component is smooth at scale >> grid step).
    auto derivs = [B](double z, double th) {
        NarrowEval n = narrow_support(B->strip, z, th, B->params.sigma_theta, true);
        double w = B->params.wide_weight;
        double hz = B->wide.z_step(), ht = B->wide.theta_step();
        auto we = [&](double dz, double dt) { return B->wide.eval(z + dz, th + dt); };
        double w00 = we(0, 0);
        NarrowEval r;
        r.F = (1 - w) * n.F + w * w00;
        r.Ft = (1 - w) * n.Ft + w * (we(0, ht) - we(0, -ht)) / (2 * ht);
        r.Ftt = (1 - w) * n.Ftt + w * (we(0, ht) - 2 * w00 + we(0, -ht)) / (ht * ht);
        r.Fz = (1 - w) * n.Fz + w * (we(hz, 0) - we(-hz, 0)) / (2 * hz);
        r.Fzt = (1 - w) * n.Fzt +
                w * (we(hz, ht) - we(hz, -ht) - we(-hz, ht) + we(-hz, -ht)) / (4 * hz * ht);
        r.Fzz = (1 - w) * n.Fzz + w * (we(hz, 0) - 2 * w00 + we(-hz, 0)) / (hz * hz);
        return r;
    };
    o.value = [B, argmax_theta](const Eigen::VectorXd& p) {
        double th = argmax_theta(p[2], p[0], p[1]);
        return p[0] * std::cos(th) + p[1] * std::sin(th) - B->eval(p[2], th);
    };
    o.gradient = [argmax_theta, derivs](const Eigen::VectorXd& p) {
        double th = argmax_theta(p[2], p[0], p[1]);
        NarrowEval d = derivs(p[2], th);
        Eigen::VectorXd g(3);
        g << std::cos(th), std::sin(th), -d.Fz;
        return g;
    };
    o.hessian = [argmax_theta, derivs](const Eigen::VectorXd& p) {
        double th = argmax_theta(p[2], p[0], p[1]);
        NarrowEval d = derivs(p[2], th);
        double c = std::cos(th), s = std::sin(th);
        double W = p[0] * c + p[1] * s + d.Ftt;  // = h + h'' at the touching dir
        Eigen::MatrixXd H(3, 3);
        H(0, 0) = s * s / W;
        H(0, 1) = H(1, 0) = -s * c / W;
        H(1, 1) = c * c / W;
        H(0, 2) = H(2, 0) = s * d.Fzt / W;
        H(1, 2) = H(2, 1) = -c * d.Fzt / W;
        H(2, 2) = -d.Fzz + d.Fzt * d.Fzt / W;
        return H;
    };
    return o;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
    using clock = std::chrono::steady_clock;
    PipelineResult res;
    nlohmann::json stages = nlohmann::json::array();
    auto stage = [&](const std::string& name, auto&& fn) {
        stages.push_back({{"stage", name}});
        auto t0 = clock::now();
        fn();
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        stages.back()["seconds"] = secs;
        if (log) *log << "[pipeline] " << name << " done in " << secs << " s\n";
    };

    res.pass = true;
    auto require = [&](const Certificate& c) {
        stages.back()["certificate"] = c.to_json();
        if (!c.pass) {
            res.pass = false;
            if (log) *log << "[pipeline] FAILED: " << c.name << " (" << c.witness << ")\n";
        }
    };

    stage("build_strip", [&] { res.strip = build_strip(cfg.m, cfg.h_ode, cfg.z_max_ode); });
    stage("strip_invariants", [&] { require(strip_invariants_certificate(res.strip)); });
    stage("strip_convex_concave", [&] { require(strip_cc_certificate(res.strip, 256)); });
    stage("rho_nonproportionality", [&] {
        double r = rho_nonproportionality(res.strip);
        stages.back()["residual"] = r;
        if (r <= 0.1) res.pass = false;
    });

    LineSearchResult strip_ls, glued_ls, smoothed_ls;
    stage("line_search_strip", [&] {
        strip_ls = line_search(strip_sections(res.strip), -cfg.z_window, cfg.z_window, cfg.box,
                               cfg.restarts, cfg.seed);
        stages.back()["result"] = strip_ls.to_json();
        res.margin_strip = strip_ls.margin;
        if (!(strip_ls.margin > 0)) res.pass = false;
    });
    stage("line_search_glued", [&] {
        glued_ls = line_search(glued_sections(res.strip), -cfg.z_window, cfg.z_window, cfg.box,
                               cfg.restarts, cfg.seed + 1);
        stages.back()["result"] = glued_ls.to_json();
        res.margin_glued = glued_ls.margin;
        if (!(glued_ls.margin > 0)) res.pass = false;
    });

    double h_z = 2.0 * cfg.z_core / (cfg.n_z_core - 1);
    double d_theta = 2.0 * M_PI / cfg.n_theta;
    stage("smooth_schedule", [&] {
        double eps = cfg.eps0;
        nlohmann::json tries = nlohmann::json::array();
        for (int i = 0; i <= cfg.max_halvings; ++i) {
            SmoothParams p;
            p.sigma_theta = std::max(eps, cfg.eps_floor);
            p.wide_weight = cfg.wide_weight;
            res.body = smooth_glued(res.strip, p, cfg.z_core, cfg.n_z_core, cfg.n_theta);
            res.snapshot = res.body.snapshot();
            SupDistance d = field_sup_distance(res.body, res.snapshot);
            res.delta = d.grid_sup;
            res.delta_bound = d.continuum_bound;
            res.chosen_eps = p.sigma_theta;
            tries.push_back({{"eps", p.sigma_theta}, {"delta", res.delta},
                             {"delta_bound", res.delta_bound}});
            if (log)
                *log << "[pipeline]   eps=" << p.sigma_theta << " delta=" << res.delta
                     << " bound=" << res.delta_bound << " (target < " << res.margin_glued
                     << ")\n";
            if ((res.delta < res.margin_glued && res.delta <= cfg.delta0) ||
                p.sigma_theta <= cfg.eps_floor)
                break;
            // Next epsilon from the schedule: halve, but skip directly to the
            // predicted size when that saves several smoothing passes.
            double predicted = eps * (0.45 * res.margin_glued / std::max(res.delta, 1e-300));
            double next = eps / 2;
            while (next / 2 > predicted && next / 2 > cfg.eps_floor) next /= 2;
            eps = std::max(next, cfg.eps_floor);
        }
        stages.back()["schedule"] = tries;
        if (!(res.delta < res.margin_glued)) res.pass = false;
    });

    stage("kernel_certificate", [&] {
        SmoothParams p;
        p.sigma_theta = res.chosen_eps;
        p.wide_weight = cfg.wide_weight;
        require(kernel_certificate(p, h_z, d_theta));
    });

    stage("smoothed_z_convexity", [&] {
        require(z_convexity_certificate(res.snapshot, cfg.z_core, 1e-12));
    });
    stage("smoothed_z_convexity_strict", [&] {
        Certificate c = z_convexity_certificate(res.snapshot, 3.0, 0.0);
        c.name = "z_convexity_strict_window";
        c.pass = c.pass && c.margin > 0;
        require(c);
    });
    stage("smoothed_curvature", [&] {
        require(curvature_certificate(res.snapshot, cfg.z_core, 0.0));
    });
    stage("tail_decreasing", [&] {
        double T = std::min(std::sqrt(res.chosen_eps * std::log(1e14)), 2.0);
        require(tail_decreasing_certificate(res.snapshot, 2.0 + T));
    });

    stage("line_search_smoothed", [&] {
        const SmoothedBody& body = res.body;
        auto sections = support_sections(
            [&body](double z, double th) { return body.eval(z, th); }, cfg.z_core);
        smoothed_ls = line_search(sections, -cfg.z_window, cfg.z_window, cfg.box,
                                  cfg.restarts_smoothed, cfg.seed + 2);
        stages.back()["result"] = smoothed_ls.to_json();
        res.margin_smoothed = smoothed_ls.margin;
        if (!(smoothed_ls.margin > 0)) res.pass = false;
    });

    stage("hyperbolicity", [&] {
        ScalarFieldOracle o = oracle_from_body(res.body);
        require(hyperbolicity_certificate(o, 0.8, 500, Signature{1, 1, 0}, cfg.seed + 3));
    });

    res.report = {{"config", cfg.to_json()},
                  {"stages", stages},
                  {"margins",
                   {{"strip", res.margin_strip},
                    {"glued", res.margin_glued},
                    {"smoothed", res.margin_smoothed},
                    {"delta", res.delta},
                    {"delta_continuum_bound", res.delta_bound},
                    {"chosen_eps", res.chosen_eps}}},
                  {"pass", res.pass}};
    return res;
}

}  // namespace ccgeo
