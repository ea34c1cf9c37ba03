// Command-line driver: build the strip, glue it to the quasi-cone, smooth,
// certify, and export artifacts.  Exit codes: 0 = pass, 1 = certificate
// failed, 2 = usage/runtime error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ccgeo/arnold.hpp"
#include "ccgeo/pipeline.hpp"
#include "ccgeo/quadforms.hpp"
#include "ccgeo/rng.hpp"

using namespace ccgeo;

namespace {

int emit(const Certificate& cert, const std::string& out) {
    nlohmann::json j = cert.to_json();
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(out);
        os << j.dump(2) << "\n";
        std::cout << cert.name << ": " << (cert.pass ? "pass" : "FAIL")
                  << " (margin " << cert.margin << ") -> " << out << "\n";
    }
    return cert.pass ? 0 : 1;
}

StripModel load_strip(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    return StripModel::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterexample construction: hyperbolic surface near the quasi-cone"};
    app.require_subcommand(1);
    int rc = 0;

    // forms check: signature law + Gauss identity spot checks
    auto* forms = app.add_subcommand("forms", "quadratic form laws");
    auto* forms_check = forms->add_subcommand("check", "random signature-law verification");
    int forms_n = 500;
    uint64_t forms_seed = 1;
    forms_check->add_option("-n", forms_n, "number of random forms");
    forms_check->add_option("--seed", forms_seed);
    forms_check->callback([&] {
        Rng rng(forms_seed, 3);
        int bad = 0, used = 0;
        for (int i = 0; i < forms_n; ++i) {
            int dim = rng.uniform_int(2, 6);
            Eigen::MatrixXd M(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c <= r; ++c) M(r, c) = M(c, r) = rng.normal();
            QuadraticForm q(M);
            if (!q.nondegenerate()) continue;
            Eigen::VectorXd ell(dim);
            for (int r = 0; r < dim; ++r) ell[r] = rng.normal();
            double qs = dual_value(q, ell);
            if (std::fabs(qs) < 1e-6) continue;
            ++used;
            auto [restricted, sig] = restrict_to_hyperplane(q, ell);
            (void)restricted;
            if (!(sig == predict_restricted_signature(q, ell))) ++bad;
        }
        std::cout << "signature law: " << used << " cases, " << bad << " mismatches\n";
        rc = bad == 0 ? 0 : 1;
    });

    // rolle check
    auto* rolle = app.add_subcommand("rolle", "Rolle containment field");
    auto* rolle_check = rolle->add_subcommand("check", "gradient identity at random points");
    int rolle_k = 1, rolle_l = 2, rolle_n = 1000;
    double rolle_eps = 1.0;
    uint64_t rolle_seed = 1;
    rolle_check->add_option("-k", rolle_k);
    rolle_check->add_option("-l", rolle_l);
    rolle_check->add_option("--eps", rolle_eps);
    rolle_check->add_option("-n", rolle_n);
    rolle_check->add_option("--seed", rolle_seed);
    rolle_check->callback([&] {
        RolleField field{rolle_k, rolle_l, rolle_eps};
        Rng rng(rolle_seed, 5);
        int bad = 0, used = 0;
        for (int i = 0; i < rolle_n; ++i) {
            Eigen::VectorXd x(rolle_k + rolle_l);
            for (int j = 0; j < x.size(); ++j) x[j] = 3.0 * rng.normal();
            if (field.value(x) >= -1e-6 || field.b(x) < 1e-3) continue;
            ++used;
            if (!rolle_gradient_identity_check(field, x).pass) ++bad;
        }
        std::cout << "rolle identity: " << used << " points, " << bad << " failures\n";
        rc = bad == 0 ? 0 : 1;
    });

    // strip build
    auto* strip_cmd = app.add_subcommand("strip", "perturbed strip");
    auto* strip_build = strip_cmd->add_subcommand("build", "solve the ODEs and build rho");
    int strip_m = 8;
    double strip_h = 1.0 / 8192;
    std::string strip_out = "strip.json";
    strip_build->add_option("-m", strip_m, "perturbation basis size");
    strip_build->add_option("--step", strip_h, "ODE step");
    strip_build->add_option("-o,--out", strip_out);
    strip_build->callback([&] {
        StripModel s = build_strip(strip_m, strip_h);
        std::ofstream os(strip_out);
        os << s.to_json().dump() << "\n";
        Certificate c = strip_invariants_certificate(s);
        rc = emit(c, "");
        std::cout << "strip -> " << strip_out << "\n";
    });

    // certify cc|curvature|linefree
    auto* certify = app.add_subcommand("certify", "run a certificate");
    std::string cert_strip = "strip.json", cert_field, cert_out;
    double cert_margin = 0.0, cert_window = 10.0;
    auto* cc = certify->add_subcommand("cc", "convex-concavity (z-convexity)");
    cc->add_option("--strip", cert_strip);
    cc->add_option("--field", cert_field, "binary support field (overrides --strip)");
    cc->add_option("-o,--out", cert_out);
    cc->callback([&] {
        Certificate c;
        if (!cert_field.empty()) {
            SupportField f = SupportField::load_binary(cert_field);
            c = z_convexity_certificate(f, f.z_max(), 1e-7);
        } else {
            c = strip_cc_certificate(load_strip(cert_strip), 256);
        }
        rc = emit(c, cert_out);
    });
    auto* curv = certify->add_subcommand("curvature", "section curvature h + h'' > 0");
    curv->add_option("--field", cert_field)->required();
    curv->add_option("-o,--out", cert_out);
    curv->callback([&] {
        SupportField f = SupportField::load_binary(cert_field);
        rc = emit(curvature_certificate(f, f.z_max(), 0.0), cert_out);
    });
    auto* lf = certify->add_subcommand("linefree", "line-freeness margin search");
    lf->add_option("--strip", cert_strip);
    lf->add_option("--field", cert_field, "smoothed body core field (overrides --strip)");
    lf->add_option("--margin", cert_margin, "required margin");
    lf->add_option("--window", cert_window, "z window half-width");
    bool lf_glued = false;
    lf->add_flag("--glued", lf_glued, "use the glued body E instead of the bare strip");
    lf->add_option("-o,--out", cert_out);
    lf->callback([&] {
        SectionDistance sections;
        if (!cert_field.empty()) {
            sections = smoothed_sections(SupportField::load_binary(cert_field));
        } else {
            StripModel s = load_strip(cert_strip);
            sections = lf_glued ? glued_sections(s) : strip_sections(s);
        }
        rc = emit(linefree_certificate(sections, -cert_window, cert_window, cert_margin), cert_out);
    });

    // glue: sample the glued field E onto a grid file
    auto* glue = app.add_subcommand("glue", "glue strip to the quasi-cone, export field");
    std::string glue_strip = "strip.json", glue_out = "glued.ccsf";
    double glue_zmax = 12.0, glue_hz = 1.0 / 256;
    int glue_nt = 256;
    glue->add_option("--strip", glue_strip);
    glue->add_option("--z-max", glue_zmax);
    glue->add_option("--step", glue_hz);
    glue->add_option("--n-theta", glue_nt);
    glue->add_option("-o,--out", glue_out);
    glue->callback([&] {
        StripModel s = load_strip(glue_strip);
        glued_field(s, glue_zmax, glue_hz, glue_nt).save_binary(glue_out);
        std::cout << "glued field -> " << glue_out << "\n";
    });

    // smooth: convolve the deviation and export the smoothed core
    auto* smooth = app.add_subcommand("smooth", "smooth the glued body");
    std::string smooth_strip = "strip.json", smooth_out = "smoothed.ccsf";
    double smooth_eps = 1e-5, smooth_w = 1e-6;
    int smooth_nz = 2049, smooth_nt = 2048;
    smooth->add_option("--strip", smooth_strip);
    smooth->add_option("--eps", smooth_eps, "narrow kernel angular width (radians)");
    smooth->add_option("--wide-weight", smooth_w);
    smooth->add_option("--n-z", smooth_nz);
    smooth->add_option("--n-theta", smooth_nt);
    smooth->add_option("-o,--out", smooth_out);
    smooth->callback([&] {
        StripModel s = load_strip(smooth_strip);
        SmoothParams p;
        p.sigma_theta = smooth_eps;
        p.wide_weight = smooth_w;
        SmoothedBody D = smooth_glued(s, p, 4.0, smooth_nz, smooth_nt);
        SupportField snap = D.snapshot();
        snap.save_binary(smooth_out);
        SupDistance d = field_sup_distance(D, snap);
        std::cout << "delta = " << d.grid_sup << " (continuum bound " << d.continuum_bound
                  << ")\n";
        std::cout << "smoothed field -> " << smooth_out << "\n";
    });

    // export: OBJ / CSV from a binary field
    auto* exp = app.add_subcommand("export", "convert a field file to OBJ or CSV");
    std::string exp_field, exp_out = "body.obj", exp_format = "obj";
    int exp_stride = 8;
    exp->add_option("--field", exp_field)->required();
    exp->add_option("--format", exp_format, "obj or csv");
    exp->add_option("--stride", exp_stride, "grid decimation for obj");
    exp->add_option("-o,--out", exp_out);
    exp->callback([&] {
        SupportField f = SupportField::load_binary(exp_field);
        std::ofstream os(exp_out);
        if (exp_format == "csv")
            f.save_csv(os);
        else
            f.save_obj(os, exp_stride, std::max(1, f.n_theta() / 512));
        std::cout << exp_format << " -> " << exp_out << "\n";
    });

    // arnold verify
    auto* arnold = app.add_subcommand("arnold", "intersection/tangency counting");
    auto* arnold_verify = arnold->add_subcommand("verify", "random-line identity check");
    int arnold_n = 1000;
    uint64_t arnold_seed = 1;
    std::string arnold_out;
    arnold_verify->add_option("-n", arnold_n);
    arnold_verify->add_option("--seed", arnold_seed);
    arnold_verify->add_option("-o,--out", arnold_out);
    arnold_verify->callback([&] {
        rc = emit(arnold_certificate(hyperbolic_quadric(), arnold_n, arnold_seed), arnold_out);
    });

    // run: the whole pipeline
    auto* run = app.add_subcommand("run", "full construction + certificates");
    std::string run_config, run_report = "report.json", run_prefix;
    run->add_option("--config", run_config, "JSON config file");
    run->add_option("--report", run_report);
    run->add_option("--artifacts", run_prefix, "prefix for strip/field/mesh artifacts");
    run->callback([&] {
        PipelineConfig cfg;
        if (!run_config.empty()) {
            std::ifstream is(run_config);
            if (!is) throw std::runtime_error("cannot open " + run_config);
            nlohmann::json j;
            is >> j;
            cfg = PipelineConfig::from_json(j);
        }
        PipelineResult r = run_pipeline(cfg, &std::cerr);
        std::ofstream os(run_report);
        os << r.report.dump(2) << "\n";
        std::cout << "report -> " << run_report << "\n";
        if (!run_prefix.empty()) {
            std::ofstream ss(run_prefix + "_strip.json");
            ss << r.strip.to_json().dump() << "\n";
            r.snapshot.save_binary(run_prefix + "_smoothed.ccsf");
            std::ofstream ms(run_prefix + "_mesh.obj");
            r.snapshot.save_obj(ms, 16, std::max(1, r.snapshot.n_theta() / 512));
        }
        std::cout << "margins: strip=" << r.margin_strip << " glued=" << r.margin_glued
                  << " smoothed=" << r.margin_smoothed << " delta=" << r.delta
                  << " eps=" << r.chosen_eps << "\n";
        rc = r.pass ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
