#pragma once

#include <iosfwd>

#include "ccgeo/gaussmap.hpp"
#include "ccgeo/glue_smooth.hpp"
#include "ccgeo/linefree.hpp"
#include "ccgeo/strip.hpp"
#include "ccgeo/supportfield.hpp"

namespace ccgeo {

struct PipelineConfig {
    // strip ODE stage
    int m = 8;
    double h_ode = 1.0 / 8192;
    double z_max_ode = 4.0;
    // field grids
    double z_core = 4.0;
    int n_z_core = 2049;       // h_z = 1/256 over [-4, 4]
    int n_theta = 2048;
    double field_z_max = 12.0;  // coarse full-window fields (export, checks)
    int coarse_n_theta = 256;
    double coarse_h_z = 1.0 / 256;
    // smoothing schedule
    double eps0 = 0.05;
    double delta0 = 0.1;
    int max_halvings = 24;
    double eps_floor = 1e-7;
    double wide_weight = 1e-6;
    // line search
    double z_window = 10.0;
    double box = 1.0;
    int restarts = 24;
    int restarts_smoothed = 4;
    uint64_t seed = 1;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

struct PipelineResult {
    bool pass = false;
    nlohmann::json report;
    StripModel strip;
    SmoothedBody body;
    SupportField snapshot;  // F_D sampled on the core grid
    double margin_strip = 0, margin_glued = 0, margin_smoothed = 0;
    double delta = 0, delta_bound = 0, chosen_eps = 0;
};

// Full construction: strip -> certificates -> glue -> line margins ->
// epsilon schedule -> smooth -> smoothed certificates -> line margin on D.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

// Implicit-function oracle for the boundary of a support-field body:
// P(x,y,z) = max_theta(<(x,y),dir> - F(z,theta)), with envelope-theorem
// gradient and Hessian.
ScalarFieldOracle oracle_from_field(const SupportField& core);

// Same oracle for the smoothed body, using the closed-form narrow-smoothing
// derivatives instead of grid differences.
ScalarFieldOracle oracle_from_body(const SmoothedBody& body);

// Analytic-to-grid samplers for the unsmoothed bodies.
SupportField strip_field(const StripModel& s, double z_max, double h_z, int n_theta);
SupportField glued_field(const StripModel& s, double z_max, double h_z, int n_theta);

}  // namespace ccgeo
