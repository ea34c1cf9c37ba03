#pragma once

#include <functional>

#include "ccgeo/certificate.hpp"
#include "ccgeo/strip.hpp"
#include "ccgeo/supportfield.hpp"

namespace ccgeo {

// Line in R^3 transverse to horizontal planes: z -> (a + b z, c + d z, z).
struct Line3 {
    double a = 0, b = 0, c = 0, d = 0;
    std::array<double, 2> point_at(double z) const { return {a + b * z, c + d * z}; }
    nlohmann::json to_json() const { return {{"a", a}, {"b", b}, {"c", c}, {"d", d}}; }
};

// Planar section oracle: z -> distance from a point to the section.
using SectionDistance = std::function<double(double z, double x, double y)>;

// Exact distance from p to conv(disc(0, r) U segment [e0, e1]).  r < 0 means
// no disc.  Evaluated via the support-function max over the finite candidate
// set of critical directions, so it is exact for exterior points and returns
// 0 inside.
double section_distance(double px, double py, double r, const std::array<double, 2>& e0,
                        const std::array<double, 2>& e1);

// Section oracles for the three bodies of the construction.
SectionDistance strip_sections(const StripModel& s);
SectionDistance glued_sections(const StripModel& s);  // hull(segment, disc |z|-1)
// Sections of a body given by an arbitrary support-function evaluator
// h(z, theta): max over theta of <p,dir> - h, coarse scan plus golden
// refinement; quasi-cone disc outside |z| > z_core.
SectionDistance support_sections(std::function<double(double, double)> h, double z_core);
// Same for a sampled support grid (bilinear rows).
SectionDistance smoothed_sections(const SupportField& core);

// max over z in [z_lo, z_hi] of the section distance along the line,
// coarse grid then golden-section refinement of the bracketing cells.
double maxdist(const Line3& line, const SectionDistance& sections, double z_lo, double z_hi,
               int n_grid = 320);

struct LineSearchResult {
    Line3 best_line;
    double margin = 0;  // min over searched lines of maxdist
    long evaluations = 0;
    int restarts = 0;
    double witness_z = 0;
    nlohmann::json to_json() const;
};

// Multistart Nelder-Mead over (a,b,c,d) in the coercivity box, followed by
// coordinate-wise polish.  Deterministic for a fixed seed.
LineSearchResult line_search(const SectionDistance& sections, double z_lo, double z_hi,
                             double box = 1.0, int restarts = 32, uint64_t seed = 1);

// Lipschitz-pruned multilevel lattice scan over the coercivity box down to
// the given resolution; returns the lattice minimum of maxdist (restricted
// to the z-subwindow where the margin phenomenon lives, so it is a lower
// bound for the full-window value).
struct GridScanResult {
    Line3 best_line;
    double margin = 0;
    long evaluations = 0;
    double resolution = 0;
};
GridScanResult grid_scan(const SectionDistance& sections, double z_lo, double z_hi,
                         double box = 1.0, double resolution = 0.01, double lipschitz = 2.0);

Certificate linefree_certificate(const SectionDistance& sections, double z_lo, double z_hi,
                                 double required_margin, double box = 1.0, int restarts = 32,
                                 uint64_t seed = 1);

}  // namespace ccgeo
