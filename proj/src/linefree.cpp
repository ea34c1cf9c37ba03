#include "ccgeo/linefree.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ccgeo/rng.hpp"

namespace ccgeo {

namespace {

// Support of the section in direction theta: max(r, <e0,dir>, <e1,dir>).
inline double section_support(double ct, double st, double r, const std::array<double, 2>& e0,
                              const std::array<double, 2>& e1) {
    double h = std::max(e0[0] * ct + e0[1] * st, e1[0] * ct + e1[1] * st);
    return r >= 0 ? std::max(h, r) : h;
}

}  // namespace

double section_distance(double px, double py, double r, const std::array<double, 2>& e0,
                        const std::array<double, 2>& e1) {
    // dist = max(0, max_theta <p,dir> - h(dir)).  The maximum over theta of a
    // piecewise-sinusoidal function is attained either at the critical point
    // of one of the pieces or at a breakpoint between pieces; every such
    // angle is listed below, so the maximum over candidates is exact.
    double cand[12];
    int nc = 0;
    auto push = [&](double x, double y) {
        double n = std::hypot(x, y);
        if (n > 1e-300) cand[nc++] = std::atan2(y, x);
    };
    push(px - e0[0], py - e0[1]);
    push(px - e1[0], py - e1[1]);
    // Breakpoint where the two endpoint pieces meet: perpendicular to e0-e1.
    push(-(e0[1] - e1[1]), e0[0] - e1[0]);
    push(e0[1] - e1[1], -(e0[0] - e1[0]));
    if (r >= 0) {
        push(px, py);
        // Breakpoints where an endpoint piece meets the disc piece.
        for (const auto& e : {e0, e1}) {
            double n = std::hypot(e[0], e[1]);
            if (n <= r || n < 1e-300) continue;
            double base = std::atan2(e[1], e[0]);
            double da = std::acos(std::min(1.0, r / n));
            cand[nc++] = base + da;
            cand[nc++] = base - da;
        }
    }
    double best = -1e300;
    for (int i = 0; i < nc; ++i) {
        double ct = std::cos(cand[i]), st = std::sin(cand[i]);
        best = std::max(best, px * ct + py * st - section_support(ct, st, r, e0, e1));
    }
    return std::max(0.0, best);
}

SectionDistance strip_sections(const StripModel& s) {
    auto m = std::make_shared<StripModel>(s);
    return [m](double z, double x, double y) {
        double f1 = m->f1(z), f2 = m->f2(z), u1 = m->u1(z), u2 = m->u2(z);
        return section_distance(x, y, -1.0, {u1 - f1, u2 - f2}, {u1 + f1, u2 + f2});
    };
}

SectionDistance glued_sections(const StripModel& s) {
    auto m = std::make_shared<StripModel>(s);
    return [m](double z, double x, double y) {
        double f1 = m->f1(z), f2 = m->f2(z), u1 = m->u1(z), u2 = m->u2(z);
        double r = std::fabs(z) >= 1.0 ? std::fabs(z) - 1.0 : -1.0;
        return section_distance(x, y, r, {u1 - f1, u2 - f2}, {u1 + f1, u2 + f2});
    };
}

SectionDistance support_sections(std::function<double(double, double)> h, double z_core) {
    return [h = std::move(h), z_core](double z, double x, double y) {
        if (std::fabs(z) > z_core)
            return std::max(0.0, std::hypot(x, y) - (std::fabs(z) - 1.0));
        constexpr int kCoarse = 256;
        double best = -1e300, best_t = 0;
        for (int it = 0; it < kCoarse; ++it) {
            double th = 2.0 * M_PI * it / kCoarse;
            double v = x * std::cos(th) + y * std::sin(th) - h(z, th);
            if (v > best) {
                best = v;
                best_t = th;
            }
        }
        // Golden-section refine around the coarse argmax.
        const double gr = 0.6180339887498949;
        double a = best_t - 2.0 * M_PI / kCoarse, b = best_t + 2.0 * M_PI / kCoarse;
        auto val = [&](double th) { return x * std::cos(th) + y * std::sin(th) - h(z, th); };
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double v1 = val(x1), v2 = val(x2);
        for (int i = 0; i < 45; ++i) {
            if (v1 > v2) {
                b = x2; x2 = x1; v2 = v1;
                x1 = b - gr * (b - a); v1 = val(x1);
            } else {
                a = x1; x1 = x2; v1 = v2;
                x2 = a + gr * (b - a); v2 = val(x2);
            }
        }
        return std::max(0.0, std::max(best, std::max(v1, v2)));
    };
}

SectionDistance smoothed_sections(const SupportField& core) {
    auto f = std::make_shared<SupportField>(core);
    double z_core = std::max(std::fabs(f->z_min()), std::fabs(f->z_max()));
    return support_sections([f](double z, double th) { return f->eval(z, th); }, z_core);
}

namespace {

double maxdist_grid(const Line3& line, const SectionDistance& sections, double z_lo, double z_hi,
                    int n_grid) {
    double worst = 0;
    for (int i = 0; i <= n_grid; ++i) {
        double z = z_lo + (z_hi - z_lo) * i / n_grid;
        auto p = line.point_at(z);
        worst = std::max(worst, sections(z, p[0], p[1]));
    }
    return worst;
}

}  // namespace

double maxdist(const Line3& line, const SectionDistance& sections, double z_lo, double z_hi,
               int n_grid) {
    double h = (z_hi - z_lo) / n_grid;
    std::vector<double> d(n_grid + 1);
    for (int i = 0; i <= n_grid; ++i) {
        double z = z_lo + i * h;
        auto p = line.point_at(z);
        d[i] = sections(z, p[0], p[1]);
    }
    auto val = [&](double z) {
        auto p = line.point_at(z);
        return sections(z, p[0], p[1]);
    };
    double best = 0;
    const double gr = 0.6180339887498949;
    for (int i = 0; i <= n_grid; ++i) {
        best = std::max(best, d[i]);
        bool local_max = (i == 0 || d[i] >= d[i - 1]) && (i == n_grid || d[i] >= d[i + 1]);
        if (!local_max || d[i] == 0.0) continue;
        // Golden-section refinement over the bracketing cells.
        double a = z_lo + std::max(0, i - 1) * h, b = z_lo + std::min(n_grid, i + 1) * h;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double v1 = val(x1), v2 = val(x2);
        for (int k = 0; k < 35; ++k) {
            if (v1 > v2) {
                b = x2; x2 = x1; v2 = v1;
                x1 = b - gr * (b - a); v1 = val(x1);
            } else {
                a = x1; x1 = x2; v1 = v2;
                x2 = a + gr * (b - a); v2 = val(x2);
            }
        }
        best = std::max({best, v1, v2});
    }
    return best;
}

nlohmann::json LineSearchResult::to_json() const {
    return {{"best_line", best_line.to_json()}, {"margin", margin},
            {"evaluations", evaluations}, {"restarts", restarts}, {"witness_z", witness_z}};
}

namespace {

// Standard Nelder-Mead in 4 dimensions.
template <typename F>
std::pair<std::array<double, 4>, double> nelder_mead(F&& f, std::array<double, 4> x0, double step,
                                                     int max_iter, long& evals) {
    constexpr int n = 4;
    std::array<std::array<double, 4>, n + 1> pts;
    std::array<double, n + 1> fv;
    for (int i = 0; i <= n; ++i) {
        pts[i] = x0;
        if (i > 0) pts[i][i - 1] += step;
        fv[i] = f(pts[i]);
        ++evals;
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        std::array<int, n + 1> idx;
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        int lo = idx[0], hi = idx[n], nh = idx[n - 1];
        if (fv[hi] - fv[lo] < 1e-14) break;
        std::array<double, 4> cen{};
        for (int i = 0; i <= n; ++i)
            if (i != hi)
                for (int j = 0; j < n; ++j) cen[j] += pts[i][j] / n;
        auto mix = [&](double t) {
            std::array<double, 4> p;
            for (int j = 0; j < n; ++j) p[j] = cen[j] + t * (pts[hi][j] - cen[j]);
            return p;
        };
        auto xr = mix(-1.0);
        double fr = f(xr);
        ++evals;
        if (fr < fv[lo]) {
            auto xe = mix(-2.0);
            double fe = f(xe);
            ++evals;
            if (fe < fr) { pts[hi] = xe; fv[hi] = fe; }
            else { pts[hi] = xr; fv[hi] = fr; }
        } else if (fr < fv[nh]) {
            pts[hi] = xr; fv[hi] = fr;
        } else {
            auto xc = mix(fr < fv[hi] ? -0.5 : 0.5);
            double fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fv[hi])) { pts[hi] = xc; fv[hi] = fc; }
            else {
                for (int i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (int j = 0; j < n; ++j) pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
                    fv[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    int besti = 0;
    for (int i = 1; i <= n; ++i)
        if (fv[i] < fv[besti]) besti = i;
    return {pts[besti], fv[besti]};
}

}  // namespace

LineSearchResult line_search(const SectionDistance& sections, double z_lo, double z_hi,
                             double box, int restarts, uint64_t seed) {
    LineSearchResult res;
    res.restarts = restarts;
    auto objective = [&](const std::array<double, 4>& x) {
        Line3 l{x[0], x[1], x[2], x[3]};
        return maxdist(l, sections, z_lo, z_hi, 320);
    };
    double best = 1e300;
    std::array<double, 4> bestx{};
    for (int r = 0; r < restarts; ++r) {
        std::array<double, 4> x0;
        // Quasi-random starts; keep the symmetric twin (a,-b,-c,d) implicit
        // by spanning the full box.
        static const int primes[4] = {2, 3, 5, 7};
        for (int j = 0; j < 4; ++j)
            x0[j] = box * (2.0 * halton(static_cast<int>(seed) * 131 + r + 1, primes[j]) - 1.0);
        auto [x, fx] = nelder_mead(objective, x0, 0.25 * box, 250, res.evaluations);
        auto [x2, fx2] = nelder_mead(objective, x, 0.02 * box, 150, res.evaluations);
        if (fx2 < fx) { x = x2; fx = fx2; }
        if (fx < best) { best = fx; bestx = x; }
    }
    // Coordinate-wise golden polish.
    const double gr = 0.6180339887498949;
    for (int round = 0; round < 4; ++round) {
        for (int j = 0; j < 4; ++j) {
            double a = bestx[j] - 0.05 * box, b = bestx[j] + 0.05 * box;
            auto val = [&](double t) {
                auto x = bestx;
                x[j] = t;
                return objective(x);
            };
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double v1 = val(x1), v2 = val(x2);
            res.evaluations += 2;
            for (int k = 0; k < 30; ++k) {
                if (v1 < v2) {
                    b = x2; x2 = x1; v2 = v1;
                    x1 = b - gr * (b - a); v1 = val(x1);
                } else {
                    a = x1; x1 = x2; v1 = v2;
                    x2 = a + gr * (b - a); v2 = val(x2);
                }
                ++res.evaluations;
            }
            double t = v1 < v2 ? x1 : x2, vt = std::min(v1, v2);
            if (vt < best) { best = vt; bestx[j] = t; }
        }
    }
    res.best_line = {bestx[0], bestx[1], bestx[2], bestx[3]};
    res.margin = best;
    // Witness z of the max for the best line.
    double worst = -1, wz = 0;
    for (int i = 0; i <= 640; ++i) {
        double z = z_lo + (z_hi - z_lo) * i / 640.0;
        auto p = res.best_line.point_at(z);
        double dzv = sections(z, p[0], p[1]);
        if (dzv > worst) { worst = dzv; wz = z; }
    }
    res.witness_z = wz;
    return res;
}

GridScanResult grid_scan(const SectionDistance& sections, double z_lo, double z_hi, double box,
                         double resolution, double lipschitz) {
    GridScanResult res;
    res.resolution = resolution;
    // The z-slopes b, d enter the distance through b*z with |z| <= max|z|,
    // so their effective Lipschitz factor is larger; fold that into the cell
    // radius below.
    double zmax = std::max(std::fabs(z_lo), std::fabs(z_hi));
    auto eval = [&](const std::array<double, 4>& x) {
        ++res.evaluations;
        return maxdist_grid({x[0], x[1], x[2], x[3]}, sections, z_lo, z_hi, 80);
    };

    // Start coarse; each level halves the spacing and keeps only cells that
    // could still contain a value below the current minimum.
    double coarse = resolution;
    while (coarse < 0.08) coarse *= 2;
    std::vector<std::array<double, 4>> centers;
    for (double a = -box; a <= box + 1e-12; a += coarse)
        for (double b = -box; b <= box + 1e-12; b += coarse)
            for (double c = -box; c <= box + 1e-12; c += coarse)
                for (double d = -box; d <= box + 1e-12; d += coarse)
                    centers.push_back({a, b, c, d});

    double best = 1e300;
    std::array<double, 4> bestx{};
    double spacing = coarse;
    while (true) {
        std::vector<double> vals(centers.size());
        for (size_t i = 0; i < centers.size(); ++i) {
            vals[i] = eval(centers[i]);
            if (vals[i] < best) { best = vals[i]; bestx = centers[i]; }
        }
        if (spacing <= resolution * (1 + 1e-9)) break;
        double next = spacing * 0.5;
        // A cell of half-width `spacing/2` around each center can reach at
        // most lipschitz * weighted radius below its center value.
        double radius = 0.5 * spacing * (1.0 + zmax);
        std::vector<std::array<double, 4>> kept;
        for (size_t i = 0; i < centers.size(); ++i) {
            if (vals[i] - lipschitz * radius > best) continue;
            for (int m = 0; m < 16; ++m) {
                std::array<double, 4> c = centers[i];
                for (int j = 0; j < 4; ++j) c[j] += ((m >> j) & 1 ? 0.5 : -0.5) * next;
                bool inside = true;
                for (int j = 0; j < 4; ++j)
                    if (std::fabs(c[j]) > box + 1e-12) inside = false;
                if (inside) kept.push_back(c);
            }
        }
        centers = std::move(kept);
        spacing = next;
        if (centers.empty()) break;
    }
    res.margin = best;
    res.best_line = {bestx[0], bestx[1], bestx[2], bestx[3]};
    return res;
}

Certificate linefree_certificate(const SectionDistance& sections, double z_lo, double z_hi,
                                 double required_margin, double box, int restarts,
                                 uint64_t seed) {
    Certificate cert;
    cert.name = "linefree";
    LineSearchResult r = line_search(sections, z_lo, z_hi, box, restarts, seed);
    cert.pass = r.margin >= required_margin;
    cert.margin = r.margin;
    cert.witness = "line a=" + std::to_string(r.best_line.a) + " b=" + std::to_string(r.best_line.b) +
                   " c=" + std::to_string(r.best_line.c) + " d=" + std::to_string(r.best_line.d);
    cert.details = {{"search", r.to_json()}, {"required_margin", required_margin}};
    return cert;
}

}  // namespace ccgeo
