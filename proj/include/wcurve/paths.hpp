// Certified path geometry on the x-plane shared by both curve families:
// fiber continuation along polylines with nearest-root matching, clearance
// detours around critical x-values, polygonal loops, and monodromy
// permutations. Everything downstream (periods, Abel maps) is built from
// these primitives, so each continuation step demands an unambiguous match
// and raises BranchClearanceViolated instead of guessing.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wcurve/curve.hpp"
#include "wcurve/errors.hpp"
#include "wcurve/numeric.hpp"
#include "wcurve/plane.hpp"

namespace wcurve {

// ---------------------------------------------------------------------------
// Uniform access to the two curve families
// ---------------------------------------------------------------------------

inline int sheet_count(const CyclicCurveSpec& spec) { return static_cast<int>(spec.r()); }
inline int sheet_count(const PlaneWeierstrassSpec& spec) { return static_cast<int>(spec.m()); }

inline std::vector<cplx> fiber(const CyclicCurveSpec& spec, cplx x) {
    return cyclic_fiber(spec, x);
}
inline std::vector<cplx> fiber(const PlaneWeierstrassSpec& spec, cplx x) {
    return plane_fiber(spec, x);
}

/// Plain term evaluation of an expression at finite (x, y); negative y powers
/// are allowed (they appear in denominators of basis elements).
inline cplx eval_xy(const FunctionExpr& f, cplx x, cplx y) {
    cplx acc(0.0);
    for (const Term& t : f.terms) {
        cplx xa(1.0);
        for (long long e = 0; e < t.a; ++e) xa *= x;
        cplx yb(1.0);
        long long bb = t.b < 0 ? -t.b : t.b;
        for (long long e = 0; e < bb; ++e) yb *= y;
        if (t.b < 0) yb = cplx(1.0) / yb;
        acc += t.c * xa * yb;
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
        raise(ErrorCode::PoleAtPoint, "evaluation overflowed (pole at point)");
    return acc;
}

/// Critical x-values, their spread, per-point isolation radii, and the
/// smallest pairwise gap. Computed once per curve (the plane discriminant is
/// expensive) and threaded through every path construction.
struct SurfaceGeometry {
    std::vector<cplx> critical;
    std::vector<double> radius; // loop radius isolating each critical value
    double scale = 1.0;         // max(1, max |critical x|)
    double min_gap = 1.0;       // smallest pairwise distance between critical x
};

namespace detail {

inline SurfaceGeometry geometry_from_critical(std::vector<cplx> crit) {
    SurfaceGeometry geo;
    geo.critical = std::move(crit);
    geo.scale = 1.0;
    for (const cplx& c : geo.critical) geo.scale = std::max(geo.scale, std::abs(c));
    geo.min_gap = 2.0 * geo.scale;
    geo.radius.assign(geo.critical.size(), 0.5 * geo.scale);
    for (size_t i = 0; i < geo.critical.size(); ++i) {
        double nearest = 2.0 * geo.scale;
        for (size_t j = 0; j < geo.critical.size(); ++j)
            if (j != i)
                nearest = std::min(nearest, std::abs(geo.critical[i] - geo.critical[j]));
        geo.min_gap = std::min(geo.min_gap, nearest);
        geo.radius[i] = 0.25 * nearest;
    }
    return geo;
}

} // namespace detail

inline SurfaceGeometry surface_geometry(const CyclicCurveSpec& spec) {
    return detail::geometry_from_critical(spec.branch_points());
}

namespace detail {

/// Synthetic division of an ascending-coefficient polynomial by (x - a);
/// returns the quotient and stores P(a) in `value`.
inline Poly poly_deflate(const Poly& p, cplx a, cplx& value) {
    if (p.size() <= 1) {
        value = p.empty() ? cplx(0.0) : p[0];
        return Poly{};
    }
    Poly q(p.size() - 1);
    cplx acc = p.back();
    for (size_t k = p.size() - 1; k-- > 0;) {
        q[k] = acc;
        acc = p[k] + a * acc;
    }
    value = acc;
    return q;
}

} // namespace detail

/// Critical x-values of a plane curve, fully resolved. Multiple discriminant
/// roots scatter far beyond machine precision, so the raw root list cannot
/// distinguish a node from a nearby simple vertical tangent. This routine
/// deflates the exact (Newton-refined) node roots out of the discriminant,
/// clusters what remains, takes cluster means (exact to the scatter symmetry
/// for a pure multiple root), and polishes two-sheet collisions with a
/// two-variable Newton iteration on (f, f_y). A totals check against the
/// discriminant degree certifies that nothing was lost.
inline SurfaceGeometry surface_geometry(const PlaneWeierstrassSpec& spec) {
    PlaneCurveGeometry pg = plane_geometry(spec);
    Poly disc = plane_discriminant_poly(spec);
    const long long disc_deg = poly_degree(disc);

    // evaluation scale of disc at a: sum |c_j| |a|^j
    auto disc_scale = [&](cplx a) {
        double s = 0.0, pw = 1.0;
        for (size_t j = 0; j < disc.size(); ++j) {
            s += std::abs(disc[j]) * pw;
            pw *= std::abs(a);
        }
        return s + 1e-300;
    };

    long long removed = 0;
    Poly work = disc;
    for (const NodeInfo& node : pg.nodes) {
        int guard = 0;
        while (poly_degree(work) > 0 && ++guard <= 2 * static_cast<int>(spec.m())) {
            cplx val;
            Poly q = detail::poly_deflate(work, node.x, val);
            if (std::abs(val) > 1e-9 * disc_scale(node.x)) break;
            work = std::move(q);
            ++removed;
        }
        if (guard == 1)
            raise(ErrorCode::UnsupportedSingularity,
                  "certified node is not a discriminant root");
    }

    // Quadratically convergent polish of a two-sheet collision near seed_x;
    // returns true and overwrites seed_x on certified convergence.
    auto polish_tangent = [&](cplx& seed_x) {
        auto roots = poly_roots(spec.y_polynomial(seed_x));
        cplx ymid(0.0);
        double best = 1e300;
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                if (double d = std::abs(roots[i] - roots[j]); d < best) {
                    best = d;
                    ymid = 0.5 * (roots[i] + roots[j]);
                }
        cplx x = seed_x, y = ymid;
        for (int it = 0; it < 60; ++it) {
            cplx fv = spec.f(x, y), gv = spec.f_y(x, y);
            cplx jxx = spec.f_x(x, y), jxy = spec.f_y(x, y);
            cplx jyx = spec.f_xy(x, y), jyy = spec.f_yy(x, y);
            cplx det = jxx * jyy - jxy * jyx;
            if (std::abs(det) < 1e-250) break;
            cplx dx = (jyy * fv - jxy * gv) / det;
            cplx dy = (-jyx * fv + jxx * gv) / det;
            x -= dx;
            y -= dy;
            if (std::abs(x - seed_x) > 0.1 * (1.0 + std::abs(seed_x))) break; // left basin
            if (std::abs(dx) + std::abs(dy) < 1e-14 * (1.0 + std::abs(x) + std::abs(y))) break;
        }
        double vscale = detail::plane_value_scale(spec, x, y);
        bool ok = std::abs(x - seed_x) < 0.1 * (1.0 + std::abs(seed_x)) &&
                  std::abs(spec.f(x, y)) + std::abs(spec.f_y(x, y)) < 1e-9 * vscale &&
                  std::abs(spec.f_x(x, y)) > 1e-7 * vscale;
        if (ok) seed_x = x;
        return ok;
    };

    std::vector<cplx> tangents;
    if (poly_degree(work) > 0) {
        auto raw = poly_roots(work);
        // cluster the deflated roots; a pure multiple root scatters
        // symmetrically around the true value, distinct simple roots
        // (conjugate tangent pairs) sit farther apart than the scatter
        std::vector<std::vector<cplx>> clusters;
        for (const cplx& r : raw) {
            bool placed = false;
            for (auto& cl : clusters)
                if (!placed && std::abs(r - cl.front()) < 6e-3 * (1.0 + std::abs(r))) {
                    cl.push_back(r);
                    placed = true;
                }
            if (!placed) clusters.push_back({r});
        }
        for (const auto& cl : clusters) {
            std::vector<cplx> converged;
            for (cplx r : cl)
                if (polish_tangent(r)) {
                    bool dup = false;
                    for (const cplx& c : converged)
                        dup = dup || std::abs(c - r) < 1e-6 * (1.0 + std::abs(r));
                    if (!dup) converged.push_back(r);
                }
            if (converged.size() <= 1) {
                // single critical value: a polished simple tangent, or the
                // cluster mean of a pure multiple root (higher ramification)
                cplx mean(0.0);
                for (const cplx& r : cl) mean += r;
                mean /= double(cl.size());
                tangents.push_back(converged.empty() ? mean : converged.front());
            } else if (converged.size() == cl.size()) {
                for (const cplx& c : converged) tangents.push_back(c);
            } else {
                raise(ErrorCode::CancellationDetected,
                      "critical cluster resolved inconsistently");
            }
            removed += static_cast<long long>(cl.size());
        }
    }
    if (removed != disc_deg)
        raise(ErrorCode::CancellationDetected,
              "critical value refinement lost discriminant roots");

    std::vector<cplx> crit;
    for (const NodeInfo& node : pg.nodes) crit.push_back(node.x);
    for (const cplx& t : tangents) crit.push_back(t);
    std::sort(crit.begin(), crit.end(), [](const cplx& p, const cplx& q) {
        if (p.real() != q.real()) return p.real() < q.real();
        return p.imag() < q.imag();
    });
    return detail::geometry_from_critical(crit);
}

// ---------------------------------------------------------------------------
// Certified fiber continuation
// ---------------------------------------------------------------------------

namespace detail {

/// Match each tracked value to its nearest candidate; the match is accepted
/// only when every assignment is injective and beats the runner-up by a
/// factor of two. `weight` rescales both sides before comparison (used by
/// the ramified-endpoint tracker where the whole fiber contracts to a point).
inline bool match_fiber(const std::vector<cplx>& values, const std::vector<cplx>& roots,
                        std::vector<int>& pick) {
    pick.assign(values.size(), -1);
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < values.size(); ++i) {
        double best = 1e300, second = 1e300;
        int bi = -1;
        for (size_t j = 0; j < roots.size(); ++j) {
            double d = std::abs(values[i] - roots[j]);
            if (d < best) {
                second = best;
                best = d;
                bi = static_cast<int>(j);
            } else if (d < second) {
                second = d;
            }
        }
        if (bi < 0 || used[static_cast<size_t>(bi)] || best > 0.5 * second) return false;
        used[static_cast<size_t>(bi)] = true;
        pick[i] = bi;
    }
    return true;
}

} // namespace detail

/// Continue all fiber values from x_from to x_to along the straight segment,
/// permuting `values` in place so entry i remains the analytic continuation
/// of the initial entry i. Steps halve until nearest-root matching is
/// unambiguous; raises BranchClearanceViolated on step underflow.
template <class Spec>
void track_fiber_segment(const Spec& spec, std::vector<cplx>& values, cplx x_from, cplx x_to,
                         long long* eval_counter = nullptr) {
    const double seg_len = std::abs(x_to - x_from);
    if (seg_len == 0.0) return;
    double t = 0.0, h = 1.0;
    int iter_guard = 0;
    std::vector<int> pick;
    while (t < 1.0) {
        if (++iter_guard > 200000)
            raise(ErrorCode::BranchClearanceViolated, "fiber tracking stalled");
        double tn = std::min(1.0, t + h);
        cplx xn = x_from + (x_to - x_from) * tn;
        auto roots = fiber(spec, xn);
        if (eval_counter) ++*eval_counter;
        if (!detail::match_fiber(values, roots, pick)) {
            h *= 0.5;
            if (h * seg_len < 1e-9 * (1.0 + seg_len))
                raise(ErrorCode::BranchClearanceViolated,
                      "tracking step underflow near a critical point");
            continue;
        }
        for (size_t i = 0; i < values.size(); ++i) values[i] = roots[static_cast<size_t>(pick[i])];
        t = tn;
        h = std::min(1.0, h * 1.9);
    }
}

template <class Spec>
void track_fiber_path(const Spec& spec, std::vector<cplx>& values, const std::vector<cplx>& xs,
                      long long* eval_counter = nullptr) {
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        track_fiber_segment(spec, values, xs[i], xs[i + 1], eval_counter);
}

// ---------------------------------------------------------------------------
// Polyline builders
// ---------------------------------------------------------------------------

/// Straight path from `from` to `to` with perpendicular detours inserted
/// around any critical x-value that the segment approaches closer than rho.
/// A critical point already within rho of either endpoint is exempt (legs
/// that deliberately end near a branch point manage that approach
/// themselves). Returns the full waypoint list including both endpoints.
inline std::vector<cplx> clearance_polyline(const SurfaceGeometry& geo, cplx from, cplx to,
                                            double rho) {
    std::vector<cplx> out{from};
    struct Seg {
        cplx a, b;
        int depth;
    };
    std::vector<Seg> stack{{from, to, 0}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        cplx d = s.b - s.a;
        double len = std::abs(d);
        // deepest violation along this segment
        double worst = rho;
        cplx worst_proj(0.0), worst_c(0.0);
        bool found = false;
        for (const cplx& c : geo.critical) {
            if (std::abs(c - s.a) < rho || std::abs(c - s.b) < rho) continue;
            if (len == 0.0) continue;
            double t = std::clamp(((c - s.a) / d).real(), 0.0, 1.0);
            cplx proj = s.a + t * d;
            double dist = std::abs(c - proj);
            if (dist < worst) {
                worst = dist;
                worst_proj = proj;
                worst_c = c;
                found = true;
            }
        }
        if (!found) {
            out.push_back(s.b);
            continue;
        }
        if (s.depth >= 12)
            raise(ErrorCode::BranchClearanceViolated,
                  "clearance detour recursion exhausted; path is pinned between critical points");
        cplx away = worst_proj - worst_c;
        cplx nhat;
        if (std::abs(away) > 1e-12 * (1.0 + std::abs(worst_c))) {
            nhat = away / std::abs(away);
        } else {
            nhat = (d / len) * cplx(0.0, 1.0); // segment hits the point: pick the left side
        }
        cplx w = worst_c + 1.7 * rho * nhat;
        // process nearer half first: push far half, then near half
        stack.push_back({w, s.b, s.depth + 1});
        stack.push_back({s.a, w, s.depth + 1});
    }
    return out;
}

/// Closed polygonal loop around `center`: `laps` full turns of a regular
/// polygon, starting and ending at angle `start_angle`. Counterclockwise for
/// ccw = true. First and last waypoints coincide exactly.
inline std::vector<cplx> circle_polygon(cplx center, double radius, int sides, int laps,
                                        double start_angle, bool ccw) {
    std::vector<cplx> out;
    int total = sides * laps;
    out.reserve(static_cast<size_t>(total) + 1);
    for (int k = 0; k <= total; ++k) {
        double ang = start_angle + (ccw ? 1.0 : -1.0) * 2.0 * kPi * double(k % sides) / sides;
        if (k == total) ang = start_angle;
        out.push_back(center + radius * cplx(std::cos(ang), std::sin(ang)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monodromy
// ---------------------------------------------------------------------------

/// Permutation of the fiber labels induced by one counterclockwise loop of
/// radius `radius` around `center`, based at center + radius. Entry i of the
/// result is the label whose sheet the initial label i lands on; identity
/// means the loop is trivial on every sheet. The arrival fiber must match
/// the departure fiber to 1e-8 relative or the loop is rejected.
template <class Spec>
std::vector<int> monodromy(const Spec& spec, const SurfaceGeometry& geo, cplx center,
                           double radius, int sides = 32) {
    (void)geo;
    cplx base = center + cplx(radius, 0.0);
    auto start = fiber(spec, base);
    auto values = start;
    auto loop = circle_polygon(center, radius, sides, 1, 0.0, true);
    track_fiber_path(spec, values, loop);
    std::vector<int> perm(values.size(), -1);
    std::vector<int> pick;
    if (!detail::match_fiber(values, start, pick))
        raise(ErrorCode::BranchClearanceViolated,
              "monodromy loop did not return to a recognizable fiber");
    double scale = 0.0;
    for (const cplx& y : start) scale = std::max(scale, std::abs(y));
    for (size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - start[static_cast<size_t>(pick[i])]) > 1e-8 * (1.0 + scale))
            raise(ErrorCode::BranchClearanceViolated,
                  "monodromy closure residual exceeds tolerance");
        perm[i] = pick[i];
    }
    return perm;
}

/// Monodromy around the i-th critical x-value at its isolation radius.
template <class Spec>
std::vector<int> monodromy_around(const Spec& spec, const SurfaceGeometry& geo, size_t index,
                                  int sides = 32) {
    if (index >= geo.critical.size())
        raise(ErrorCode::DegreeBoundViolated, "critical point index out of range");
    return monodromy(spec, geo, geo.critical[index], geo.radius[index], sides);
}

} // namespace wcurve
