// Adaptive Gauss-Legendre integration of the basis one-forms along certified
// paths. Every integral tracks the full fiber through the quadrature nodes so
// the evaluated lift is the analytic continuation of a declared starting
// label, and every panel is accepted only when a split-in-two evaluation
// agrees to tolerance. Three leg shapes cover all paths used downstream:
// straight x-plane segments, the ray to infinity x(t) = A t^{-e}, and
// ramified approach legs x(u) = x0 + c u^e ending where sheets merge.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wcurve/basis.hpp"
#include "wcurve/gauss.hpp"
#include "wcurve/paths.hpp"

namespace wcurve {

/// Numerators and common denominator of the integrand family
/// phi_j(x, y) / h(x, y) dx.
struct FormSet {
    std::vector<FunctionExpr> numerators;
    FunctionExpr denominator;
};

inline FormSet forms_from_basis(const DifferentialBasis& basis) {
    FormSet fs;
    fs.denominator = basis.h;
    for (const BasisElement& e : basis.phi) fs.numerators.push_back(e.expr);
    return fs;
}

inline FormSet forms_from_basis(const PlaneDifferentialBasis& basis) {
    FormSet fs;
    fs.denominator = basis.h;
    for (const BasisElement& e : basis.phi) fs.numerators.push_back(e.expr);
    return fs;
}

struct IntegrationOptions {
    int order = 24;      // Gauss-Legendre order per panel
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    // Deep enough for a segment that ends a few microns from a fiber pinch
    // (depth grows like log2(segment length / pinch clearance)).
    int max_depth = 30;
};

/// Shared fiber-evaluation budget for one top-level computation.
struct IntegrationStats {
    long long evals = 0;
    long long cap = 40'000'000;
    void charge(long long n) {
        evals += n;
        if (evals > cap)
            raise(ErrorCode::QuadratureBudgetExceeded,
                  "quadrature evaluation budget exhausted");
    }
};

namespace detail {

inline Eigen::VectorXcd form_values(const FormSet& fs, cplx x, cplx y, cplx jac) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(fs.numerators.size()));
    cplx den = eval_xy(fs.denominator, x, y);
    for (size_t j = 0; j < fs.numerators.size(); ++j)
        out(static_cast<Eigen::Index>(j)) = eval_xy(fs.numerators[j], x, y) / den * jac;
    if (!out.allFinite())
        raise(ErrorCode::PoleAtPoint, "one-form evaluation overflowed along the path");
    return out;
}

inline bool close_enough(const Eigen::VectorXcd& coarse, const Eigen::VectorXcd& fine,
                         const IntegrationOptions& opt) {
    double err = (coarse - fine).cwiseAbs().maxCoeff();
    double mag = fine.cwiseAbs().maxCoeff();
    return err <= opt.abs_tol + opt.rel_tol * mag;
}

// ---- straight x-plane segments ---------------------------------------------

template <class Spec>
Eigen::VectorXcd segment_panel(const Spec& spec, const FormSet& fs, cplx a, cplx b,
                               std::vector<cplx>& values, int label, int order,
                               IntegrationStats& stats) {
    const GaussRule& rule = gauss_legendre(order);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fs.numerators.size()));
    cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx x_prev = a;
    long long track_evals = 0;
    for (int k = 0; k < order; ++k) {
        cplx xk = mid + half * rule.nodes[static_cast<size_t>(k)];
        track_fiber_segment(spec, values, x_prev, xk, &track_evals);
        x_prev = xk;
        acc += rule.weights[static_cast<size_t>(k)] *
               form_values(fs, xk, values[static_cast<size_t>(label)], half);
    }
    track_fiber_segment(spec, values, x_prev, b, &track_evals);
    stats.charge(track_evals);
    return acc;
}

template <class Spec>
Eigen::VectorXcd segment_adaptive(const Spec& spec, const FormSet& fs, cplx a, cplx b,
                                  std::vector<cplx>& values, int label,
                                  const IntegrationOptions& opt, IntegrationStats& stats,
                                  int depth) {
    std::vector<cplx> v1 = values;
    Eigen::VectorXcd whole = segment_panel(spec, fs, a, b, v1, label, opt.order, stats);
    std::vector<cplx> v2 = values;
    cplx mid = 0.5 * (a + b);
    Eigen::VectorXcd split = segment_panel(spec, fs, a, mid, v2, label, opt.order, stats);
    split += segment_panel(spec, fs, mid, b, v2, label, opt.order, stats);
    if (close_enough(whole, split, opt)) {
        values = v2;
        return split;
    }
    if (depth >= opt.max_depth)
        raise(ErrorCode::QuadratureBudgetExceeded,
              "adaptive refinement depth exhausted on a segment");
    Eigen::VectorXcd left =
        segment_adaptive(spec, fs, a, mid, values, label, opt, stats, depth + 1);
    return left + segment_adaptive(spec, fs, mid, b, values, label, opt, stats, depth + 1);
}

// ---- ray to infinity --------------------------------------------------------

/// Growth exponent of y against x far out: |y| ~ |x|^q.
inline double fiber_growth_exponent(const CyclicCurveSpec& spec) {
    return double(spec.s()) / double(spec.r());
}
inline double fiber_growth_exponent(const PlaneWeierstrassSpec& spec) {
    return double(spec.n()) / double(spec.m());
}

/// Fiber over a far-out point, solved in coordinates that stay O(1). Cyclic
/// fibers are explicit radicals and need no rescaling; plane fibers are
/// solved for eta = y / gauge^n with gauge = x^{1/m} continued along constant
/// argument, so the companion-matrix coefficients stay bounded.
inline std::vector<cplx> far_fiber(const CyclicCurveSpec& spec, cplx x, cplx /*gauge*/) {
    return cyclic_fiber(spec, x);
}
inline std::vector<cplx> far_fiber(const PlaneWeierstrassSpec& spec, cplx x, cplx gauge) {
    const long long m = spec.m(), n = spec.n();
    Poly p(static_cast<size_t>(m) + 1, cplx(0.0));
    p[static_cast<size_t>(m)] = cplx(1.0);
    cplx gn(1.0);
    for (long long e = 0; e < n; ++e) gn *= gauge; // gauge^n
    cplx scale = gn;
    for (long long i = 1; i <= m; ++i) {
        p[static_cast<size_t>(m - i)] =
            poly_eval(spec.A()[static_cast<size_t>(i - 1)], x) / scale;
        scale *= gn;
    }
    auto roots = poly_roots(p);
    for (cplx& r : roots) r *= gn;
    std::sort(roots.begin(), roots.end(), [](const cplx& u, const cplx& v) {
        double au = std::arg(u), av = std::arg(v);
        if (au != av) return au < av;
        return std::abs(u) < std::abs(v);
    });
    return roots;
}

/// One continuation step along the ray x(t) = A t^{-e}, matching fibers in
/// the scaled coordinate y / |x|^q so the comparison stays O(1) far out.
template <class Spec>
void ray_track(const Spec& spec, cplx A, double e_pole, std::vector<cplx>& values,
               double t_from, double t_to, IntegrationStats& stats) {
    if (t_from == t_to) return;
    const double q = fiber_growth_exponent(spec);
    const int m = sheet_count(spec);
    auto gauge_at = [&](double t) {
        double ax = std::abs(A) * std::pow(t, -e_pole);
        return std::pow(ax, 1.0 / double(m)) *
               std::polar(1.0, std::arg(A) / double(m));
    };
    double span = std::abs(t_to - t_from);
    double dir = t_to > t_from ? 1.0 : -1.0;
    double t = t_from, h = span;
    // scaled copies of the tracked values at the current t
    double sig = std::pow(std::abs(A) * std::pow(t, -e_pole), q);
    std::vector<cplx> w(values.size());
    for (size_t i = 0; i < values.size(); ++i) w[i] = values[i] / sig;
    int guard = 0;
    std::vector<int> pick;
    while (dir * (t_to - t) > 0.0) {
        if (++guard > 100000)
            raise(ErrorCode::BranchClearanceViolated, "ray tracking stalled");
        double tn = dir > 0 ? std::min(t_to, t + h) : std::max(t_to, t - h);
        cplx xn = A * std::pow(tn, -e_pole);
        auto roots = far_fiber(spec, xn, gauge_at(tn));
        stats.charge(1);
        double sn = std::pow(std::abs(xn), q);
        std::vector<cplx> wn(roots.size());
        for (size_t i = 0; i < roots.size(); ++i) wn[i] = roots[i] / sn;
        if (!detail::match_fiber(w, wn, pick)) {
            h *= 0.5;
            if (h < 1e-9 * (span + 1.0))
                raise(ErrorCode::BranchClearanceViolated, "ray tracking step underflow");
            continue;
        }
        for (size_t i = 0; i < values.size(); ++i) {
            values[i] = roots[static_cast<size_t>(pick[i])];
            w[i] = wn[static_cast<size_t>(pick[i])];
        }
        t = tn;
        h = std::min(span, h * 1.9);
    }
}

/// Gauss-Legendre panel on [lo, hi] in the ray parameter; `values` holds the
/// fiber over x(hi) on entry and over x(max(lo, 0)) is only meaningful when
/// lo > 0 (the bottom panel ends at the single point over infinity).
template <class Spec>
Eigen::VectorXcd ray_panel(const Spec& spec, const FormSet& fs, cplx A, double e_pole,
                           double lo, double hi, std::vector<cplx>& values, int label,
                           int order, IntegrationStats& stats) {
    const GaussRule& rule = gauss_legendre(order);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<Eigen::VectorXcd> contrib(static_cast<size_t>(order));
    double t_prev = hi;
    for (int k = order - 1; k >= 0; --k) { // walk down the ray
        double tk = mid + half * rule.nodes[static_cast<size_t>(k)];
        ray_track(spec, A, e_pole, values, t_prev, tk, stats);
        t_prev = tk;
        cplx xk = A * std::pow(tk, -e_pole);
        cplx dxdt = -e_pole * A * std::pow(tk, -e_pole - 1.0);
        contrib[static_cast<size_t>(k)] =
            rule.weights[static_cast<size_t>(k)] *
            detail::form_values(fs, xk, values[static_cast<size_t>(label)], dxdt * half);
    }
    if (lo > 0.0) ray_track(spec, A, e_pole, values, t_prev, lo, stats);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fs.numerators.size()));
    for (int k = 0; k < order; ++k) acc += contrib[static_cast<size_t>(k)];
    return acc;
}

template <class Spec>
Eigen::VectorXcd ray_adaptive(const Spec& spec, const FormSet& fs, cplx A, double e_pole,
                              double lo, double hi, std::vector<cplx>& values, int label,
                              const IntegrationOptions& opt, IntegrationStats& stats,
                              int depth) {
    std::vector<cplx> v1 = values;
    Eigen::VectorXcd whole = ray_panel(spec, fs, A, e_pole, lo, hi, v1, label, opt.order, stats);
    std::vector<cplx> v2 = values;
    double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd split = ray_panel(spec, fs, A, e_pole, mid, hi, v2, label, opt.order, stats);
    split += ray_panel(spec, fs, A, e_pole, lo, mid, v2, label, opt.order, stats);
    if (close_enough(whole, split, opt)) {
        values = v2;
        return split;
    }
    if (depth >= opt.max_depth)
        raise(ErrorCode::QuadratureBudgetExceeded,
              "adaptive refinement depth exhausted on the infinity ray");
    Eigen::VectorXcd upper =
        ray_adaptive(spec, fs, A, e_pole, mid, hi, values, label, opt, stats, depth + 1);
    return upper + ray_adaptive(spec, fs, A, e_pole, lo, mid, values, label, opt, stats,
                                depth + 1);
}

// ---- ramified approach legs --------------------------------------------------

/// Continuation along x(u) = x0 + c u^e matching in w = (y - y_off) / u^p,
/// which stays separated while the raw fiber values coalesce at u = 0.
template <class Spec>
void uleg_track(const Spec& spec, cplx x0, cplx c, double e_sub, cplx y_off, double p,
                std::vector<cplx>& values, double u_from, double u_to,
                IntegrationStats& stats) {
    if (u_from == u_to) return;
    double span = std::abs(u_to - u_from);
    double dir = u_to > u_from ? 1.0 : -1.0;
    double u = u_from, h = span;
    std::vector<cplx> w(values.size());
    double up = std::pow(u, p);
    for (size_t i = 0; i < values.size(); ++i) w[i] = (values[i] - y_off) / up;
    int guard = 0;
    std::vector<int> pick;
    while (dir * (u_to - u) > 0.0) {
        if (++guard > 100000)
            raise(ErrorCode::BranchClearanceViolated, "ramified-leg tracking stalled");
        double un = dir > 0 ? std::min(u_to, u + h) : std::max(u_to, u - h);
        cplx xn = x0 + c * std::pow(un, e_sub);
        auto roots = fiber(spec, xn);
        stats.charge(1);
        double upn = std::pow(un, p);
        std::vector<cplx> wn(roots.size());
        for (size_t i = 0; i < roots.size(); ++i) wn[i] = (roots[i] - y_off) / upn;
        if (!detail::match_fiber(w, wn, pick)) {
            h *= 0.5;
            if (h < 1e-9 * (span + 1.0))
                raise(ErrorCode::BranchClearanceViolated,
                      "ramified-leg tracking step underflow");
            continue;
        }
        for (size_t i = 0; i < values.size(); ++i) {
            values[i] = roots[static_cast<size_t>(pick[i])];
            w[i] = wn[static_cast<size_t>(pick[i])];
        }
        u = un;
        h = std::min(span, h * 1.9);
    }
}

template <class Spec>
Eigen::VectorXcd uleg_panel(const Spec& spec, const FormSet& fs, cplx x0, cplx c,
                            double e_sub, cplx y_off, double p, double lo, double hi,
                            std::vector<cplx>& values, int label, int order,
                            IntegrationStats& stats) {
    const GaussRule& rule = gauss_legendre(order);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<Eigen::VectorXcd> contrib(static_cast<size_t>(order));
    double u_prev = hi;
    for (int k = order - 1; k >= 0; --k) { // walk toward the ramified point
        double uk = mid + half * rule.nodes[static_cast<size_t>(k)];
        uleg_track(spec, x0, c, e_sub, y_off, p, values, u_prev, uk, stats);
        u_prev = uk;
        cplx xk = x0 + c * std::pow(uk, e_sub);
        cplx dxdu = e_sub * c * std::pow(uk, e_sub - 1.0);
        contrib[static_cast<size_t>(k)] =
            rule.weights[static_cast<size_t>(k)] *
            detail::form_values(fs, xk, values[static_cast<size_t>(label)], dxdu * half);
    }
    if (lo > 0.0) uleg_track(spec, x0, c, e_sub, y_off, p, values, u_prev, lo, stats);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fs.numerators.size()));
    for (int k = 0; k < order; ++k) acc += contrib[static_cast<size_t>(k)];
    return acc;
}

template <class Spec>
Eigen::VectorXcd uleg_adaptive(const Spec& spec, const FormSet& fs, cplx x0, cplx c,
                               double e_sub, cplx y_off, double p, double lo, double hi,
                               std::vector<cplx>& values, int label,
                               const IntegrationOptions& opt, IntegrationStats& stats,
                               int depth) {
    std::vector<cplx> v1 = values;
    Eigen::VectorXcd whole =
        uleg_panel(spec, fs, x0, c, e_sub, y_off, p, lo, hi, v1, label, opt.order, stats);
    std::vector<cplx> v2 = values;
    double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd split =
        uleg_panel(spec, fs, x0, c, e_sub, y_off, p, mid, hi, v2, label, opt.order, stats);
    split += uleg_panel(spec, fs, x0, c, e_sub, y_off, p, lo, mid, v2, label, opt.order, stats);
    if (close_enough(whole, split, opt)) {
        values = v2;
        return split;
    }
    if (depth >= opt.max_depth)
        raise(ErrorCode::QuadratureBudgetExceeded,
              "adaptive refinement depth exhausted on a ramified leg");
    Eigen::VectorXcd upper = uleg_adaptive(spec, fs, x0, c, e_sub, y_off, p, mid, hi, values,
                                           label, opt, stats, depth + 1);
    return upper + uleg_adaptive(spec, fs, x0, c, e_sub, y_off, p, lo, mid, values, label,
                                 opt, stats, depth + 1);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Integrate every form along the polyline, following the lift of
/// values[label]; `values` must hold the fiber over xs.front() on entry and
/// holds the fiber over xs.back() on exit.
template <class Spec>
Eigen::VectorXcd integrate_polyline(const Spec& spec, const FormSet& fs,
                                    const std::vector<cplx>& xs, std::vector<cplx>& values,
                                    int label, const IntegrationOptions& opt,
                                    IntegrationStats& stats) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fs.numerators.size()));
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        acc += detail::segment_adaptive(spec, fs, xs[i], xs[i + 1], values, label, opt, stats, 0);
    return acc;
}

/// Integral from the point over infinity down the ray {A / t^e : t in (0, 1]}
/// to the anchor A, following the lift that arrives at values[label];
/// `values` must hold the fiber over A on entry and is left unchanged in
/// meaning (the walk is restarted internally).
template <class Spec>
Eigen::VectorXcd integrate_infinity_ray(const Spec& spec, const FormSet& fs, cplx A,
                                        const std::vector<cplx>& fiber_at_A, int label,
                                        const IntegrationOptions& opt,
                                        IntegrationStats& stats) {
    double e_pole = double(sheet_count(spec));
    std::vector<cplx> values = fiber_at_A;
    return detail::ray_adaptive(spec, fs, A, e_pole, 0.0, 1.0, values, label, opt, stats, 0);
}

/// Integral from the ramified point over x0 out to the entry point
/// x0 + c (the value of the path integral oriented away from the ramified
/// point). e_sub is the local ramification index of x, y_off the common
/// y-value of the merging sheets, and p the matching exponent: the merging
/// sheets separate as (y - y_off) ~ u^p along x = x0 + c u^{e_sub}.
/// `values` must hold the fiber over x0 + c on entry.
template <class Spec>
Eigen::VectorXcd integrate_ramified_leg(const Spec& spec, const FormSet& fs, cplx x0, cplx c,
                                        double e_sub, cplx y_off, double p,
                                        const std::vector<cplx>& fiber_at_entry, int label,
                                        const IntegrationOptions& opt,
                                        IntegrationStats& stats) {
    std::vector<cplx> values = fiber_at_entry;
    return detail::uleg_adaptive(spec, fs, x0, c, e_sub, y_off, p, 0.0, 1.0, values, label,
                                 opt, stats, 0);
}

} // namespace wcurve
