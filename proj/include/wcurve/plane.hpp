// Plane curves in Weierstrass normal form:
//   f(x, y) = y^m + A_1(x) y^{m-1} + ... + A_m(x),
// deg A_i <= floor(i n / m), A_m monic of degree n, gcd(m, n) = 1.
//
// The x-projection is an m-sheeted cover, totally ramified over infinity.
// This header provides fiber computation, root tracking along paths (used for
// monodromy probes), discriminant-based critical point detection, and
// classification of ordinary nodes (nondegenerate Hessian).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcurve/curve.hpp"
#include "wcurve/errors.hpp"
#include "wcurve/numeric.hpp"
#include "wcurve/poly.hpp"

namespace wcurve {

class PlaneWeierstrassSpec {
public:
    /// A[i] holds the coefficients of A_{i+1}(x), ascending in x.
    PlaneWeierstrassSpec(long long m, long long n, std::vector<Poly> A)
        : m_(m), n_(n), A_(std::move(A)) {
        if (m_ < 2 || n_ <= m_)
            raise(ErrorCode::DegreeBoundViolated, "require 2 <= m < n");
        if (igcd(m_, n_) != 1) raise(ErrorCode::NotCoprime, "gcd(m, n) must be 1");
        if (A_.size() != static_cast<size_t>(m_))
            raise(ErrorCode::DegreeBoundViolated, "expected m coefficient polynomials");
        for (auto& p : A_) p = poly_trim(p, 0.0);
    }

    [[nodiscard]] long long m() const { return m_; }
    [[nodiscard]] long long n() const { return n_; }
    [[nodiscard]] const std::vector<Poly>& A() const { return A_; }
    [[nodiscard]] long long genus_smooth() const { return (m_ - 1) * (n_ - 1) / 2; }

    /// Coefficients of f(x0, y) as a polynomial in y, ascending.
    [[nodiscard]] Poly y_polynomial(cplx x0) const {
        Poly p(static_cast<size_t>(m_) + 1, cplx(0.0));
        p[static_cast<size_t>(m_)] = cplx(1.0);
        for (long long i = 1; i <= m_; ++i)
            p[static_cast<size_t>(m_ - i)] = poly_eval(A_[static_cast<size_t>(i - 1)], x0);
        return p;
    }

    [[nodiscard]] cplx f(cplx x, cplx y) const {
        Poly p = y_polynomial(x);
        return poly_eval(p, y);
    }

    [[nodiscard]] cplx f_x(cplx x, cplx y) const {
        cplx acc(0.0);
        cplx yp(1.0);
        for (long long i = m_; i >= 1; --i) {
            // derivative of A_i(x) times y^{m-i}; accumulate with explicit powers
            Poly d = poly_derivative(A_[static_cast<size_t>(i - 1)]);
            cplx ypow(1.0);
            for (long long e = 0; e < m_ - i; ++e) ypow *= y;
            acc += poly_eval(d, x) * ypow;
        }
        (void)yp;
        return acc;
    }

    [[nodiscard]] cplx f_y(cplx x, cplx y) const {
        Poly p = y_polynomial(x);
        return poly_eval(poly_derivative(p), y);
    }

    [[nodiscard]] cplx f_xx(cplx x, cplx y) const {
        cplx acc(0.0);
        for (long long i = 1; i <= m_; ++i) {
            Poly d = poly_derivative(poly_derivative(A_[static_cast<size_t>(i - 1)]));
            cplx ypow(1.0);
            for (long long e = 0; e < m_ - i; ++e) ypow *= y;
            acc += poly_eval(d, x) * ypow;
        }
        return acc;
    }

    [[nodiscard]] cplx f_xy(cplx x, cplx y) const {
        cplx acc(0.0);
        for (long long i = 1; i < m_; ++i) {
            Poly d = poly_derivative(A_[static_cast<size_t>(i - 1)]);
            cplx ypow(1.0);
            for (long long e = 0; e + 1 < m_ - i; ++e) ypow *= y;
            acc += double(m_ - i) * poly_eval(d, x) * ypow;
        }
        return acc;
    }

    [[nodiscard]] cplx f_yy(cplx x, cplx y) const {
        Poly p = y_polynomial(x);
        return poly_eval(poly_derivative(poly_derivative(p)), y);
    }

    /// f as a FunctionExpr (terms c x^a y^b).
    [[nodiscard]] FunctionExpr f_expr() const {
        std::vector<Term> t;
        t.push_back(Term{cplx(1.0), 0, m_});
        for (long long i = 1; i <= m_; ++i) {
            const Poly& p = A_[static_cast<size_t>(i - 1)];
            for (size_t j = 0; j < p.size(); ++j)
                if (std::abs(p[j]) > 0.0)
                    t.push_back(Term{p[j], static_cast<long long>(j), m_ - i});
        }
        return FunctionExpr(std::move(t));
    }

    /// Partial derivative with respect to y as a FunctionExpr.
    [[nodiscard]] FunctionExpr f_y_expr() const {
        std::vector<Term> t;
        t.push_back(Term{cplx(double(m_)), 0, m_ - 1});
        for (long long i = 1; i < m_; ++i) {
            const Poly& p = A_[static_cast<size_t>(i - 1)];
            for (size_t j = 0; j < p.size(); ++j)
                if (std::abs(p[j]) > 0.0)
                    t.push_back(Term{double(m_ - i) * p[j], static_cast<long long>(j),
                                     m_ - i - 1});
        }
        return FunctionExpr(std::move(t));
    }

    [[nodiscard]] double geometry_scale() const {
        double s = 1.0;
        for (const Poly& p : A_)
            for (const cplx& c : p) s = std::max(s, std::abs(c));
        return s;
    }

private:
    long long m_, n_;
    std::vector<Poly> A_;
};

/// Weight of a monomial on a plane spec: wt(x) = m, wt(y) = n.
inline long long plane_term_weight(const PlaneWeierstrassSpec& spec, const Term& t) {
    return spec.m() * t.a + spec.n() * t.b;
}

/// Weight of an expression, as the maximum term weight. Exact whenever the
/// top-weight term is unique (always true for monomials x^a y^b with
/// 0 <= b < m); verified numerically elsewhere for composite expressions.
inline long long plane_weight(const PlaneWeierstrassSpec& spec, const FunctionExpr& f) {
    if (f.is_zero()) raise(ErrorCode::CancellationDetected, "weight of zero expression");
    long long w = plane_term_weight(spec, f.terms[0]);
    for (const Term& t : f.terms) w = std::max(w, plane_term_weight(spec, t));
    return w;
}

/// Fiber over x0, sorted by (principal argument, absolute value).
inline std::vector<cplx> plane_fiber(const PlaneWeierstrassSpec& spec, cplx x0) {
    auto roots = poly_roots(spec.y_polynomial(x0));
    std::sort(roots.begin(), roots.end(), [](const cplx& p, const cplx& q) {
        double ap = std::arg(p), aq = std::arg(q);
        if (ap != aq) return ap < aq;
        return std::abs(p) < std::abs(q);
    });
    return roots;
}

inline cplx evaluate(const PlaneWeierstrassSpec&, const FunctionExpr& f, cplx x, cplx y) {
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

/// Finite point over x0 on the given argument-sorted sheet. A fiber with two
/// nearly equal values sits over (or numerically at) a discriminant zero,
/// where the sheet tag is meaningless.
inline PointOnCurve point_on_curve(const PlaneWeierstrassSpec& spec, cplx x0,
                                   int sheet, double clearance = 1e-8) {
    auto ys = plane_fiber(spec, x0);
    double sep = 1e300, scale = 0.0;
    for (size_t i = 0; i < ys.size(); ++i) {
        scale = std::max(scale, std::abs(ys[i]));
        for (size_t j = i + 1; j < ys.size(); ++j)
            sep = std::min(sep, std::abs(ys[i] - ys[j]));
    }
    if (sep < clearance * (1.0 + scale))
        raise(ErrorCode::NearBranchPoint,
              "fiber over x0 has nearly coincident sheets");
    if (sheet < 0 || sheet >= static_cast<int>(ys.size()))
        raise(ErrorCode::NearBranchPoint, "sheet index out of range");
    PointOnCurve P;
    P.x = x0;
    P.y = ys[static_cast<size_t>(sheet)];
    P.sheet = sheet;
    return P;
}

/// Evaluate at a point. Points at infinity are poles of every positive-weight
/// expression; the finite case is plain term evaluation.
inline cplx evaluate(const PlaneWeierstrassSpec& spec, const FunctionExpr& f,
                     const PointOnCurve& P) {
    if (f.is_zero()) return cplx(0.0);
    if (P.at_infinity) {
        if (plane_weight(spec, f) > 0)
            raise(ErrorCode::PoleAtPoint, "pole at infinity");
        cplx limit(0.0);
        for (const Term& t : f.terms)
            if (plane_term_weight(spec, t) == 0 && t.a == 0 && t.b == 0) limit += t.c;
        return limit;
    }
    return evaluate(spec, f, P.x, P.y);
}

// ---------------------------------------------------------------------------
// Root tracking and monodromy probes
// ---------------------------------------------------------------------------

/// Continue all m fiber values from x_from to x_to along the straight segment.
/// `values` is permuted in place so labels are preserved. Steps halve until the
/// nearest-root matching is unambiguous; raises BranchClearanceViolated if the
/// required step underflows (path passes through or too close to a critical
/// point).
inline void plane_track_segment(const PlaneWeierstrassSpec& spec, std::vector<cplx>& values,
                                cplx x_from, cplx x_to) {
    const double seg_len = std::abs(x_to - x_from);
    if (seg_len == 0.0) return;
    double t = 0.0;
    double h = 1.0;
    int iter_guard = 0;
    while (t < 1.0) {
        if (++iter_guard > 100000)
            raise(ErrorCode::BranchClearanceViolated, "root tracking stalled");
        double tn = std::min(1.0, t + h);
        cplx xn = x_from + (x_to - x_from) * tn;
        auto roots = poly_roots(spec.y_polynomial(xn));
        // match each tracked value to its nearest new root; demand uniqueness
        std::vector<int> pick(values.size(), -1);
        std::vector<bool> used(roots.size(), false);
        bool ok = true;
        for (size_t i = 0; i < values.size() && ok; ++i) {
            double best = 1e300, second = 1e300;
            int bi = -1;
            for (size_t j = 0; j < roots.size(); ++j) {
                double d = std::abs(values[i] - roots[j]);
                if (d < best) second = best, best = d, bi = static_cast<int>(j);
                else if (d < second) second = d;
            }
            if (bi < 0 || used[static_cast<size_t>(bi)] || best > 0.5 * second) {
                ok = false;
                break;
            }
            used[static_cast<size_t>(bi)] = true;
            pick[i] = bi;
        }
        if (!ok) {
            h *= 0.5;
            if (h * seg_len < 1e-9 * (1.0 + seg_len))
                raise(ErrorCode::BranchClearanceViolated,
                      "tracking step underflow near a critical point");
            continue;
        }
        for (size_t i = 0; i < values.size(); ++i)
            values[i] = roots[static_cast<size_t>(pick[i])];
        t = tn;
        h = std::min(1.0, h * 1.9);
    }
}

/// Continue fiber values along a polyline.
inline void plane_track_path(const PlaneWeierstrassSpec& spec, std::vector<cplx>& values,
                             const std::vector<cplx>& xs) {
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        plane_track_segment(spec, values, xs[i], xs[i + 1]);
}

// ---------------------------------------------------------------------------
// Discriminant, critical points, node classification
// ---------------------------------------------------------------------------

namespace detail {

/// Sylvester determinant of (f(x, .), f_y(x, .)) at a fixed x.
inline cplx sylvester_det(const PlaneWeierstrassSpec& spec, cplx x) {
    const long long m = spec.m();
    const size_t size = static_cast<size_t>(2 * m - 1);
    Poly p = spec.y_polynomial(x);
    Poly dp = poly_derivative(p);
    Poly f_desc(p.rbegin(), p.rend());
    Poly fy_desc(dp.rbegin(), dp.rend());
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(size),
                                                static_cast<Eigen::Index>(size));
    for (long long row = 0; row < m - 1; ++row)
        for (size_t j = 0; j < f_desc.size(); ++j)
            S(row, static_cast<Eigen::Index>(row + static_cast<long long>(j))) = f_desc[j];
    for (long long row = 0; row < m; ++row)
        for (size_t j = 0; j < fy_desc.size(); ++j)
            S(m - 1 + row, static_cast<Eigen::Index>(row + static_cast<long long>(j))) =
                fy_desc[j];
    return S.determinant();
}

} // namespace detail

/// Resultant Res_y(f, f_y) as a polynomial in x, by sampling the Sylvester
/// determinant on a circle and inverting the DFT. The circle need not enclose
/// any root; small radii keep the determinant magnitudes commensurate with the
/// low-order coefficients. Each candidate radius is validated against directly
/// computed determinant values off the sampling circle.
inline Poly plane_discriminant_poly(const PlaneWeierstrassSpec& spec) {
    const long long deg_bound = (2 * spec.m() - 1) * spec.n();
    const size_t N = static_cast<size_t>(deg_bound) + 1;
    Poly am = poly_trim(spec.A().back(), 1e-12);
    double sc = 1.0;
    for (const cplx& root : poly_roots(am)) sc = std::max(sc, std::abs(root));
    const double radii[] = {1.5, 2.2, 1.15, 3.2, 0.5 * sc + 1.0, 1.5 * sc};
    for (double R : radii) {
        std::vector<cplx> dets(N);
        for (size_t k = 0; k < N; ++k) {
            double ang = 2.0 * kPi * double(k) / double(N);
            dets[k] = detail::sylvester_det(spec, R * cplx(std::cos(ang), std::sin(ang)));
        }
        Poly out(N, cplx(0.0));
        for (size_t j = 0; j < N; ++j) {
            cplx acc(0.0);
            for (size_t k = 0; k < N; ++k) {
                double ang = -2.0 * kPi * double(j) * double(k) / double(N);
                acc += dets[k] * cplx(std::cos(ang), std::sin(ang));
            }
            out[j] = acc / (double(N) * std::pow(R, double(j)));
        }
        out = poly_trim(out, 1e-11);
        bool valid = true;
        for (int t = 0; t < 12 && valid; ++t) {
            double rho = (t < 6 ? 0.6 : 1.3) * R;
            double ang = 2.0 * kPi * double(t % 6) / 6.0 + 0.341;
            cplx xt = rho * cplx(std::cos(ang), std::sin(ang));
            cplx direct = detail::sylvester_det(spec, xt);
            cplx interp = poly_eval(out, xt);
            double mag = 0.0;
            for (size_t j = 0; j < out.size(); ++j)
                mag += std::abs(out[j]) * std::pow(rho, double(j));
            valid = std::abs(direct - interp) <= 1e-6 * (mag + std::abs(direct));
        }
        if (valid) return out;
    }
    raise(ErrorCode::CancellationDetected,
          "discriminant interpolation failed validation at every sampling radius");
}

/// Raw discriminant roots (with numerical scatter for multiple roots).
inline std::vector<cplx> plane_discriminant_roots(const PlaneWeierstrassSpec& spec) {
    Poly disc = plane_discriminant_poly(spec);
    if (poly_degree(disc) == 0)
        raise(ErrorCode::CancellationDetected, "discriminant degenerated to a constant");
    return poly_roots(disc);
}

/// x-values over which the fiber degenerates. Multiple discriminant roots
/// scatter by roughly eps^(1/mult), so clustering uses a coarse relative
/// radius; downstream consumers re-polish against f itself.
inline std::vector<cplx> plane_critical_x(const PlaneWeierstrassSpec& spec) {
    auto roots = plane_discriminant_roots(spec);
    std::vector<cplx> out;
    for (const cplx& r : roots) {
        bool dup = false;
        for (cplx& o : out) dup = dup || (std::abs(r - o) < 2e-2 * (1.0 + std::abs(o)));
        if (!dup) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const cplx& p, const cplx& q) {
        if (p.real() != q.real()) return p.real() < q.real();
        return p.imag() < q.imag();
    });
    return out;
}

struct NodeInfo {
    cplx x{0.0};
    cplx y{0.0};
    long long fiber_multiplicity = 0; // multiplicity of y in f(x, .)
};

struct PlaneCurveGeometry {
    std::vector<cplx> critical_x;  // all critical x-values (nodes included)
    std::vector<NodeInfo> nodes;   // ordinary double points
    long long genus = 0;           // (m-1)(n-1)/2 - #nodes
};

namespace detail {

/// Scale of |f| near (x, y): sum of the term magnitudes.
inline double plane_value_scale(const PlaneWeierstrassSpec& spec, cplx x, cplx y) {
    double ax = std::max(1.0, std::abs(x)), ay = std::max(1.0, std::abs(y));
    double acc = std::pow(ay, double(spec.m()));
    for (long long i = 1; i <= spec.m(); ++i) {
        const Poly& p = spec.A()[static_cast<size_t>(i - 1)];
        double pe = 0.0;
        for (size_t j = 0; j < p.size(); ++j) pe += std::abs(p[j]) * std::pow(ax, double(j));
        acc += pe * std::pow(ay, double(spec.m() - i));
    }
    return acc;
}

} // namespace detail

/// Locate singular points and certify each as an ordinary node (nondegenerate
/// Hessian of f). Singular points are found by Newton iteration on the
/// gradient of f seeded from the raw discriminant roots; the critical x-values
/// are also scanned for repeated fibers that fail to yield a certified node,
/// which raises UnsupportedSingularity.
inline PlaneCurveGeometry plane_geometry(const PlaneWeierstrassSpec& spec) {
    PlaneCurveGeometry geo;
    geo.critical_x = plane_critical_x(spec);
    auto raw = plane_discriminant_roots(spec);

    auto min_gap_midpoint = [&](cplx x) {
        auto roots = poly_roots(spec.y_polynomial(x));
        double best = 1e300;
        cplx mid(0.0);
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j) {
                double d = std::abs(roots[i] - roots[j]);
                if (d < best) best = d, mid = 0.5 * (roots[i] + roots[j]);
            }
        return mid;
    };

    for (const cplx& seed_x : raw) {
        cplx x = seed_x, y = min_gap_midpoint(seed_x);
        bool converged = false;
        for (int it = 0; it < 80; ++it) {
            cplx gx = spec.f_x(x, y), gy = spec.f_y(x, y);
            cplx hxx = spec.f_xx(x, y), hxy = spec.f_xy(x, y), hyy = spec.f_yy(x, y);
            cplx det = hxx * hyy - hxy * hxy;
            if (std::abs(det) < 1e-13) break;
            cplx dx = (hyy * gx - hxy * gy) / det;
            cplx dy = (-hxy * gx + hxx * gy) / det;
            x -= dx;
            y -= dy;
            if (std::abs(x - seed_x) > 1.0 + std::abs(seed_x)) break; // left the basin
            if (std::abs(dx) + std::abs(dy) < 1e-14 * (1.0 + std::abs(x) + std::abs(y))) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        double vscale = detail::plane_value_scale(spec, x, y);
        if (std::abs(spec.f_x(x, y)) + std::abs(spec.f_y(x, y)) > 1e-8 * vscale) continue;
        // quadratic convergence leaves a true node at machine-level |f|; nearby
        // critical points of f off the curve sit orders of magnitude higher
        if (std::abs(spec.f(x, y)) > 1e-10 * vscale) continue;
        bool dup = false;
        for (const NodeInfo& nd : geo.nodes)
            dup = dup || (std::abs(nd.x - x) + std::abs(nd.y - y) < 1e-6 * vscale);
        if (dup) continue;
        cplx fxy = spec.f_xy(x, y);
        cplx hdet = spec.f_xx(x, y) * spec.f_yy(x, y) - fxy * fxy;
        if (std::abs(hdet) < 1e-7 * vscale)
            raise(ErrorCode::UnsupportedSingularity,
                  "degenerate singular point (Hessian nearly singular)");
        NodeInfo node;
        node.x = x;
        node.y = y;
        auto roots = poly_roots(spec.y_polynomial(x));
        long long mult = 0;
        for (const cplx& r : roots)
            if (std::abs(r - y) < 1e-4 * (1.0 + std::abs(y))) ++mult;
        node.fiber_multiplicity = mult;
        geo.nodes.push_back(node);
    }

    // completeness scan: every critical x with a repeated fiber and small f_x
    // at the collision must carry a certified node
    for (const cplx& xc : geo.critical_x) {
        cplx mid = min_gap_midpoint(xc);
        auto roots = poly_roots(spec.y_polynomial(xc));
        double gap = 1e300;
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                gap = std::min(gap, std::abs(roots[i] - roots[j]));
        if (gap > 1e-2 * (1.0 + std::abs(mid))) continue; // fiber did not degenerate here
        double vscale = detail::plane_value_scale(spec, xc, mid);
        if (std::abs(spec.f_x(xc, mid)) > 1e-2 * vscale) continue; // plain ramification
        bool covered = false;
        for (const NodeInfo& nd : geo.nodes)
            covered = covered || (std::abs(nd.x - xc) < 5e-2 * (1.0 + std::abs(xc)));
        if (!covered)
            raise(ErrorCode::UnsupportedSingularity,
                  "singular fiber without a certified ordinary node");
    }

    geo.genus = spec.genus_smooth() - static_cast<long long>(geo.nodes.size());
    if (geo.genus < 0)
        raise(ErrorCode::UnsupportedSingularity, "negative genus after node count");
    return geo;
}

// ---------------------------------------------------------------------------
// Normal-form validation
// ---------------------------------------------------------------------------

struct NormalFormReport {
    long long m = 0;
    long long n = 0;
    std::vector<long long> degree_bounds;
    bool irreducible_probe = false;
    std::vector<std::string> notes;
};

/// Check degree staircase, the monic normalization of A_m, squarefree fibers
/// at random x, and transitivity of the monodromy generated by loops around
/// the critical x-values.
inline NormalFormReport validate_normal_form(const PlaneWeierstrassSpec& spec,
                                             Rng& rng) {
    NormalFormReport rep;
    rep.m = spec.m();
    rep.n = spec.n();
    for (long long i = 1; i <= spec.m(); ++i) {
        long long bound = (i * spec.n()) / spec.m();
        rep.degree_bounds.push_back(bound);
        long long d = poly_degree(poly_trim(spec.A()[static_cast<size_t>(i - 1)], 1e-12));
        bool zero = (d == 0 && std::abs(spec.A()[static_cast<size_t>(i - 1)].empty()
                                            ? cplx(0.0)
                                            : poly_trim(spec.A()[static_cast<size_t>(i - 1)],
                                                        1e-12)[0]) == 0.0);
        if (!zero && d > bound)
            raise(ErrorCode::DegreeBoundViolated,
                  "deg A_" + std::to_string(i) + " = " + std::to_string(d) +
                      " exceeds bound " + std::to_string(bound));
        if (i == spec.m()) {
            Poly am = poly_trim(spec.A()[static_cast<size_t>(i - 1)], 1e-12);
            if (poly_degree(am) != spec.n())
                raise(ErrorCode::DegreeBoundViolated,
                      "A_m must have degree exactly n");
            if (std::abs(am.back() - cplx(1.0)) > 1e-9)
                raise(ErrorCode::DegreeBoundViolated,
                      "A_m must be monic (normalized leading coefficient)");
        }
    }
    const double scale = 1.0 + spec.geometry_scale();
    // squarefree fibers at random x: a repeated factor of f repeats in every fiber
    for (int probe = 0; probe < 20; ++probe) {
        cplx x0 = rng.complex_in_annulus(1.1 * scale, 2.9 * scale);
        auto roots = poly_roots(spec.y_polynomial(x0));
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                if (std::abs(roots[i] - roots[j]) < 1e-8 * scale)
                    raise(ErrorCode::DegreeBoundViolated,
                          "repeated fiber roots at a generic x (repeated factor?)");
    }
    // monodromy transitivity
    auto crit = plane_critical_x(spec);
    double extent = 1.0;
    for (const cplx& c : crit) extent = std::max(extent, std::abs(c));
    for (int attempt = 0; attempt < 8; ++attempt) {
        cplx base = (3.0 * extent) *
                    std::exp(cplx(0.0, 0.4 + kPi * double(attempt) / 7.0));
        try {
            std::vector<int> parent(static_cast<size_t>(spec.m()));
            for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
            std::function<int(int)> find = [&](int v) {
                while (parent[static_cast<size_t>(v)] != v) v = parent[static_cast<size_t>(v)];
                return v;
            };
            auto unite = [&](int a, int b) {
                a = find(a);
                b = find(b);
                if (a != b) parent[static_cast<size_t>(a)] = b;
            };
            auto base_fiber = plane_fiber(spec, base);
            for (const cplx& c : crit) {
                double rad = 1e300;
                for (const cplx& o : crit)
                    if (std::abs(o - c) > 1e-12) rad = std::min(rad, 0.4 * std::abs(o - c));
                if (rad > 1e200) rad = 0.5 * (1.0 + std::abs(c));
                rad = std::min(rad, 0.45 * std::abs(base - c));
                // keep the loop wide enough to enclose the numerical scatter of
                // multiple discriminant roots
                rad = std::max(rad, std::min(3e-2 * (1.0 + std::abs(c)),
                                             0.45 * std::abs(base - c)));
                cplx dir = (base - c) / std::abs(base - c);
                cplx entry = c + rad * dir;
                std::vector<cplx> vals = base_fiber;
                plane_track_segment(spec, vals, base, entry);
                const int segs = 16;
                std::vector<cplx> ring;
                for (int k = 0; k <= segs; ++k) {
                    double ang = std::arg(dir) + 2.0 * kPi * double(k) / double(segs);
                    ring.push_back(c + rad * std::exp(cplx(0.0, ang)));
                }
                plane_track_path(spec, vals, ring);
                plane_track_segment(spec, vals, entry, base);
                // vals[i] is where base sheet i landed; match back to base fiber
                for (size_t i = 0; i < vals.size(); ++i) {
                    size_t best = 0;
                    double bd = 1e300;
                    for (size_t j = 0; j < base_fiber.size(); ++j) {
                        double d = std::abs(vals[i] - base_fiber[j]);
                        if (d < bd) bd = d, best = j;
                    }
                    unite(static_cast<int>(i), static_cast<int>(best));
                }
            }
            int root0 = find(0);
            bool transitive = true;
            for (long long i = 1; i < spec.m(); ++i)
                transitive = transitive && (find(static_cast<int>(i)) == root0);
            rep.irreducible_probe = transitive;
            if (!transitive)
                rep.notes.push_back("monodromy probe found an invariant sheet partition");
            return rep;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BranchClearanceViolated) throw;
            // retry from a rotated base point
        }
    }
    raise(ErrorCode::BranchClearanceViolated,
          "monodromy probe could not route around the critical points");
}

} // namespace wcurve
