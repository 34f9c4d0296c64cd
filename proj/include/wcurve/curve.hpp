// Concrete curve models and their function arithmetic.
//
// Two spec kinds are supported:
//  * CyclicCurveSpec: y^r = prod_i (x - b_i)^{m_i}, totally ramified over each
//    b_i and over infinity (gcd(r, m_i) = gcd(r, sum m_i) = 1). Valuations at
//    the branch places and at infinity are exact integer arithmetic.
//  * PlaneWeierstrassSpec: f(x, y) = y^m + A_1(x) y^{m-1} + ... + A_m(x) with
//    the degree staircase deg A_i <= floor(i n / m) and A_m monic of degree n.
//
// FunctionExpr is a finite sum of monomials c x^a y^b with b allowed to be
// negative; it represents elements of the affine ring of the curve (and,
// through negative powers of y, elements such as w = k2 k3 / y^2).
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wcurve/errors.hpp"
#include "wcurve/numeric.hpp"
#include "wcurve/poly.hpp"
#include "wcurve/semigroup.hpp"

namespace wcurve {

// ---------------------------------------------------------------------------
// Function expressions
// ---------------------------------------------------------------------------

struct Term {
    cplx c;
    long long a = 0; // exponent of x, >= 0
    long long b = 0; // exponent of y, any integer
};

struct FunctionExpr {
    std::vector<Term> terms;

    FunctionExpr() = default;
    explicit FunctionExpr(std::vector<Term> t) : terms(std::move(t)) { normalize(); }

    static FunctionExpr monomial(cplx c, long long a, long long b) {
        return FunctionExpr({Term{c, a, b}});
    }
    static FunctionExpr one() { return monomial(cplx(1.0), 0, 0); }
    static FunctionExpr zero() { return FunctionExpr(); }

    [[nodiscard]] bool is_zero() const { return terms.empty(); }

    void normalize() {
        std::map<std::pair<long long, long long>, cplx> acc;
        double scale = 0.0;
        for (const Term& t : terms) {
            acc[{t.b, t.a}] += t.c;
            scale = std::max(scale, std::abs(t.c));
        }
        terms.clear();
        for (const auto& [key, c] : acc) {
            if (std::abs(c) > 1e-13 * scale) terms.push_back(Term{c, key.second, key.first});
        }
    }
};

inline FunctionExpr operator+(const FunctionExpr& f, const FunctionExpr& g) {
    std::vector<Term> t = f.terms;
    t.insert(t.end(), g.terms.begin(), g.terms.end());
    return FunctionExpr(std::move(t));
}

inline FunctionExpr operator*(const FunctionExpr& f, const FunctionExpr& g) {
    std::vector<Term> t;
    t.reserve(f.terms.size() * g.terms.size());
    for (const Term& a : f.terms)
        for (const Term& b : g.terms) t.push_back(Term{a.c * b.c, a.a + b.a, a.b + b.b});
    return FunctionExpr(std::move(t));
}

inline FunctionExpr operator*(cplx s, const FunctionExpr& f) {
    std::vector<Term> t = f.terms;
    for (Term& term : t) term.c *= s;
    return FunctionExpr(std::move(t));
}

/// Lift a univariate polynomial in x to a FunctionExpr, optionally times y^b.
inline FunctionExpr expr_from_poly(const Poly& p, long long ypow = 0) {
    std::vector<Term> t;
    for (size_t i = 0; i < p.size(); ++i)
        if (std::abs(p[i]) > 0.0) t.push_back(Term{p[i], static_cast<long long>(i), ypow});
    return FunctionExpr(std::move(t));
}

/// Structural equality after normalization, with a relative tolerance on the
/// coefficients.
inline bool expr_equal(const FunctionExpr& f, const FunctionExpr& g, double tol = 1e-9) {
    if (f.terms.size() != g.terms.size()) return false;
    double scale = 0.0;
    for (const Term& t : f.terms) scale = std::max(scale, std::abs(t.c));
    for (size_t i = 0; i < f.terms.size(); ++i) {
        const Term &a = f.terms[i], &b = g.terms[i];
        if (a.a != b.a || a.b != b.b) return false;
        if (std::abs(a.c - b.c) > tol * std::max(scale, 1.0)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Places and points
// ---------------------------------------------------------------------------

struct Place {
    enum class Kind { Branch, Infinity };
    Kind kind = Kind::Infinity;
    int branch_index = -1; // valid for Kind::Branch

    static Place infinity() { return Place{Kind::Infinity, -1}; }
    static Place branch(int i) { return Place{Kind::Branch, i}; }
};

struct PointOnCurve {
    cplx x{0.0};
    cplx y{0.0};
    int sheet = 0;            // index into the argument-sorted fiber over x
    bool at_infinity = false; // the single point over x = infinity
    bool ramified = false;    // a branch place (cyclic specs)
    int branch_index = -1;
    double t = 0.0;           // local-parameter magnitude hint for points taken
                              // near infinity (0 when unused)
};

// ---------------------------------------------------------------------------
// Cyclic covers  y^r = prod (x - b_i)^{m_i}
// ---------------------------------------------------------------------------

class CyclicCurveSpec {
public:
    CyclicCurveSpec(long long r, std::vector<cplx> branch_points,
                    std::vector<long long> multiplicities)
        : r_(r), b_(std::move(branch_points)), m_(std::move(multiplicities)) {
        if (r_ < 2) raise(ErrorCode::DegreeBoundViolated, "cover degree r must be >= 2");
        if (b_.size() != m_.size() || b_.empty())
            raise(ErrorCode::DegreeBoundViolated, "branch points and multiplicities must match");
        s_ = 0;
        for (size_t i = 0; i < m_.size(); ++i) {
            if (m_[i] < 1 || m_[i] >= r_)
                raise(ErrorCode::DegreeBoundViolated,
                      "multiplicities must satisfy 1 <= m_i < r");
            if (igcd(r_, m_[i]) != 1)
                raise(ErrorCode::NotCoprime,
                      "branch multiplicity m_" + std::to_string(i) + " shares a factor with r");
            s_ += m_[i];
        }
        if (igcd(r_, s_) != 1)
            raise(ErrorCode::NotCoprime, "sum of multiplicities shares a factor with r");
        double min_sep = 1e300;
        for (size_t i = 0; i < b_.size(); ++i)
            for (size_t j = i + 1; j < b_.size(); ++j)
                min_sep = std::min(min_sep, std::abs(b_[i] - b_[j]));
        if (b_.size() > 1 && min_sep < 1e-12)
            raise(ErrorCode::DegreeBoundViolated, "branch points must be pairwise distinct");
        long long B = static_cast<long long>(b_.size());
        long long twice_g = (B - 1) * (r_ - 1);
        if (twice_g % 2 != 0)
            raise(ErrorCode::DegreeBoundViolated, "inconsistent ramification data");
        genus_ = twice_g / 2;
    }

    [[nodiscard]] long long r() const { return r_; }
    [[nodiscard]] long long s() const { return s_; }
    [[nodiscard]] long long genus() const { return genus_; }
    [[nodiscard]] const std::vector<cplx>& branch_points() const { return b_; }
    [[nodiscard]] const std::vector<long long>& multiplicities() const { return m_; }
    [[nodiscard]] size_t branch_count() const { return b_.size(); }

    /// F(x) = prod (x - b_i)^{m_i}; y^r = F(x).
    [[nodiscard]] cplx F(cplx x) const {
        cplx acc(1.0);
        for (size_t i = 0; i < b_.size(); ++i)
            for (long long k = 0; k < m_[i]; ++k) acc *= (x - b_[i]);
        return acc;
    }

    [[nodiscard]] Poly F_poly() const {
        Poly p{cplx(1.0)};
        for (size_t i = 0; i < b_.size(); ++i)
            for (long long k = 0; k < m_[i]; ++k) p = poly_mul(p, poly_linear(b_[i]));
        return p;
    }

    /// prod_{j != i} (b_i - b_j)^{m_j}: the unit factor of F at branch i.
    [[nodiscard]] cplx branch_unit(int i) const {
        cplx acc(1.0);
        for (size_t j = 0; j < b_.size(); ++j) {
            if (static_cast<int>(j) == i) continue;
            for (long long k = 0; k < m_[j]; ++k) acc *= (b_[static_cast<size_t>(i)] - b_[j]);
        }
        return acc;
    }

    [[nodiscard]] double geometry_scale() const {
        double s = 1.0;
        for (const cplx& b : b_) s = std::max(s, std::abs(b));
        return s;
    }

private:
    long long r_;
    std::vector<cplx> b_;
    std::vector<long long> m_;
    long long s_ = 0;
    long long genus_ = 0;
};

/// One residue class of a FunctionExpr on a cyclic spec:
///   y^rho * F(x)^k * P(x),   0 <= rho < r.
struct ClassPiece {
    long long rho = 0;
    long long k = 0;
    Poly P;
};

/// Exact decomposition of an expression into residue-class pieces. Distinct
/// classes have valuations in distinct residues mod r at every branch place
/// and at infinity, so min over pieces is an exact valuation.
inline std::vector<ClassPiece> class_decomposition(const CyclicCurveSpec& spec,
                                                   const FunctionExpr& f) {
    const long long r = spec.r();
    std::map<long long, std::vector<const Term*>> by_class;
    for (const Term& t : f.terms) {
        long long rho = ((t.b % r) + r) % r;
        by_class[rho].push_back(&t);
    }
    Poly F = spec.F_poly();
    std::vector<ClassPiece> pieces;
    for (auto& [rho, terms] : by_class) {
        long long kmin = 0;
        bool first = true;
        for (const Term* t : terms) {
            long long k = (t->b - rho) / r;
            if (first || k < kmin) kmin = k, first = false;
        }
        Poly P{cplx(0.0)};
        for (const Term* t : terms) {
            long long extra = (t->b - rho) / r - kmin;
            Poly piece{t->c};
            for (long long e = 0; e < extra; ++e) piece = poly_mul(piece, F);
            // shift by x^a
            Poly shifted(static_cast<size_t>(t->a), cplx(0.0));
            shifted.insert(shifted.end(), piece.begin(), piece.end());
            P = poly_add(P, shifted);
        }
        P = poly_trim(P, 1e-12);
        if (poly_degree(P) == 0 && std::abs(P[0]) == 0.0) continue; // cancelled away
        pieces.push_back(ClassPiece{rho, kmin, std::move(P)});
    }
    return pieces;
}

/// Exact valuation at a place. ord(x - b_i) = r and ord(y) = m_i at the place
/// over b_i; ord(x) = -r and ord(y) = -s at infinity.
inline long long valuation(const CyclicCurveSpec& spec, const FunctionExpr& f,
                           const Place& place) {
    if (f.is_zero())
        raise(ErrorCode::CancellationDetected, "valuation of the zero expression");
    auto pieces = class_decomposition(spec, f);
    if (pieces.empty())
        raise(ErrorCode::CancellationDetected, "expression cancelled to zero");
    long long best = 0;
    bool first = true;
    for (const ClassPiece& piece : pieces) {
        long long v;
        if (place.kind == Place::Kind::Infinity) {
            v = -spec.s() * piece.rho -
                spec.r() * (piece.k * spec.s() + poly_degree(piece.P));
        } else {
            int i = place.branch_index;
            long long mi = spec.multiplicities()[static_cast<size_t>(i)];
            long long mult = poly_root_multiplicity(
                piece.P, spec.branch_points()[static_cast<size_t>(i)]);
            v = piece.rho * mi + piece.k * spec.r() * mi + spec.r() * mult;
        }
        if (first || v < best) best = v, first = false;
    }
    return best;
}

/// Exact pole order at infinity; the "weight" of a basis element.
inline long long weight(const CyclicCurveSpec& spec, const FunctionExpr& f) {
    return -valuation(spec, f, Place::infinity());
}

// ---------------------------------------------------------------------------
// Points on cyclic covers
// ---------------------------------------------------------------------------

/// The r candidate y-values over x, sorted by principal argument (then by
/// absolute value; ties cannot occur for cyclic fibers). This fixed ordering
/// is the sheet-tag convention everywhere.
inline std::vector<cplx> cyclic_fiber(const CyclicCurveSpec& spec, cplx x) {
    cplx Fx = spec.F(x);
    long long r = spec.r();
    double mod = std::pow(std::abs(Fx), 1.0 / double(r));
    double arg = std::arg(Fx) / double(r);
    std::vector<cplx> ys;
    for (long long k = 0; k < r; ++k) {
        double a = arg + 2.0 * kPi * double(k) / double(r);
        ys.push_back(cplx(mod * std::cos(a), mod * std::sin(a)));
    }
    std::sort(ys.begin(), ys.end(), [](const cplx& p, const cplx& q) {
        double ap = std::arg(p), aq = std::arg(q);
        if (ap != aq) return ap < aq;
        return std::abs(p) < std::abs(q);
    });
    return ys;
}

inline double branch_distance(const CyclicCurveSpec& spec, cplx x) {
    double d = 1e300;
    for (const cplx& b : spec.branch_points()) d = std::min(d, std::abs(x - b));
    return d;
}

inline PointOnCurve point_on_curve(const CyclicCurveSpec& spec, cplx x0, int sheet,
                                   double clearance = 1e-8) {
    if (branch_distance(spec, x0) < clearance * (1.0 + std::abs(x0)))
        raise(ErrorCode::NearBranchPoint,
              "x0 within clearance of a branch point; use the ramified constructor");
    auto ys = cyclic_fiber(spec, x0);
    if (sheet < 0 || sheet >= static_cast<int>(ys.size()))
        raise(ErrorCode::NearBranchPoint, "sheet index out of range");
    PointOnCurve P;
    P.x = x0;
    P.y = ys[static_cast<size_t>(sheet)];
    P.sheet = sheet;
    return P;
}

inline PointOnCurve branch_place_point(const CyclicCurveSpec& spec, int i) {
    PointOnCurve P;
    P.x = spec.branch_points()[static_cast<size_t>(i)];
    P.y = cplx(0.0);
    P.ramified = true;
    P.branch_index = i;
    return P;
}

inline PointOnCurve infinity_point() {
    PointOnCurve P;
    P.at_infinity = true;
    return P;
}

/// Evaluate an expression at a point. At ramified places and at infinity the
/// exact valuation decides: positive order gives 0, order zero gives the
/// residue-class limit, negative order raises PoleAtPoint.
inline cplx evaluate(const CyclicCurveSpec& spec, const FunctionExpr& f,
                     const PointOnCurve& P) {
    if (f.is_zero()) return cplx(0.0);
    if (P.at_infinity) {
        long long v = valuation(spec, f, Place::infinity());
        if (v < 0) raise(ErrorCode::PoleAtPoint, "pole at infinity");
        if (v > 0) return cplx(0.0);
        for (const ClassPiece& piece : class_decomposition(spec, f)) {
            long long vp = -spec.s() * piece.rho -
                           spec.r() * (piece.k * spec.s() + poly_degree(piece.P));
            if (vp == 0) return piece.P.back(); // F is monic
        }
        return cplx(0.0);
    }
    if (P.ramified) {
        int i = P.branch_index;
        long long v = valuation(spec, f, Place::branch(i));
        if (v < 0) raise(ErrorCode::PoleAtPoint, "pole at branch place");
        if (v > 0) return cplx(0.0);
        cplx bi = spec.branch_points()[static_cast<size_t>(i)];
        long long mi = spec.multiplicities()[static_cast<size_t>(i)];
        cplx total(0.0);
        for (const ClassPiece& piece : class_decomposition(spec, f)) {
            if (piece.rho != 0) continue; // nonzero classes vanish or blow up in pairs
            long long mult = poly_root_multiplicity(piece.P, bi);
            if (piece.k * mi + mult != 0) continue;
            Poly Q = piece.P;
            for (long long e = 0; e < mult; ++e) Q = poly_deflate(Q, bi);
            cplx unit = spec.branch_unit(i);
            cplx upow = std::pow(unit, double(piece.k)); // integer power, |k| small
            total += poly_eval(Q, bi) * upow;
        }
        return total;
    }
    cplx acc(0.0);
    for (const Term& t : f.terms) {
        cplx xa(1.0);
        for (long long e = 0; e < t.a; ++e) xa *= P.x;
        cplx yb(1.0);
        long long bb = t.b < 0 ? -t.b : t.b;
        for (long long e = 0; e < bb; ++e) yb *= P.y;
        if (t.b < 0) yb = cplx(1.0) / yb;
        acc += t.c * xa * yb;
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
        raise(ErrorCode::PoleAtPoint, "evaluation overflowed (pole at point)");
    return acc;
}

/// Equality as functions on the curve: structural forms may differ by
/// multiples of the defining relation y^r = F(x), so values are compared on
/// every sheet of a few generic fibers.
inline bool expr_equal_on_curve(const CyclicCurveSpec& spec, const FunctionExpr& f,
                                const FunctionExpr& g, double tol = 1e-8) {
    double sc = spec.geometry_scale() + 0.5;
    for (cplx x0 : {cplx(0.731, 0.211), cplx(-0.413, 1.618), cplx(1.277, -0.924)}) {
        cplx x = sc * x0;
        for (int sheet = 0; sheet < static_cast<int>(spec.r()); ++sheet) {
            PointOnCurve P = point_on_curve(spec, x, sheet);
            cplx vf = evaluate(spec, f, P);
            cplx vg = evaluate(spec, g, P);
            if (std::abs(vf - vg) > tol * (1.0 + std::max(std::abs(vf), std::abs(vg))))
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Class generators and the cyclic monomial basis
// ---------------------------------------------------------------------------

/// Minimal-weight regular function whose y-degree is congruent to rho mod r:
///   u_rho = y^rho / prod_i (x - b_i)^{floor(rho m_i / r)},
/// expressed with non-negative x-powers via y^r = F(x) when any exponent in
/// the denominator is positive.
inline FunctionExpr class_generator(const CyclicCurveSpec& spec, long long rho) {
    const long long r = spec.r();
    rho = ((rho % r) + r) % r;
    if (rho == 0) return FunctionExpr::one();
    std::vector<long long> e(spec.branch_count());
    bool any = false;
    for (size_t i = 0; i < spec.branch_count(); ++i) {
        e[i] = (rho * spec.multiplicities()[i]) / r;
        any = any || (e[i] > 0);
    }
    if (!any) return FunctionExpr::monomial(cplx(1.0), 0, rho);
    Poly num{cplx(1.0)};
    for (size_t i = 0; i < spec.branch_count(); ++i)
        for (long long k = 0; k < spec.multiplicities()[i] - e[i]; ++k)
            num = poly_mul(num, poly_linear(spec.branch_points()[i]));
    return expr_from_poly(num, rho - r);
}

struct BasisElement {
    FunctionExpr expr;
    long long wt = 0;
    std::string name; // compact rendering, e.g. "x^2*w"
};

/// Render x^j * u_rho using per-curve generator names. Pure powers of y keep
/// the name y^rho; other class generators are named w, and written y^a*w^b
/// when u_rho equals that product exactly.
inline std::string cyclic_monomial_name(const CyclicCurveSpec& spec, long long j,
                                        long long rho) {
    const long long r = spec.r();
    rho = ((rho % r) + r) % r;
    // smallest class whose generator is not a pure power of y:
    long long rho_w = -1;
    for (long long q = 1; q < r && rho_w < 0; ++q) {
        for (size_t i = 0; i < spec.branch_count(); ++i)
            if ((q * spec.multiplicities()[i]) / r > 0) {
                rho_w = q;
                break;
            }
    }
    auto upow = [](const std::string& base, long long e) -> std::string {
        if (e == 0) return "";
        if (e == 1) return base;
        return base + "^" + std::to_string(e);
    };
    std::string factor;
    if (rho == 0) {
        factor = "";
    } else if (rho_w < 0 || rho < rho_w) {
        factor = upow("y", rho);
    } else {
        // u_rho = y^(rho - beta*rho_w) * w^beta for the largest beta that
        // matches exactly; verify by expression equality.
        FunctionExpr w = class_generator(spec, rho_w);
        bool matched = false;
        for (long long beta = rho / rho_w; beta >= 1 && !matched; --beta) {
            long long alpha = rho - beta * rho_w;
            if (alpha < 0) continue;
            FunctionExpr probe = FunctionExpr::one();
            for (long long e = 0; e < beta; ++e) probe = probe * w;
            if (alpha > 0) probe = probe * FunctionExpr::monomial(cplx(1.0), 0, alpha);
            if (expr_equal(probe, class_generator(spec, rho))) {
                std::string p1 = upow("y", alpha), p2 = upow("w", beta);
                factor = p1.empty() ? p2 : (p2.empty() ? p1 : p1 + "*" + p2);
                matched = true;
            }
        }
        if (!matched) factor = "u" + std::to_string(rho);
    }
    std::string xs = upow("x", j);
    if (xs.empty() && factor.empty()) return "1";
    if (xs.empty()) return factor;
    if (factor.empty()) return xs;
    return xs + "*" + factor;
}

inline std::string power_name(const std::string& base, long long e) {
    if (e == 0) return "";
    if (e == 1) return base;
    return base + "^" + std::to_string(e);
}

inline std::string join_factors(std::initializer_list<std::string> factors) {
    std::string out;
    for (const std::string& f : factors) {
        if (f.empty()) continue;
        if (!out.empty()) out += "*";
        out += f;
    }
    return out.empty() ? "1" : out;
}

/// Weight-ordered monomial basis: one element per semigroup weight up to the
/// bound. The representative of weight W is the plain monomial x^a y^b with
/// 0 <= b < r whenever W = r a + s b is solvable with a >= 0, and x^j u_rho
/// (the class generator shifted by powers of x) otherwise. Distinct classes
/// have distinct weights mod r, so the weight order is unambiguous.
inline std::vector<BasisElement> monomial_basis(const CyclicCurveSpec& spec,
                                                long long weight_bound) {
    const long long r = spec.r(), s = spec.s();
    std::vector<BasisElement> out;
    for (long long rho = 0; rho < r; ++rho) {
        FunctionExpr u = class_generator(spec, rho);
        long long wu = weight(spec, u);
        for (long long j = 0;; ++j) {
            long long W = wu + r * j;
            if (W > weight_bound) break;
            BasisElement el;
            el.wt = W;
            long long b = -1;
            for (long long cand = 0; cand < r; ++cand)
                if (((s * cand - W) % r + r) % r == 0) {
                    b = cand;
                    break;
                }
            if (b >= 0 && W - s * b >= 0) {
                long long a = (W - s * b) / r;
                el.expr = FunctionExpr::monomial(cplx(1.0), a, b);
                el.name = join_factors({power_name("x", a), power_name("y", b)});
            } else {
                el.expr = FunctionExpr::monomial(cplx(1.0), j, 0) * u;
                el.name = cyclic_monomial_name(spec, j, rho);
            }
            out.push_back(std::move(el));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const BasisElement& a, const BasisElement& b) { return a.wt < b.wt; });
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].wt == out[i - 1].wt)
            raise(ErrorCode::BasisGapUnfillable,
                  "duplicate weight " + std::to_string(out[i].wt) + " in monomial basis");
    return out;
}

} // namespace wcurve
