// Canonical and extended bases of differentials.
//
// Cyclic route: holomorphic differentials are written nu_i = phi_{i-1} dx / h
// where h is the least-weight function supported on the branch places whose
// admissible numerator count equals the genus. Numerator floors reduce to
// exact divisibility constraints per residue class, so no linear algebra is
// needed. The base divisor is B = div_fin(h) - sum (r-1) B_i, of degree
// d1 = wt(h) - (r+1) - (2g-2).
//
// Plane route: h = f_y is pinned; numerators are monomial representatives of
// weight <= 2g-2+d1 corrected to vanish on every branch of each node
// (adjoint conditions), built weight-ascending: x times a lower numerator
// when that already vanishes, else a least-squares correction over lower
// representatives. d1 = wt(f_y) - (m+1) - (2g-2) = 2 * #nodes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wcurve/curve.hpp"
#include "wcurve/plane.hpp"
#include "wcurve/semigroup.hpp"

namespace wcurve {

inline long long ceil_div(long long a, long long b) {
    // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

// ---------------------------------------------------------------------------
// Cyclic route
// ---------------------------------------------------------------------------

struct DifferentialBasis {
    FunctionExpr h;
    std::string h_name;
    long long h_weight = 0;
    std::vector<long long> h_ord;      // valuation of h at each branch place
    std::vector<long long> base_mult;  // B multiplicities: h_ord[i] - (r-1)
    long long d1 = 0;
    long long genus = 0;
    std::vector<BasisElement> phi;     // the g holomorphic numerators
};

namespace detail {

/// Name for a polynomial factor prod (x - b_i)^{e_i} in terms of the branch
/// points, e.g. "(x+2)*(x+1)".
inline std::string root_factor_name(const std::vector<cplx>& roots,
                                    const std::vector<long long>& e) {
    std::string out;
    for (size_t i = 0; i < roots.size(); ++i) {
        if (e[i] <= 0) continue;
        if (!out.empty()) out += "*";
        char buf[64];
        double re = roots[i].real(), im = roots[i].imag();
        if (std::abs(im) < 1e-6 * (1.0 + std::abs(re))) {
            if (std::abs(re) < 1e-6) std::snprintf(buf, sizeof buf, "x");
            else std::snprintf(buf, sizeof buf, "(x%+g)", -re);
        } else {
            std::snprintf(buf, sizeof buf, "(x-(%g%+gi))", re, im);
        }
        out += power_name(buf, e[i]);
    }
    return out;
}

/// One residue class of admissible numerators: x^j * base, j >= 0.
struct FloorClass {
    long long rho = 0;
    FunctionExpr base;
    long long base_weight = 0;
    std::vector<long long> need; // enforced extra zeros at branch places
};

inline std::vector<FloorClass> floor_classes(const CyclicCurveSpec& spec,
                                             const std::vector<long long>& req) {
    const long long r = spec.r();
    std::vector<FloorClass> out;
    for (long long rho = 0; rho < r; ++rho) {
        FloorClass fc;
        fc.rho = rho;
        FunctionExpr u = class_generator(spec, rho);
        fc.need.resize(spec.branch_count());
        FunctionExpr factor = FunctionExpr::one();
        for (size_t i = 0; i < spec.branch_count(); ++i) {
            long long ord_u = valuation(spec, u, Place::branch(static_cast<int>(i)));
            fc.need[i] = std::max<long long>(0, ceil_div(req[i] - ord_u, r));
            for (long long k = 0; k < fc.need[i]; ++k)
                factor = factor * expr_from_poly(poly_linear(spec.branch_points()[i]));
        }
        fc.base = u * factor;
        fc.base_weight = weight(spec, fc.base);
        out.push_back(std::move(fc));
    }
    return out;
}

/// Does the plain monomial x^a y^b of this weight satisfy the floors?
inline bool staircase_admissible(const CyclicCurveSpec& spec, long long W,
                                 const std::vector<long long>& req, long long& a_out,
                                 long long& b_out) {
    const long long r = spec.r(), s = spec.s();
    for (long long b = 0; b < r; ++b) {
        if (((s * b - W) % r + r) % r != 0) continue;
        if (W - s * b < 0) return false;
        long long a = (W - s * b) / r;
        FunctionExpr mono = FunctionExpr::monomial(cplx(1.0), a, b);
        for (size_t i = 0; i < spec.branch_count(); ++i)
            if (valuation(spec, mono, Place::branch(static_cast<int>(i))) < req[i])
                return false;
        a_out = a;
        b_out = b;
        return true;
    }
    return false;
}

} // namespace detail

/// Weight-ordered numerators f with div(f) >= req at the branch places:
/// all of them with weight <= wt_cap when max_count == 0, otherwise the first
/// max_count of them (wt_cap ignored). Representatives prefer the plain
/// monomial x^a y^b when it satisfies the floors.
inline std::vector<BasisElement> cyclic_floor_elements(const CyclicCurveSpec& spec,
                                                       const std::vector<long long>& req,
                                                       long long wt_cap,
                                                       size_t max_count = 0) {
    auto classes = detail::floor_classes(spec, req);
    std::vector<BasisElement> out;
    // enumerate by weight: class weights are distinct mod r, so j-th element
    // of the merge is well defined
    std::vector<long long> next_j(classes.size(), 0);
    while (true) {
        long long bestW = -1;
        size_t best = 0;
        for (size_t c = 0; c < classes.size(); ++c) {
            long long W = classes[c].base_weight + spec.r() * next_j[c];
            if (bestW < 0 || W < bestW) bestW = W, best = c;
        }
        if (max_count == 0 && bestW > wt_cap) break;
        if (max_count > 0 && out.size() >= max_count) break;
        const auto& fc = classes[best];
        long long j = next_j[best]++;
        BasisElement el;
        el.wt = bestW;
        long long a = 0, b = 0;
        if (detail::staircase_admissible(spec, bestW, req, a, b)) {
            el.expr = FunctionExpr::monomial(cplx(1.0), a, b);
            el.name = join_factors({power_name("x", a), power_name("y", b)});
        } else {
            el.expr = FunctionExpr::monomial(cplx(1.0), j, 0) * fc.base;
            bool pure = true;
            for (long long n : fc.need) pure = pure && (n == 0);
            if (pure) {
                el.name = cyclic_monomial_name(spec, j, fc.rho);
            } else {
                std::string fact =
                    detail::root_factor_name(spec.branch_points(), fc.need);
                std::string head = join_factors(
                    {power_name("x", j), cyclic_monomial_name(spec, 0, fc.rho) == "1"
                                             ? std::string()
                                             : cyclic_monomial_name(spec, 0, fc.rho)});
                el.name = head == "1" ? fact : fact + "*" + head;
            }
        }
        out.push_back(std::move(el));
    }
    return out;
}

/// Least-weight branch-supported denominator with exactly g admissible
/// numerators of weight <= wt(h) - (r+1). Shapes u_rho * prod (x-b_i)^{t_i}
/// are enumerated by weight, classes ascending and exponent vectors in
/// lexicographically decreasing order within a weight.
inline DifferentialBasis differential_basis(const CyclicCurveSpec& spec,
                                            long long weight_budget = 0) {
    const long long r = spec.r();
    const long long g = spec.genus();
    if (g == 0) raise(ErrorCode::DegenerateGenusZero, "no holomorphic differentials");
    if (weight_budget <= 0) weight_budget = (r + 1) + (2 * g - 2) + 2 * g + 2 * r;

    std::vector<FunctionExpr> u(static_cast<size_t>(r));
    std::vector<long long> wu(static_cast<size_t>(r));
    for (long long rho = 0; rho < r; ++rho) {
        u[static_cast<size_t>(rho)] = class_generator(spec, rho);
        wu[static_cast<size_t>(rho)] = weight(spec, u[static_cast<size_t>(rho)]);
    }

    const size_t B = spec.branch_count();
    for (long long W = 0; W <= weight_budget; ++W) {
        long long cap = W - (r + 1);
        if (cap < 0) continue;
        for (long long rho = 0; rho < r; ++rho) {
            long long rem = W - wu[static_cast<size_t>(rho)];
            if (rem < 0 || rem % r != 0) continue;
            long long T = rem / r;
            // exponent vectors with sum T, lexicographically decreasing
            std::vector<std::vector<long long>> shapes;
            std::vector<long long> t(B, 0);
            std::function<void(size_t, long long)> gen = [&](size_t idx, long long left) {
                if (idx + 1 == B) {
                    t[idx] = left;
                    shapes.push_back(t);
                    return;
                }
                for (long long v = left; v >= 0; --v) {
                    t[idx] = v;
                    gen(idx + 1, left - v);
                }
            };
            gen(0, T);
            for (const auto& tv : shapes) {
                FunctionExpr h = u[static_cast<size_t>(rho)];
                for (size_t i = 0; i < B; ++i)
                    for (long long k = 0; k < tv[i]; ++k)
                        h = h * expr_from_poly(poly_linear(spec.branch_points()[i]));
                std::vector<long long> h_ord(B), req(B);
                for (size_t i = 0; i < B; ++i) {
                    h_ord[i] = valuation(spec, h, Place::branch(static_cast<int>(i)));
                    req[i] = h_ord[i] - (r - 1);
                }
                auto nums = cyclic_floor_elements(spec, req, cap);
                if (static_cast<long long>(nums.size()) != g) continue;
                if (nums.back().wt != cap) continue; // top weight must hit 2g-2+d1

                DifferentialBasis out;
                out.h = h;
                out.h_weight = W;
                out.h_ord = h_ord;
                out.genus = g;
                out.d1 = W - (r + 1) - (2 * g - 2);
                out.base_mult.resize(B);
                long long degB = 0;
                for (size_t i = 0; i < B; ++i) {
                    out.base_mult[i] = h_ord[i] - (r - 1);
                    degB += out.base_mult[i];
                    if (out.base_mult[i] < 0)
                        raise(ErrorCode::DegenerateConfiguration,
                              "accepted denominator has a non-effective base divisor");
                }
                if (degB != out.d1)
                    raise(ErrorCode::DegenerateConfiguration,
                          "base divisor degree disagrees with d1");
                out.phi = std::move(nums);
                // prefer the plain staircase monomial rendering of h when it
                // agrees with h as a function on the curve
                const long long s = spec.s();
                for (long long bb = 0; bb < r && out.h_name.empty(); ++bb) {
                    if (((s * bb - W) % r + r) % r != 0) continue;
                    if (W - s * bb < 0) continue;
                    long long a = (W - s * bb) / r;
                    FunctionExpr mono = FunctionExpr::monomial(cplx(1.0), a, bb);
                    if (expr_equal_on_curve(spec, mono, h)) {
                        out.h = mono; // keep the lighter structural form
                        out.h_name =
                            join_factors({power_name("x", a), power_name("y", bb)});
                    }
                }
                if (out.h_name.empty()) {
                    std::string fact = detail::root_factor_name(spec.branch_points(), tv);
                    std::string un = cyclic_monomial_name(spec, 0, rho);
                    out.h_name = fact.empty() ? un : (un == "1" ? fact : fact + "*" + un);
                }
                return out;
            }
        }
    }
    raise(ErrorCode::DenominatorSearchExhausted,
          "no denominator with exactly g numerators within the weight budget");
}

/// First `count` admissible numerators for the accepted denominator (the
/// canonical g ones followed by the ascending-weight extension).
inline std::vector<BasisElement> extended_numerators(const CyclicCurveSpec& spec,
                                                     const DifferentialBasis& basis,
                                                     size_t count) {
    std::vector<long long> req(spec.branch_count());
    for (size_t i = 0; i < spec.branch_count(); ++i)
        req[i] = basis.h_ord[i] - (spec.r() - 1);
    return cyclic_floor_elements(spec, req, 0, count);
}

// ---------------------------------------------------------------------------
// Plane route
// ---------------------------------------------------------------------------

/// A function y^{rho-m} C(x) of negative y-degree that stays bounded over the
/// zero locus of A_m; its weight fills a gap of <m, n>.
struct ExtensionGenerator {
    FunctionExpr expr;
    long long wt = 0;
    long long ypow = 0; // rho - m, negative
    std::string name;
};

namespace detail {

/// Max |f| over all sheets of the fiber above x.
inline double fiber_sup(const PlaneWeierstrassSpec& spec, const FunctionExpr& f,
                        const cplx& x) {
    double best = 0.0;
    for (const cplx& y : plane_fiber(spec, x))
        best = std::max(best, std::abs(evaluate(spec, f, x, y)));
    return best;
}

/// Is y^{rho-m} (x-xi)^t bounded near xi along both probe directions? The
/// decision compares fiber suprema at radii eps and eps/100: a pole on a
/// branch of ramification index e grows by at least 100^{1/e} >= 100^{1/m},
/// so the 1.4 threshold separates poles from bounded limits for m <= 9.
inline bool bounded_at_root(const PlaneWeierstrassSpec& spec, const cplx& xi,
                            long long ypow, long long t) {
    Poly C{cplx(1.0)};
    for (long long k = 0; k < t; ++k) C = poly_mul(C, poly_linear(xi));
    FunctionExpr cand = expr_from_poly(C, ypow);
    double eps = 1e-4 * (1.0 + std::abs(xi));
    for (double ang : {0.31, 2.17}) {
        cplx dir = std::exp(cplx(0.0, ang));
        double v1 = fiber_sup(spec, cand, xi + eps * dir);
        double v2 = fiber_sup(spec, cand, xi + 0.01 * eps * dir);
        if (v2 > 1.4 * v1 + 1e-12) return false;
    }
    return true;
}

} // namespace detail

/// Search Laurent candidates y^{rho-m} C(x), C supported on the zeros of A_m
/// (the only finite points over which y vanishes). Boundedness at a zero xi
/// depends only on the local exponent of C there, so the minimal candidate of
/// a class takes the per-root minimal exponent. A class generator is admitted
/// when its weight is not already generated by {m, n} and prior admissions.
inline std::vector<ExtensionGenerator> plane_extension_generators(
    const PlaneWeierstrassSpec& spec) {
    const long long m = spec.m(), n = spec.n();
    Poly am = spec.A().back();
    std::vector<cplx> roots = poly_roots(am);
    // cluster repeated roots; the cluster mean cancels the symmetric O(eps^(1/k))
    // scatter of a k-fold root, recovering it to O(eps^(2/k))
    std::vector<cplx> sums;
    std::vector<long long> mult;
    for (const cplx& z : roots) {
        bool dup = false;
        for (size_t i = 0; i < sums.size(); ++i)
            if (std::abs(z - sums[i] / double(mult[i])) <
                1e-5 * (1.0 + std::abs(z))) {
                dup = true;
                sums[i] += z;
                ++mult[i];
                break;
            }
        if (!dup) {
            sums.push_back(z);
            mult.push_back(1);
        }
    }
    std::vector<cplx> distinct;
    for (size_t i = 0; i < sums.size(); ++i) distinct.push_back(sums[i] / double(mult[i]));
    // a k-fold root of A_m is a simple root of its (k-1)-th derivative, so a
    // few Newton steps there restore it to machine precision (the mean alone
    // retains the asymmetric part of the cluster scatter)
    for (size_t i = 0; i < distinct.size(); ++i) {
        if (mult[i] < 2) continue;
        Poly d = am;
        for (long long k = 1; k < mult[i]; ++k) d = poly_derivative(d);
        Poly dd = poly_derivative(d);
        for (int it = 0; it < 8; ++it) {
            cplx den = poly_eval(dd, distinct[i]);
            if (std::abs(den) == 0.0) break;
            distinct[i] -= poly_eval(d, distinct[i]) / den;
        }
    }

    std::vector<ExtensionGenerator> found;
    for (long long rho = 1; rho < m; ++rho) {
        bool have = true;
        ExtensionGenerator best;
        best.ypow = rho - m;
        Poly C{cplx(1.0)};
        long long total = 0;
        for (size_t i = 0; i < distinct.size() && have; ++i) {
            long long t_cap = (m - rho) * mult[i] + 1;
            long long t = 0;
            while (t <= t_cap &&
                   !detail::bounded_at_root(spec, distinct[i], rho - m, t))
                ++t;
            if (t > t_cap) {
                have = false;
                break;
            }
            total += t;
            for (long long k = 0; k < t; ++k) C = poly_mul(C, poly_linear(distinct[i]));
        }
        if (!have) continue;
        best.wt = n * (rho - m) + m * total;
        if (best.wt < 0) continue; // would vanish at infinity yet be regular
        best.expr = expr_from_poly(C, rho - m);
        found.push_back(best);
    }

    std::sort(found.begin(), found.end(),
              [](const ExtensionGenerator& a, const ExtensionGenerator& b) {
                  return a.wt < b.wt;
              });
    // greedy admission: keep only weights outside the running semigroup
    std::vector<long long> gens{m, n};
    std::vector<ExtensionGenerator> admitted;
    const char* names[] = {"w", "v", "u"};
    for (auto& cand : found) {
        NumericalSemigroup H = semigroup_from_generators(gens);
        if (H.contains(cand.wt)) continue;
        cand.name = names[std::min<size_t>(admitted.size(), 2)];
        gens.push_back(cand.wt);
        admitted.push_back(cand);
    }
    return admitted;
}

/// Monomial representative x^a y^b prod w_k^{c_k} of the given weight with
/// b + sum c <= m - 1, maximizing b + sum c and then sum c. Returns false if
/// the weight admits no representative.
inline bool plane_representative(const PlaneWeierstrassSpec& spec,
                                 const std::vector<ExtensionGenerator>& gens,
                                 long long W, BasisElement& out) {
    const long long m = spec.m(), n = spec.n();
    bool have = false;
    long long best_bc = -1, best_c = -1;
    std::vector<long long> best_cv;
    long long best_a = 0, best_b = 0;

    std::vector<long long> c(gens.size(), 0);
    std::function<void(size_t, long long, long long)> scan = [&](size_t idx,
                                                                 long long used,
                                                                 long long wleft) {
        if (idx == gens.size()) {
            for (long long b = 0; used + b <= m - 1; ++b) {
                long long rem = wleft - n * b;
                if (rem < 0 || rem % m != 0) continue;
                long long a = rem / m;
                long long bc = b + used;
                long long ct = used;
                if (bc > best_bc || (bc == best_bc && ct > best_c) ||
                    (bc == best_bc && ct == best_c &&
                     std::lexicographical_compare(best_cv.begin(), best_cv.end(),
                                                  c.begin(), c.end()))) {
                    best_bc = bc;
                    best_c = ct;
                    best_cv = c;
                    best_a = a;
                    best_b = b;
                    have = true;
                }
            }
            return;
        }
        for (long long v = 0; used + v <= m - 1 && v * gens[idx].wt <= wleft; ++v) {
            c[idx] = v;
            scan(idx + 1, used + v, wleft - v * gens[idx].wt);
        }
        c[idx] = 0;
    };
    scan(0, 0, W);
    if (!have) return false;

    FunctionExpr expr = FunctionExpr::monomial(cplx(1.0), best_a, best_b);
    std::string name = join_factors({power_name("x", best_a), power_name("y", best_b)});
    for (size_t k = 0; k < gens.size(); ++k) {
        for (long long i = 0; i < best_cv[k]; ++i) expr = expr * gens[k].expr;
        std::string gpart = power_name(gens[k].name, best_cv[k]);
        if (!gpart.empty()) name = name == "1" ? gpart : name + "*" + gpart;
    }
    out.expr = expr;
    out.wt = W;
    out.name = name;
    return true;
}

/// Weight-ordered representatives of every semigroup weight <= bound.
inline std::vector<BasisElement> plane_monomial_basis(
    const PlaneWeierstrassSpec& spec, const std::vector<ExtensionGenerator>& gens,
    long long bound) {
    std::vector<long long> sg{spec.m(), spec.n()};
    for (const auto& ggen : gens) sg.push_back(ggen.wt);
    NumericalSemigroup H = semigroup_from_generators(sg);
    std::vector<BasisElement> out;
    for (long long W = 0; W <= bound; ++W) {
        if (!H.contains(W)) continue;
        BasisElement el;
        if (!plane_representative(spec, gens, W, el))
            raise(ErrorCode::BasisGapUnfillable,
                  "no monomial representative at weight " + std::to_string(W));
        out.push_back(std::move(el));
    }
    return out;
}

struct PlaneDifferentialBasis {
    FunctionExpr h;          // f_y
    std::string h_name = "f_y";
    long long h_weight = 0;
    long long d1 = 0;
    long long genus = 0;
    std::vector<ExtensionGenerator> gens;
    std::vector<BasisElement> reps; // monomial representatives up to 2g-2+d1
    std::vector<BasisElement> phi;  // staircase numerators (combos of reps)
};

namespace detail {

/// The node-cluster sheets above x: the fiber_multiplicity roots nearest y0.
inline std::vector<cplx> node_cluster(const PlaneWeierstrassSpec& spec, const cplx& x,
                                      const cplx& y0, int mult) {
    std::vector<cplx> fiber = plane_fiber(spec, x);
    std::sort(fiber.begin(), fiber.end(), [&](const cplx& a, const cplx& b) {
        double da = std::abs(a - y0), db = std::abs(b - y0);
        if (std::abs(da - db) > 1e-12 * (da + db + 1e-300)) return da < db;
        return std::arg(a - y0) < std::arg(b - y0); // stable for conjugate pairs
    });
    fiber.resize(static_cast<size_t>(mult));
    return fiber;
}

/// Per-branch limits of an expression at a node, estimated at offset radius
/// eps along the given probe angle. A node carries two branches; when its
/// fiber multiplicity is 3 one branch is vertical (ramified in x) and
/// contributes the two cluster sheets farthest from the node, whose average
/// cancels the sqrt(eps) term, leaving O(eps) accuracy; every other sheet is
/// O(eps) directly.
inline std::vector<cplx> node_branch_limits(const PlaneWeierstrassSpec& spec,
                                            const NodeInfo& node, double eps,
                                            double angle, const FunctionExpr& f) {
    double rad = eps * (1.0 + std::abs(node.x));
    cplx x = node.x + rad * std::exp(cplx(0.0, angle));
    std::vector<cplx> cluster =
        node_cluster(spec, x, node.y, node.fiber_multiplicity);
    auto eval_mean = [&](const std::vector<cplx>& ys) {
        cplx acc(0.0);
        for (const cplx& y : ys) acc += evaluate(spec, f, x, y);
        return acc / double(ys.size());
    };
    if (node.fiber_multiplicity == 2)
        return {eval_mean({cluster[0]}), eval_mean({cluster[1]})};
    if (node.fiber_multiplicity == 3)
        return {eval_mean({cluster[0]}),               // unramified branch
                eval_mean({cluster[1], cluster[2]})};  // ramified pair
    raise(ErrorCode::UnsupportedSingularity,
          "node with fiber multiplicity " + std::to_string(node.fiber_multiplicity));
}

/// Richardson-extrapolated branch limits of f over all nodes and two probe
/// angles. Branch values are analytic in the probe radius, so two
/// extrapolation levels over radii eps, eps/10, eps/100 cancel both the
/// linear and quadratic error terms: entries of a function vanishing on every
/// node branch drop to ~1e-9 of its scale while others stay O(1).
inline std::vector<cplx> adjoint_limit_row(const PlaneWeierstrassSpec& spec,
                                           const PlaneCurveGeometry& geo,
                                           const FunctionExpr& f) {
    std::vector<cplx> out;
    for (const NodeInfo& node : geo.nodes)
        for (double ang : {0.37, 2.03}) {
            auto v4 = node_branch_limits(spec, node, 1e-4, ang, f);
            auto v5 = node_branch_limits(spec, node, 1e-5, ang, f);
            auto v6 = node_branch_limits(spec, node, 1e-6, ang, f);
            for (size_t b = 0; b < v4.size(); ++b) {
                cplx r45 = (10.0 * v5[b] - v4[b]) / 9.0;
                cplx r56 = (10.0 * v6[b] - v5[b]) / 9.0;
                out.push_back((100.0 * r56 - r45) / 99.0);
            }
        }
    return out;
}

/// Magnitude of f on a fiber at unit-scale distance from the nodes; used to
/// normalize vanishing decisions.
inline double away_scale(const PlaneWeierstrassSpec& spec,
                         const PlaneCurveGeometry& geo, const FunctionExpr& f) {
    double best = 0.0;
    for (const NodeInfo& node : geo.nodes) {
        cplx x = node.x + 0.5 * (1.0 + std::abs(node.x)) * std::exp(cplx(0.0, 0.9));
        best = std::max(best, fiber_sup(spec, f, x));
    }
    return best;
}

/// Find c so that target + sum_j c_j low_j vanishes on every node branch;
/// returns false when the scaled least-squares residual shows the target's
/// weight is not represented in the adjoint space.
inline bool adjoint_combination(const PlaneWeierstrassSpec& spec,
                                const PlaneCurveGeometry& geo,
                                const std::vector<BasisElement>& lows,
                                const std::vector<std::vector<cplx>>& low_rows,
                                const FunctionExpr& target,
                                std::vector<cplx>& out_coef) {
    std::vector<cplx> b = adjoint_limit_row(spec, geo, target);
    const size_t R = b.size();
    const size_t T = lows.size();
    // a target that already vanishes on every branch needs no correction;
    // skipping the solve avoids fitting noise coefficients to its residue
    double bmax = 0.0;
    for (const cplx& v : b) bmax = std::max(bmax, std::abs(v));
    if (bmax < 1e-3 * away_scale(spec, geo, target)) {
        out_coef.assign(T, cplx(0.0));
        return true;
    }
    std::vector<double> s(R);
    for (size_t i = 0; i < R; ++i) {
        s[i] = std::abs(b[i]);
        for (size_t j = 0; j < T; ++j) s[i] = std::max(s[i], std::abs(low_rows[j][i]));
        s[i] = std::max(s[i], 1e-300);
    }
    Eigen::MatrixXcd A(R, T);
    Eigen::VectorXcd rhs(R);
    for (size_t i = 0; i < R; ++i) {
        rhs(static_cast<Eigen::Index>(i)) = b[i] / s[i];
        for (size_t j = 0; j < T; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                low_rows[j][i] / s[i];
    }
    Eigen::VectorXcd c;
    if (T > 0)
        c = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-rhs);
    else
        c.resize(0);
    double resid = (T > 0 ? (A * c + rhs).lpNorm<Eigen::Infinity>()
                          : rhs.lpNorm<Eigen::Infinity>());
    if (resid > 1e-3) return false;
    out_coef.assign(static_cast<size_t>(c.size()), cplx(0.0));
    double cmax = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) cmax = std::max(cmax, std::abs(c(j)));
    // sub-1e-6 coefficients are least-squares noise from the O(eps^2) limit
    // errors, not genuine corrections
    for (Eigen::Index j = 0; j < c.size(); ++j)
        out_coef[static_cast<size_t>(j)] =
            std::abs(c(j)) < 1e-6 * (1.0 + cmax) ? cplx(0.0) : c(j);
    return true;
}

/// Factored rendering of a combination whose terms share one y-power and form
/// a monic polynomial in x, e.g. "(x+2)*(x+1)*x". Empty when not of that shape.
inline std::string factored_combo_name(const FunctionExpr& f) {
    if (f.terms.empty()) return {};
    long long b = f.terms.front().b;
    long long deg = 0;
    for (const Term& t : f.terms) {
        if (t.b != b) return {};
        deg = std::max(deg, t.a);
    }
    if (b < 0) return {};
    Poly P(static_cast<size_t>(deg) + 1, cplx(0.0));
    for (const Term& t : f.terms) P[static_cast<size_t>(t.a)] += t.c;
    if (std::abs(P.back() - cplx(1.0)) > 1e-7) return {};
    std::vector<cplx> roots = poly_roots(P);
    // merge repeated roots into exponents for the printed form
    std::vector<cplx> distinct;
    std::vector<long long> exps;
    for (const cplx& z : roots) {
        bool dup = false;
        for (size_t i = 0; i < distinct.size(); ++i)
            if (std::abs(z - distinct[i]) < 1e-5 * (1.0 + std::abs(z))) {
                dup = true;
                ++exps[i];
                break;
            }
        if (!dup) {
            distinct.push_back(z);
            exps.push_back(1);
        }
    }
    std::string fact = root_factor_name(distinct, exps);
    std::string ypart = power_name("y", b);
    if (fact.empty()) return ypart.empty() ? std::string("1") : ypart;
    return ypart.empty() ? fact : fact + "*" + ypart;
}

} // namespace detail

/// Adjoint-constrained basis: h = f_y pinned; numerators span the nullspace of
/// vanishing conditions sampled on every branch of each node, reduced to
/// weight-staircase form (strictly increasing pivot weights, unit pivots).
inline PlaneDifferentialBasis differential_basis(const PlaneWeierstrassSpec& spec,
                                                 const PlaneCurveGeometry& geo) {
    PlaneDifferentialBasis out;
    const long long m = spec.m(), n = spec.n();
    out.genus = geo.genus;
    if (out.genus <= 0)
        raise(ErrorCode::DegenerateGenusZero, "no holomorphic differentials");
    out.h = spec.f_y_expr();
    out.h_weight = n * (m - 1);
    out.d1 = out.h_weight - (m + 1) - (2 * out.genus - 2);
    if (out.d1 != 2 * static_cast<long long>(geo.nodes.size()))
        raise(ErrorCode::DegenerateConfiguration,
              "d1 disagrees with the node count");
    out.gens = plane_extension_generators(spec);
    long long cap = 2 * out.genus - 2 + out.d1;
    out.reps = plane_monomial_basis(spec, out.gens, cap);

    const size_t T = out.reps.size();
    if (geo.nodes.empty()) {
        if (static_cast<long long>(T) != out.genus)
            raise(ErrorCode::BasisGapUnfillable,
                  "representative count disagrees with genus on a smooth model");
        out.phi = out.reps;
        return out;
    }

    // Staircase construction, weight ascending: at each representative weight
    // first try x times an accepted numerator of weight W-m, then a corrected
    // representative; a weight with neither is a genuine gap in the adjoint
    // space (the count must still reach g).
    std::vector<std::vector<cplx>> low_rows;
    for (size_t t = 0; t < T; ++t) {
        const BasisElement& rep = out.reps[t];
        bool accepted = false;
        BasisElement el;
        el.wt = rep.wt;
        for (const BasisElement& prev : out.phi) {
            if (prev.wt != rep.wt - m) continue;
            FunctionExpr cand = FunctionExpr::monomial(cplx(1.0), 1, 0) * prev.expr;
            std::vector<cplx> row = detail::adjoint_limit_row(spec, geo, cand);
            double scale = detail::away_scale(spec, geo, cand);
            double worst = 0.0;
            for (const cplx& v : row) worst = std::max(worst, std::abs(v));
            if (worst < 1e-3 * (scale + 1e-300)) {
                el.expr = cand;
                el.name = detail::factored_combo_name(cand);
                if (el.name.empty()) el.name = "x*" + prev.name;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // correct only by representatives whose weight is not already the
            // pole weight of an accepted numerator: those are leading terms of
            // lower staircase elements, and excluding them pins the correction
            std::vector<size_t> idx;
            for (size_t j = 0; j < t; ++j) {
                bool taken = false;
                for (const BasisElement& prev : out.phi)
                    if (prev.wt == out.reps[j].wt) taken = true;
                if (!taken) idx.push_back(j);
            }
            std::vector<BasisElement> lows;
            std::vector<std::vector<cplx>> rows;
            for (size_t j : idx) {
                lows.push_back(out.reps[j]);
                rows.push_back(low_rows[j]);
            }
            std::vector<cplx> coef;
            if (detail::adjoint_combination(spec, geo, lows, rows, rep.expr,
                                            coef)) {
                FunctionExpr acc = rep.expr;
                size_t used = 0;
                for (size_t j = 0; j < coef.size(); ++j) {
                    if (coef[j] == cplx(0.0)) continue;
                    acc = acc + coef[j] * lows[j].expr;
                    ++used;
                }
                el.expr = acc;
                if (used == 0) {
                    el.name = rep.name;
                } else {
                    el.name = detail::factored_combo_name(acc);
                    if (el.name.empty())
                        el.name = "phi_" + std::to_string(out.phi.size());
                }
                accepted = true;
            }
        }
        if (accepted) out.phi.push_back(std::move(el));
        low_rows.push_back(detail::adjoint_limit_row(spec, geo, rep.expr));
    }
    if (static_cast<long long>(out.phi.size()) != out.genus)
        raise(ErrorCode::BasisGapUnfillable,
              "adjoint numerator count " + std::to_string(out.phi.size()) +
                  " disagrees with genus " + std::to_string(out.genus));

    // vanishing slopes: every numerator must genuinely vanish on each node
    for (const auto& el : out.phi) {
        for (const NodeInfo& node : geo.nodes) {
            double v1 = 0.0, v2 = 0.0;
            for (double eps : {1e-4, 1e-5}) {
                double rad = eps * (1.0 + std::abs(node.x));
                cplx x = node.x + rad * std::exp(cplx(0.0, 0.37));
                double sup = 0.0;
                for (const cplx& y :
                     detail::node_cluster(spec, x, node.y, node.fiber_multiplicity))
                    sup = std::max(sup, std::abs(evaluate(spec, el.expr, x, y)));
                (eps == 1e-4 ? v1 : v2) = sup;
            }
            double ref = detail::plane_value_scale(spec, node.x, node.y);
            if (v2 > v1 / 2.5 + 1e-12 * ref)
                raise(ErrorCode::BasisGapUnfillable,
                      "numerator " + el.name + " fails the node vanishing probe");
        }
    }
    return out;
}

/// Continuation of the numerator staircase past the holomorphic cap (poles at
/// infinity only, still vanishing on every node branch). A weight whose
/// representative cannot be corrected to vanish at the nodes is a genuine gap
/// of that constrained space and is skipped, mirroring the cyclic route.
inline std::vector<BasisElement> extended_numerators(
    const PlaneWeierstrassSpec& spec, const PlaneCurveGeometry& geo,
    const PlaneDifferentialBasis& basis, size_t count) {
    std::vector<BasisElement> out = basis.phi;
    if (out.size() >= count) {
        out.resize(count);
        return out;
    }
    const long long m = spec.m();
    long long cap = 2 * basis.genus - 2 + basis.d1;
    std::vector<long long> sg{m, spec.n()};
    for (const auto& ggen : basis.gens) sg.push_back(ggen.wt);
    NumericalSemigroup H = semigroup_from_generators(sg);

    std::vector<std::vector<cplx>> low_rows;
    if (!geo.nodes.empty())
        for (const auto& rep : basis.reps)
            low_rows.push_back(detail::adjoint_limit_row(spec, geo, rep.expr));

    long long W = cap;
    while (out.size() < count) {
        ++W;
        if (W > cap + 4 * static_cast<long long>(count) * m)
            raise(ErrorCode::BasisGapUnfillable, "extension enumeration stalled");
        if (!H.contains(W)) continue;
        if (geo.nodes.empty()) {
            BasisElement el;
            if (!plane_representative(spec, basis.gens, W, el))
                raise(ErrorCode::BasisGapUnfillable,
                      "no monomial representative at weight " + std::to_string(W));
            out.push_back(std::move(el));
            continue;
        }

        BasisElement el;
        el.wt = W;
        bool accepted = false;
        for (const BasisElement& prev : out) {
            if (prev.wt != W - m) continue;
            FunctionExpr cand = FunctionExpr::monomial(cplx(1.0), 1, 0) * prev.expr;
            std::vector<cplx> row = detail::adjoint_limit_row(spec, geo, cand);
            double scale = detail::away_scale(spec, geo, cand);
            double worst = 0.0;
            for (const cplx& v : row) worst = std::max(worst, std::abs(v));
            if (worst < 1e-3 * (scale + 1e-300)) {
                el.expr = cand;
                el.name = detail::factored_combo_name(cand);
                if (el.name.empty()) el.name = "x*" + prev.name;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            BasisElement rep;
            if (!plane_representative(spec, basis.gens, W, rep))
                raise(ErrorCode::BasisGapUnfillable,
                      "no monomial representative at weight " + std::to_string(W));
            std::vector<BasisElement> lows;
            std::vector<std::vector<cplx>> rows;
            for (size_t j = 0; j < basis.reps.size(); ++j) {
                bool taken = false;
                for (const BasisElement& prev : out)
                    if (prev.wt == basis.reps[j].wt) taken = true;
                if (!taken) {
                    lows.push_back(basis.reps[j]);
                    rows.push_back(low_rows[j]);
                }
            }
            std::vector<cplx> coef;
            if (!detail::adjoint_combination(spec, geo, lows, rows, rep.expr, coef))
                continue; // gap of the node-constrained extension
            FunctionExpr acc = rep.expr;
            size_t used = 0;
            for (size_t j = 0; j < coef.size(); ++j) {
                if (coef[j] == cplx(0.0)) continue;
                acc = acc + coef[j] * lows[j].expr;
                ++used;
            }
            el.expr = acc;
            if (used == 0) {
                el.name = rep.name;
            } else {
                std::string nm = detail::factored_combo_name(acc);
                el.name = nm.empty() ? rep.name + "+corr" : nm;
            }
            accepted = true;
        }
        out.push_back(std::move(el));
    }
    return out;
}

} // namespace wcurve
