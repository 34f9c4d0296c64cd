// Dense univariate polynomials over the complex numbers: evaluation,
// arithmetic, root finding (companion matrix + Newton polish), root
// multiplicity via synthetic division, and Newton interpolation.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "wcurve/numeric.hpp"

namespace wcurve {

/// Coefficients in ascending order: p(x) = c[0] + c[1] x + ... + c[n] x^n.
using Poly = std::vector<cplx>;

inline Poly poly_trim(Poly p, double tol = 0.0) {
    double scale = 0.0;
    for (const cplx& c : p) scale = std::max(scale, std::abs(c));
    while (p.size() > 1 && std::abs(p.back()) <= tol * scale) p.pop_back();
    if (p.empty()) p.push_back(cplx(0.0));
    return p;
}

inline int poly_degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline cplx poly_eval(const Poly& p, cplx x) {
    cplx acc(0.0);
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {cplx(0.0)};
    Poly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = double(i) * p[i];
    return d;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), cplx(0.0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Poly poly_scale(const Poly& a, cplx s) {
    Poly r = a;
    for (cplx& c : r) c *= s;
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, cplx(0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// Monic linear factor helper: returns (x - b).
inline Poly poly_linear(cplx b) { return Poly{-b, cplx(1.0)}; }

/// Synthetic division of p by (x - b). Returns the quotient; *remainder
/// receives p(b).
inline Poly poly_deflate(const Poly& p, cplx b, cplx* remainder = nullptr) {
    Poly q(p.size() > 1 ? p.size() - 1 : 1, cplx(0.0));
    cplx acc(0.0);
    for (size_t i = p.size(); i-- > 0;) {
        if (i + 1 < p.size()) q[i] = acc;
        acc = acc * b + p[i];
    }
    if (remainder) *remainder = acc;
    if (p.size() <= 1) q = {cplx(0.0)};
    return q;
}

/// Multiplicity of b as a root of p, decided with a relative tolerance:
/// division stops as soon as the remainder is non-negligible against the
/// polynomial's coefficient scale.
inline int poly_root_multiplicity(Poly p, cplx b, double rel_tol = 1e-9) {
    int mult = 0;
    while (poly_degree(poly_trim(p, 1e-300)) >= 1) {
        double scale = 0.0;
        double bp = std::max(1.0, std::abs(b));
        double bpow = 1.0;
        for (const cplx& c : p) {
            scale = std::max(scale, std::abs(c) * bpow);
            bpow *= bp;
        }
        cplx rem;
        Poly q = poly_deflate(p, b, &rem);
        if (std::abs(rem) > rel_tol * std::max(scale, 1e-300)) break;
        ++mult;
        p = std::move(q);
    }
    return mult;
}

/// All roots of p via the companion matrix, each polished by a few Newton
/// steps. Roots are sorted by (real, imag) for deterministic ordering.
inline std::vector<cplx> poly_roots(const Poly& p_in) {
    Poly p = poly_trim(p_in, 1e-14);
    int n = poly_degree(p);
    std::vector<cplx> roots;
    if (n < 1) return roots;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
    for (int i = 1; i < n; ++i) C(i, i - 1) = cplx(1.0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    Poly dp = poly_derivative(p);
    for (int i = 0; i < n; ++i) {
        cplx r = es.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            cplx f = poly_eval(p, r);
            cplx df = poly_eval(dp, r);
            if (std::abs(df) < 1e-300) break;
            cplx step = f / df;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

/// Newton interpolation through (xs[i], ys[i]); returns standard coefficients.
inline Poly poly_interpolate(const std::vector<cplx>& xs, const std::vector<cplx>& ys) {
    const size_t n = xs.size();
    std::vector<cplx> dd = ys; // divided differences, updated in place
    for (size_t level = 1; level < n; ++level)
        for (size_t i = n - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
    // Expand Newton form to standard coefficients.
    Poly result{dd[n - 1]};
    for (size_t i = n - 1; i-- > 0;) {
        result = poly_mul(result, poly_linear(xs[i]));
        result[0] += dd[i];
    }
    return result;
}

} // namespace wcurve
