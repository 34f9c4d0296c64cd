// Frobenius-Stickelberger matrices and the mu-functions.
//
// The n x n FS matrix over the extended numerator basis has (i, j) entry
// phi_{j}(P_i), j = 0..n-1. The level-n mu-function is the determinant ratio
//     mu_n(P) = psi_{n+1}(P_1..P_n, P) / psi_n(P_1..P_n),
// a monic combination of phi_0..phi_n as functions of P. Its coefficients
// mu_{n,k} come from the cofactor expansion of the numerator along its last
// row, with signs arranged so that
//     mu_n(P) = phi_n(P) + sum_{k<n} (-1)^{n-k} mu_{n,k} phi_k(P).
//
// Determinants use LU with partial pivoting. A determinant smaller than
// 1e-10 times the product of row norms is treated as zero: the divisor is
// special and the confluent limit is out of scope.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wcurve/basis.hpp"
#include "wcurve/curve.hpp"
#include "wcurve/plane.hpp"

namespace wcurve {

struct FSMatrix {
    Eigen::MatrixXcd entries;        // (i, j) = phi_j(P_i)
    std::vector<PointOnCurve> points;
    const std::vector<BasisElement>* basis = nullptr;
};

struct MuExpansion {
    long long n = 0;
    std::vector<cplx> coefficients; // mu_{n,0}, ..., mu_{n,n}; last entry 1
    double condition = 0.0;         // condition estimate of the point-minor system
};

namespace detail {

/// Determinant by LU with partial pivoting; exact zero for bitwise-repeated
/// rows (coincident points), below-tolerance otherwise left to the caller.
inline cplx lu_determinant(const Eigen::MatrixXcd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = i + 1; j < M.rows(); ++j)
            if (M.row(i) == M.row(j)) return cplx(0.0);
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(M).determinant();
}

inline double row_norm_product(const Eigen::MatrixXcd& M) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) p *= M.row(i).norm();
    return p;
}

} // namespace detail

/// FS matrix of the first pts.size() basis elements at the given points.
template <class Spec>
FSMatrix fs_matrix(const Spec& spec, const std::vector<BasisElement>& basis,
                   const std::vector<PointOnCurve>& pts) {
    const size_t n = pts.size();
    if (basis.size() < n)
        raise(ErrorCode::ShapeMismatch,
              "basis carries " + std::to_string(basis.size()) +
                  " elements but " + std::to_string(n) + " points were given");
    FSMatrix M;
    M.points = pts;
    M.basis = &basis;
    M.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            M.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                evaluate(spec, basis[j].expr, pts[i]);
    return M;
}

/// FS determinant psi_n(P_1..P_n). Repeated points give an exact zero.
template <class Spec>
cplx fs_det(const Spec& spec, const std::vector<BasisElement>& basis,
            const std::vector<PointOnCurve>& pts) {
    if (pts.empty()) return cplx(1.0);
    return detail::lu_determinant(fs_matrix(spec, basis, pts).entries);
}

/// mu_n(P; P_1..P_n) = psi_{n+1}(P_1..P_n, P) / psi_n(P_1..P_n).
template <class Spec>
cplx mu(const Spec& spec, const std::vector<BasisElement>& basis, long long n,
        const PointOnCurve& P, const std::vector<PointOnCurve>& pts) {
    if (static_cast<long long>(pts.size()) != n)
        raise(ErrorCode::ShapeMismatch, "level " + std::to_string(n) + " needs " +
                                            std::to_string(n) + " points");
    FSMatrix bottom = fs_matrix(spec, basis, pts);
    cplx den = detail::lu_determinant(bottom.entries);
    if (std::abs(den) <= 1e-10 * detail::row_norm_product(bottom.entries))
        raise(ErrorCode::DegenerateDivisor,
              "psi_n vanishes at the divisor; the confluent limit is not taken");
    std::vector<PointOnCurve> all = pts;
    all.push_back(P);
    return fs_det(spec, basis, all) / den;
}

/// Coefficients mu_{n,k} of the expansion
///   mu_n(P) = phi_n(P) + sum_{k<n} (-1)^{n-k} mu_{n,k} phi_k(P),
/// as last-row cofactors of psi_{n+1} normalized by psi_n: the signs
/// (-1)^{n+k} of the expansion match (-1)^{n-k}, so mu_{n,k} is simply the
/// minor that drops column k, divided by psi_n.
template <class Spec>
MuExpansion mu_coefficients(const Spec& spec, const std::vector<BasisElement>& basis,
                            long long n, const std::vector<PointOnCurve>& pts) {
    if (static_cast<long long>(pts.size()) != n)
        raise(ErrorCode::ShapeMismatch, "level " + std::to_string(n) + " needs " +
                                            std::to_string(n) + " points");
    if (static_cast<long long>(basis.size()) < n + 1)
        raise(ErrorCode::ShapeMismatch, "basis too short for level " +
                                            std::to_string(n));
    MuExpansion out;
    out.n = n;
    if (n == 0) {
        out.coefficients = {cplx(1.0)};
        out.condition = 1.0;
        return out;
    }
    // rows: the n points over columns phi_0..phi_n
    Eigen::MatrixXcd wide(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(n + 1));
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j <= n; ++j)
            wide(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                evaluate(spec, basis[static_cast<size_t>(j)].expr,
                         pts[static_cast<size_t>(i)]);
    Eigen::MatrixXcd square = wide.leftCols(static_cast<Eigen::Index>(n));
    cplx den = detail::lu_determinant(square);
    if (std::abs(den) <= 1e-10 * detail::row_norm_product(square))
        raise(ErrorCode::DegenerateDivisor,
              "psi_n vanishes at the divisor; the confluent limit is not taken");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(square);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    out.condition = smin > 0.0 ? svd.singularValues()(0) / smin : 1e300;

    out.coefficients.assign(static_cast<size_t>(n) + 1, cplx(0.0));
    out.coefficients.back() = cplx(1.0);
    Eigen::MatrixXcd minor(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(n));
    for (long long k = 0; k < n; ++k) {
        Eigen::Index col = 0;
        for (long long j = 0; j <= n; ++j) {
            if (j == k) continue;
            minor.col(col++) = wide.col(static_cast<Eigen::Index>(j));
        }
        out.coefficients[static_cast<size_t>(k)] =
            detail::lu_determinant(minor) / den;
    }
    return out;
}

/// Evaluate the expansion form of mu_n at P from precomputed coefficients.
template <class Spec>
cplx mu_from_expansion(const Spec& spec, const std::vector<BasisElement>& basis,
                       const MuExpansion& mu, const PointOnCurve& P) {
    const long long n = mu.n;
    cplx acc = evaluate(spec, basis[static_cast<size_t>(n)].expr, P);
    double sgn = (n % 2 == 0) ? 1.0 : -1.0; // (-1)^{n-k} for k = 0
    for (long long k = 0; k < n; ++k) {
        acc += sgn * mu.coefficients[static_cast<size_t>(k)] *
               evaluate(spec, basis[static_cast<size_t>(k)].expr, P);
        sgn = -sgn;
    }
    return acc;
}

} // namespace wcurve
