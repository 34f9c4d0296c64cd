// Riemann theta function with characteristics, gradient, and Hessian.
//
//   theta[a,b](z, tau) = sum_{n in Z^g} exp( pi*i (n+a)' tau (n+a)
//                                          + 2 pi*i (n+a)' (z+b) ).
//
// z is first reduced modulo the lattice Z^g + tau Z^g (the quasi-periodic
// prefactor is restored afterwards), so the summation ellipsoid stays small.
// Terms are enumerated inside { v : pi (v-c)' Y (v-c) <= R^2 }, Y = Im tau,
// centered at the magnitude peak c; the radius is the smallest on a fixed
// grid whose Gaussian tail bound (shell counts against the smallest
// eigenvalue of Y) is below the requested absolute error. Enumeration order
// is fixed (lexicographic over the coordinate recursion), so results are
// bit-reproducible for identical inputs.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wcurve/errors.hpp"
#include "wcurve/numeric.hpp" // cplx, kPi

namespace wcurve {

/// Admitted Riemann matrix: symmetrized tau with the Cholesky factor and
/// smallest eigenvalue of Im tau cached for reduction and tail bounds.
struct RiemannMatrix {
    Eigen::MatrixXcd tau;
    Eigen::MatrixXd Y;        // Im tau
    Eigen::MatrixXd Ylower;   // Cholesky factor, Y = L L'
    double lambda_min = 0.0;  // smallest eigenvalue of Y
    double asymmetry = 0.0;   // recorded symmetrization residual

    explicit RiemannMatrix(const Eigen::MatrixXcd& t) {
        if (t.rows() != t.cols())
            raise(ErrorCode::ShapeMismatch, "tau must be square");
        double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
        asymmetry = (t - t.transpose()).cwiseAbs().maxCoeff();
        if (asymmetry > 1e-9 * scale)
            raise(ErrorCode::TauNotSymmetric,
                  "asymmetry " + std::to_string(asymmetry) + " exceeds tolerance");
        tau = 0.5 * (t + t.transpose());
        Y = tau.imag();
        Eigen::LLT<Eigen::MatrixXd> llt(Y);
        if (llt.info() != Eigen::Success)
            raise(ErrorCode::TauNotSymmetric,
                  "imaginary part of tau is not positive definite");
        Ylower = llt.matrixL();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
        lambda_min = es.eigenvalues()(0);
    }

    [[nodiscard]] long long g() const { return tau.rows(); }

    /// Solve Y x = r through the cached Cholesky factor.
    [[nodiscard]] Eigen::VectorXd solveY(const Eigen::VectorXd& r) const {
        return Ylower.transpose().triangularView<Eigen::Upper>().solve(
            Ylower.triangularView<Eigen::Lower>().solve(r));
    }
};

/// Half-integer theta characteristic (delta', delta'').
struct Characteristic {
    Eigen::VectorXd a; // delta': multiplies tau
    Eigen::VectorXd b; // delta'': shifts z

    static Characteristic zero(long long g) {
        Characteristic c;
        c.a = Eigen::VectorXd::Zero(g);
        c.b = Eigen::VectorXd::Zero(g);
        return c;
    }

    /// e(delta) = exp(4 pi i a'b): +1 (even) or -1 (odd) for half-integer
    /// characteristics.
    [[nodiscard]] int parity() const {
        long long k = std::llround(4.0 * a.dot(b));
        return ((k % 2 + 2) % 2 == 1) ? -1 : 1;
    }
};

struct ThetaResult {
    cplx value{0.0};
    Eigen::VectorXcd grad;   // d theta / d z_j
    Eigen::MatrixXcd hess;   // d^2 theta / d z_i d z_j
    double tail_bound = 0.0; // absolute bound on the truncated tail
    double radius = 0.0;     // ellipsoid radius actually used
    long long terms = 0;     // lattice points summed
};

namespace detail {

/// Conservative tail bound for the scaled sum, including the derivative
/// amplitude: lattice points with pi (v-c)'Y(v-c) = t^2 >= R^2 contribute
/// |term| <= (2 pi |v|)^order e^{-t^2}; the shell [R+j, R+j+1) holds at most
/// (2(t+1)/sqrt(pi*lambda)+3)^g points with |v| <= t/sqrt(pi*lambda) + base.
inline double theta_tail_bound(long long g, double lambda_min, double R,
                               int order, double vbase) {
    const double root = std::sqrt(kPi * lambda_min);
    double s = 0.0;
    for (int j = 0; j < 200; ++j) {
        double t = R + double(j);
        double count = std::pow(2.0 * (t + 1.0) / root + 3.0, double(g));
        double amp = std::pow(2.0 * kPi * ((t + 1.0) / root + vbase + 1.0),
                              double(order));
        double term = count * amp * std::exp(-t * t);
        s += term;
        if (term < 1e-3 * s && j > 2) break;
    }
    return s;
}

/// Enumerate integer n with || M (n + s) ||^2 <= R^2 (M upper triangular,
/// positive diagonal) in lexicographic order of (n_{g-1}, ..., n_0) and call
/// f(n) for each.
template <class F>
void ellipsoid_enumerate(const Eigen::MatrixXd& M, const Eigen::VectorXd& s,
                         double R, F&& f) {
    const long long g = M.rows();
    std::vector<long long> n(static_cast<size_t>(g), 0);
    // partial[i] = sum_{j>i} M(i,j) (n_j + s_j), maintained per recursion level
    std::vector<Eigen::VectorXd> partial(static_cast<size_t>(g) + 1,
                                         Eigen::VectorXd::Zero(g));
    auto rec = [&](auto&& self, long long i, double rem2) -> void {
        if (i < 0) {
            f(n);
            return;
        }
        const double mii = M(i, i);
        const double off = partial[static_cast<size_t>(i) + 1](i);
        const double rad = std::sqrt(std::max(rem2, 0.0));
        long long lo = static_cast<long long>(std::ceil((-rad - off) / mii - s(i)));
        long long hi = static_cast<long long>(std::floor((rad - off) / mii - s(i)));
        for (long long ni = lo; ni <= hi; ++ni) {
            double row = mii * (double(ni) + s(i)) + off;
            double rem2i = rem2 - row * row;
            if (rem2i < 0.0) continue;
            n[static_cast<size_t>(i)] = ni;
            partial[static_cast<size_t>(i)] = partial[static_cast<size_t>(i) + 1];
            for (long long r = 0; r < i; ++r)
                partial[static_cast<size_t>(i)](r) += M(r, i) * (double(ni) + s(i));
            self(self, i - 1, rem2i);
        }
    };
    rec(rec, g - 1, R * R);
}

} // namespace detail

/// Full theta evaluation: value, and optionally gradient (order >= 1) and
/// Hessian (order >= 2), with the certified truncation tail bound.
/// force_radius overrides the radius selection (still capped), for
/// convergence diagnostics.
inline ThetaResult theta_full(const Eigen::VectorXcd& z, const RiemannMatrix& rm,
                              const Characteristic& ch, double eps, int order,
                              double radius_cap = 28.0, double force_radius = 0.0) {
    const long long g = rm.g();
    if (z.size() != g || ch.a.size() != g || ch.b.size() != g)
        raise(ErrorCode::ShapeMismatch, "z or characteristic size differs from g");
    if (!(eps > 0.0)) raise(ErrorCode::ShapeMismatch, "eps must be positive");

    // --- lattice reduction: z_red = z + m + tau k with small Im(z_red) -----
    Eigen::VectorXd kreal = rm.solveY(z.imag());
    Eigen::VectorXd kvec(g), mvec(g);
    for (long long i = 0; i < g; ++i) kvec(i) = -std::round(kreal(i));
    Eigen::VectorXcd kc = kvec.cast<cplx>();
    Eigen::VectorXcd z_red = z + rm.tau * kc;
    for (long long i = 0; i < g; ++i) mvec(i) = -std::round(z_red(i).real());
    z_red += mvec.cast<cplx>();

    // theta[a,b](z_red) = F * theta[a,b](z),
    // log F = 2 pi i (a'm - b'k) - pi i k'tau k - 2 pi i k'z
    const cplx ipi(0.0, kPi);
    const cplx twopii(0.0, 2.0 * kPi);
    cplx ktauk = (kc.transpose() * rm.tau * kc)(0, 0);
    cplx kz = (kc.transpose() * z)(0, 0);
    cplx logF = twopii * cplx(ch.a.dot(mvec) - ch.b.dot(kvec)) - ipi * ktauk -
                twopii * kz;

    // --- peak and radius -----------------------------------------------------
    Eigen::VectorXd u = z_red.imag();
    Eigen::VectorXd c = -rm.solveY(u);
    double peak = kPi * c.dot(rm.Y * c); // max real exponent over v
    double vbase = c.norm() + ch.a.norm();

    double radius = force_radius;
    if (radius <= 0.0) {
        radius = 1.5;
        while (detail::theta_tail_bound(g, rm.lambda_min, radius, order, vbase) *
                   std::exp(peak) >
               eps) {
            radius += 0.5;
            if (radius > radius_cap)
                raise(ErrorCode::TruncationBudgetExceeded,
                      "theta truncation radius exceeds the cap " +
                          std::to_string(radius_cap));
        }
    }
    if (radius > radius_cap)
        raise(ErrorCode::TruncationBudgetExceeded,
              "theta truncation radius exceeds the cap " + std::to_string(radius_cap));

    // --- fixed-order summation over the ellipsoid ----------------------------
    // metric: pi (n + s)' Y (n + s) <= R^2 with shift s = a - c
    Eigen::MatrixXd M = std::sqrt(kPi) * rm.Ylower.transpose(); // upper
    Eigen::VectorXd shift = ch.a - c;

    cplx acc_val(0.0);
    Eigen::VectorXcd acc_grad = Eigen::VectorXcd::Zero(g);
    Eigen::MatrixXcd acc_hess = Eigen::MatrixXcd::Zero(g, g);
    long long terms = 0;
    Eigen::VectorXcd zb = z_red + ch.b.cast<cplx>();
    detail::ellipsoid_enumerate(
        M, shift, radius, [&](const std::vector<long long>& n) {
            Eigen::VectorXd v(g);
            for (long long i = 0; i < g; ++i)
                v(i) = double(n[static_cast<size_t>(i)]) + ch.a(i);
            Eigen::VectorXcd vc = v.cast<cplx>();
            cplx quad = (vc.transpose() * rm.tau * vc)(0, 0);
            cplx lin = (vc.transpose() * zb)(0, 0);
            cplx term = std::exp(ipi * quad + twopii * lin - cplx(peak));
            acc_val += term;
            ++terms;
            if (order >= 1) acc_grad += (twopii * term) * vc;
            if (order >= 2)
                acc_hess += (twopii * twopii * term) * (vc * vc.transpose());
        });

    // --- restore scale and the quasi-periodic prefactor ----------------------
    // theta(z) = e^{-logF} theta_red; grad picks up +2 pi i k per logF slope.
    ThetaResult out;
    out.radius = radius;
    out.terms = terms;
    cplx scale = std::exp(cplx(peak) - logF); // e^{peak} undoes the term scaling
    out.value = scale * acc_val;
    if (order >= 1) {
        Eigen::VectorXcd corr = twopii * kc;
        out.grad = scale * (acc_grad + corr * acc_val);
        if (order >= 2)
            out.hess = scale * (acc_hess + corr * acc_grad.transpose() +
                                acc_grad * corr.transpose() +
                                corr * corr.transpose() * acc_val);
        else
            out.hess = Eigen::MatrixXcd::Zero(g, g);
    } else {
        out.grad = Eigen::VectorXcd::Zero(g);
        out.hess = Eigen::MatrixXcd::Zero(g, g);
    }
    double kamp = 2.0 * kPi * kvec.norm();
    out.tail_bound =
        detail::theta_tail_bound(g, rm.lambda_min, radius, order, vbase) *
        std::exp(peak) * std::abs(std::exp(-logF)) *
        (1.0 + kamp + kamp * kamp);
    return out;
}

inline cplx theta(const Eigen::VectorXcd& z, const RiemannMatrix& rm,
                  double eps = 1e-12) {
    return theta_full(z, rm, Characteristic::zero(rm.g()), eps, 0).value;
}

inline cplx theta_char(const Characteristic& ch, const Eigen::VectorXcd& z,
                       const RiemannMatrix& rm, double eps = 1e-12) {
    return theta_full(z, rm, ch, eps, 0).value;
}

inline Eigen::VectorXcd theta_grad(const Eigen::VectorXcd& z,
                                   const RiemannMatrix& rm, double eps = 1e-12) {
    return theta_full(z, rm, Characteristic::zero(rm.g()), eps, 1).grad;
}

inline Eigen::VectorXcd theta_char_grad(const Characteristic& ch,
                                        const Eigen::VectorXcd& z,
                                        const RiemannMatrix& rm,
                                        double eps = 1e-12) {
    return theta_full(z, rm, ch, eps, 1).grad;
}

inline Eigen::MatrixXcd theta_hessian(const Eigen::VectorXcd& z,
                                      const RiemannMatrix& rm,
                                      double eps = 1e-12) {
    return theta_full(z, rm, Characteristic::zero(rm.g()), eps, 2).hess;
}

} // namespace wcurve
