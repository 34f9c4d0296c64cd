// Period matrices from certified cycle harvesting. Closed cycles are built
// as based pair-loops (one lap around one critical value, several around
// another, chosen so the composed monodromy fixes the starting sheet), their
// pairwise intersection numbers are counted from signed same-sheet crossings
// of the x-plane polylines, and an integer symplectic reduction turns the
// harvest into a canonical homology basis. Certification is layered: every
// cycle must close on its lift to 1e-8, the intersection form must reduce to
// g unimodular hyperbolic blocks, and the resulting tau must be symmetric
// with positive definite imaginary part.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcurve/integrate.hpp"
#include "wcurve/paths.hpp"
#include "wcurve/theta.hpp"

namespace wcurve {

/// A closed lifted polyline. `fibers[k]` holds the full fiber over xs[k],
/// each entry the continuation of the same entry over xs[0]; the cycle is
/// the lift following entry `lift`.
struct Cycle {
    std::vector<cplx> xs;
    std::vector<std::vector<cplx>> fibers;
    int lift = 0;
    double closure_residual = 0.0;
    // provenance: pair-loop parameters (critical indices, laps, geometry id)
    int around_first = -1, around_second = -1, laps_second = 0, geometry_id = 0;
};

struct PeriodOptions {
    IntegrationOptions quad;
    int polygon_sides = 24;
    double tau_symmetry_tol = 1e-7;
    long long eval_cap = 40'000'000;
};

struct PeriodData {
    Eigen::MatrixXcd omega1;   // omega': row i of (2 omega1)^T is the alpha_i periods
    Eigen::MatrixXcd omega2;   // omega'': same for beta_i
    Eigen::MatrixXcd tau;      // symmetrized normalized period matrix
    double tau_asymmetry = 0.0;
    double max_closure_residual = 0.0;
    double cond_omega1 = 0.0;
    int candidates = 0;
    int cycles_integrated = 0;
    long long genus = 0;
};

/// theta-ready admission wrapper; raises TauNotSymmetric on defects.
inline RiemannMatrix riemann_matrix(const PeriodData& pd) { return RiemannMatrix(pd.tau); }

/// Normalized coordinates of an unnormalized vector: (2 omega')^{-1} v.
inline Eigen::VectorXcd normalize_coords(const PeriodData& pd, const Eigen::VectorXcd& v) {
    return (2.0 * pd.omega1).partialPivLu().solve(v);
}

/// Gradient pullback: if F(u) = theta((2 omega')^{-1} u + c), then
/// grad_u F = (2 omega')^{-T} grad_z theta.
inline Eigen::VectorXcd pullback_gradient(const PeriodData& pd, const Eigen::VectorXcd& gz) {
    return (2.0 * pd.omega1).transpose().partialPivLu().solve(gz);
}

inline Eigen::MatrixXcd pullback_hessian(const PeriodData& pd, const Eigen::MatrixXcd& hz) {
    Eigen::MatrixXcd W = (2.0 * pd.omega1).inverse();
    return W.transpose() * hz * W;
}

struct LatticePoint {
    Eigen::VectorXi m, n;
    double residual = 0.0; // max |v - reconstruction| in source coordinates
};

/// Decompose v over the unnormalized period lattice 2 omega' Z^g + 2 omega'' Z^g.
inline LatticePoint lattice_decompose(const PeriodData& pd, const Eigen::VectorXcd& v) {
    const Eigen::Index g = pd.omega1.rows();
    Eigen::MatrixXd M(2 * g, 2 * g);
    M.block(0, 0, g, g) = 2.0 * pd.omega1.real();
    M.block(g, 0, g, g) = 2.0 * pd.omega1.imag();
    M.block(0, g, g, g) = 2.0 * pd.omega2.real();
    M.block(g, g, g, g) = 2.0 * pd.omega2.imag();
    Eigen::VectorXd rhs(2 * g);
    rhs.head(g) = v.real();
    rhs.tail(g) = v.imag();
    Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
    LatticePoint out;
    out.m.resize(g);
    out.n.resize(g);
    for (Eigen::Index i = 0; i < g; ++i) {
        out.m(i) = static_cast<int>(std::llround(sol(i)));
        out.n(i) = static_cast<int>(std::llround(sol(g + i)));
    }
    Eigen::VectorXcd recon = 2.0 * pd.omega1 * out.m.cast<double>().cast<cplx>() +
                             2.0 * pd.omega2 * out.n.cast<double>().cast<cplx>();
    out.residual = (v - recon).cwiseAbs().maxCoeff();
    return out;
}

/// Decompose v over the normalized lattice Z^g + tau Z^g.
inline LatticePoint lattice_decompose_normalized(const Eigen::MatrixXcd& tau,
                                                 const Eigen::VectorXcd& v) {
    const Eigen::Index g = tau.rows();
    Eigen::VectorXd n_real = tau.imag().partialPivLu().solve(v.imag());
    LatticePoint out;
    out.m.resize(g);
    out.n.resize(g);
    for (Eigen::Index i = 0; i < g; ++i) out.n(i) = static_cast<int>(std::llround(n_real(i)));
    Eigen::VectorXcd rem = v - tau * out.n.cast<double>().cast<cplx>();
    for (Eigen::Index i = 0; i < g; ++i) out.m(i) = static_cast<int>(std::llround(rem(i).real()));
    Eigen::VectorXcd recon =
        out.m.cast<double>().cast<cplx>() + tau * out.n.cast<double>().cast<cplx>();
    out.residual = (v - recon).cwiseAbs().maxCoeff();
    return out;
}

namespace detail {

// ---- cycle construction -----------------------------------------------------

/// Reverse a corridor with a small perpendicular offset so the return pass
/// never lies on top of the outgoing one.
inline std::vector<cplx> offset_reverse(const std::vector<cplx>& path, double delta) {
    cplx dir = path.back() - path.front();
    cplx nhat = std::abs(dir) > 0 ? dir / std::abs(dir) * cplx(0.0, 1.0) : cplx(0.0, 1.0);
    std::vector<cplx> out;
    out.reserve(path.size() + 1);
    for (size_t k = path.size(); k-- > 0;) out.push_back(path[k] + delta * nhat);
    return out;
}

inline void append_path(std::vector<cplx>& xs, const std::vector<cplx>& more) {
    for (const cplx& p : more) {
        if (!xs.empty() && std::abs(p - xs.back()) == 0.0) continue;
        xs.push_back(p);
    }
}

/// Based lobe visiting `center`: corridor out, `laps` counterclockwise
/// polygon laps, offset corridor back to the base. The corridor clearance is
/// kept at curve scale even when the loop radius is tiny (tightly separated
/// critical values); critical points near the corridor endpoints are exempt
/// by construction.
inline std::vector<cplx> lobe(const SurfaceGeometry& geo, cplx base, cplx center,
                              double radius, int sides, int laps, double delta) {
    cplx u = base - center;
    cplx entry = center + radius * (u / std::abs(u));
    double rho = std::max(0.6 * radius, 0.04 * geo.scale);
    std::vector<cplx> corridor = clearance_polyline(geo, base, entry, rho);
    std::vector<cplx> out = corridor;
    append_path(out, circle_polygon(center, radius, sides, laps, std::arg(u), true));
    append_path(out, offset_reverse(corridor, delta));
    out.push_back(base);
    return out;
}

/// Track the full fiber around a closed polyline; returns the end-of-loop
/// fiber (entry i = continuation of start entry i) and fills per-vertex
/// fibers.
template <class Spec>
std::vector<cplx> track_cycle(const Spec& spec, const std::vector<cplx>& xs,
                              std::vector<std::vector<cplx>>& fibers) {
    std::vector<cplx> values = fiber(spec, xs.front());
    fibers.clear();
    fibers.reserve(xs.size());
    fibers.push_back(values);
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        track_fiber_segment(spec, values, xs[k], xs[k + 1]);
        fibers.push_back(values);
    }
    return values;
}

/// Pair-loop polyline with per-candidate jitter so no two candidates share a
/// segment.
inline std::vector<cplx> pair_loop_xs(const SurfaceGeometry& geo, cplx anchor, cplx ci,
                                      double ri, cplx cj, double rj, int laps_j, int sides,
                                      int id) {
    double delta = (0.011 + 0.0023 * double(id % 7)) * std::min(ri, rj);
    std::vector<cplx> xs{anchor};
    append_path(xs, lobe(geo, anchor, ci, ri, sides, 1, delta));
    append_path(xs, lobe(geo, anchor, cj, rj, sides, laps_j, 1.45 * delta));
    if (std::abs(xs.back() - xs.front()) > 0.0) xs.push_back(xs.front());
    return xs;
}

// ---- intersection numbers ----------------------------------------------------

inline double cross2(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Signed same-sheet crossing count of two distinct lifted cycles. Lifts of
/// an identical x-polyline never meet on the surface (their y values differ
/// everywhere), and exactly parallel segments are skipped, so the count is
/// exact for the jittered geometry used here.
template <class Spec>
long long intersection_number(const Spec& spec, const Cycle& C, const Cycle& D) {
    long long total = 0;
    for (size_t a = 0; a + 1 < C.xs.size(); ++a) {
        cplx p = C.xs[a], dp = C.xs[a + 1] - C.xs[a];
        double lp = std::abs(dp);
        if (lp == 0.0) continue;
        double pxlo = std::min(p.real(), p.real() + dp.real());
        double pxhi = std::max(p.real(), p.real() + dp.real());
        double pylo = std::min(p.imag(), p.imag() + dp.imag());
        double pyhi = std::max(p.imag(), p.imag() + dp.imag());
        for (size_t b = 0; b + 1 < D.xs.size(); ++b) {
            cplx q = D.xs[b], dq = D.xs[b + 1] - D.xs[b];
            double lq = std::abs(dq);
            if (lq == 0.0) continue;
            if (std::max(q.real(), q.real() + dq.real()) < pxlo ||
                std::min(q.real(), q.real() + dq.real()) > pxhi ||
                std::max(q.imag(), q.imag() + dq.imag()) < pylo ||
                std::min(q.imag(), q.imag() + dq.imag()) > pyhi)
                continue;
            double det = cross2(dp, dq);
            if (std::abs(det) < 1e-10 * lp * lq) continue;
            cplx rhs = q - p;
            double s = cross2(rhs, dq) / det;
            double t = cross2(rhs, dp) / det;
            if (s <= 1e-9 || s >= 1.0 - 1e-9 || t <= 1e-9 || t >= 1.0 - 1e-9) continue;
            cplx xstar = p + s * dp;
            // continue both lifts from their segment-start fibers
            std::vector<cplx> vc = C.fibers[a];
            track_fiber_segment(spec, vc, C.xs[a], xstar);
            std::vector<cplx> vd = D.fibers[b];
            track_fiber_segment(spec, vd, D.xs[b], xstar);
            double gap = 1e300;
            for (size_t i = 0; i < vc.size(); ++i)
                for (size_t j = i + 1; j < vc.size(); ++j)
                    gap = std::min(gap, std::abs(vc[i] - vc[j]));
            cplx yc = vc[static_cast<size_t>(C.lift)];
            cplx yd = vd[static_cast<size_t>(D.lift)];
            if (std::abs(yc - yd) < 0.3 * gap) total += (det > 0.0) ? 1 : -1;
        }
    }
    return total;
}

// ---- integer symplectic reduction ---------------------------------------------

struct SymplecticReduction {
    std::vector<std::vector<long long>> U; // unimodular transform, rows are combos
    std::vector<long long> divisors;       // d_k per hyperbolic block
};

inline void sr_guard(long long v) {
    if (std::llabs(v) > (1ll << 40))
        raise(ErrorCode::RankDeficientHomology,
              "integer overflow risk during symplectic reduction");
}

/// Congruence-reduce a skew-symmetric integer matrix to hyperbolic blocks
/// diag([[0, d_k], [-d_k, 0]]) followed by zeros; returns the unimodular U
/// with U J U^T in that form.
inline SymplecticReduction symplectic_reduce(std::vector<std::vector<long long>> J) {
    const size_t N = J.size();
    SymplecticReduction out;
    out.U.assign(N, std::vector<long long>(N, 0));
    for (size_t i = 0; i < N; ++i) out.U[i][i] = 1;

    auto swap_rc = [&](size_t a, size_t b) {
        if (a == b) return;
        std::swap(J[a], J[b]);
        for (size_t r = 0; r < N; ++r) std::swap(J[r][a], J[r][b]);
        std::swap(out.U[a], out.U[b]);
    };
    // row/col r += f * row/col s (congruence), mirrored in U
    auto add_rc = [&](size_t r, size_t s, long long f) {
        if (f == 0) return;
        for (size_t k = 0; k < N; ++k) {
            J[r][k] += f * J[s][k];
            sr_guard(J[r][k]);
        }
        for (size_t k = 0; k < N; ++k) {
            J[k][r] += f * J[k][s];
            sr_guard(J[k][r]);
        }
        for (size_t k = 0; k < N; ++k) {
            out.U[r][k] += f * out.U[s][k];
            sr_guard(out.U[r][k]);
        }
    };

    size_t b = 0;
    while (b + 1 < N) {
        size_t pi = 0, pj = 0;
        long long best = 0;
        for (size_t i = b; i < N; ++i)
            for (size_t j = i + 1; j < N; ++j)
                if (J[i][j] != 0 && (best == 0 || std::llabs(J[i][j]) < std::llabs(best))) {
                    best = J[i][j];
                    pi = i;
                    pj = j;
                }
        if (best == 0) break;
        swap_rc(b, pi); // pj > pi >= b, so the pivot entry lands at (b, pj)
        swap_rc(b + 1, pj);
        if (J[b][b + 1] < 0) swap_rc(b, b + 1);

        bool clean = false;
        int guard = 0;
        while (!clean) {
            if (++guard > 4096)
                raise(ErrorCode::RankDeficientHomology, "symplectic reduction stalled");
            long long d = J[b][b + 1];
            for (size_t r = b + 2; r < N; ++r) {
                add_rc(r, b + 1, -(J[b][r] / d));
                add_rc(r, b, J[b + 1][r] / d); // J[b+1][b] = -d
            }
            clean = true;
            for (size_t r = b + 2; r < N && clean; ++r)
                clean = (J[b][r] == 0 && J[b + 1][r] == 0);
            if (!clean) {
                // a remainder smaller than |d| survived; promote it to the pivot
                for (size_t r = b + 2; r < N; ++r) {
                    if (J[b][r] != 0) {
                        swap_rc(b + 1, r);
                        break;
                    }
                    if (J[b + 1][r] != 0) {
                        swap_rc(b, b + 1);
                        swap_rc(b + 1, r);
                        break;
                    }
                }
                if (J[b][b + 1] < 0) swap_rc(b, b + 1);
            }
        }
        out.divisors.push_back(J[b][b + 1]);
        b += 2;
    }
    return out;
}

struct HarvestResult {
    std::vector<Cycle> cycles;
    cplx anchor;
    double max_closure = 0.0;
};

/// Build the candidate cycle list: pair loops around every pair of critical
/// values with nontrivial monodromy, lap counts 1..d, one candidate per
/// fixed sheet of the composed permutation.
template <class Spec>
HarvestResult harvest_cycles(const Spec& spec, const SurfaceGeometry& geo,
                             const PeriodOptions& opt) {
    HarvestResult H;
    const int d = sheet_count(spec);
    cplx centroid(0.0);
    for (const cplx& c : geo.critical) centroid += c;
    if (!geo.critical.empty()) centroid /= double(geo.critical.size());
    H.anchor = centroid + 2.3 * (geo.scale + 0.5) * std::polar(1.0, -1.131);

    std::vector<size_t> active;
    for (size_t i = 0; i < geo.critical.size(); ++i) {
        auto s = monodromy(spec, geo, geo.critical[i], geo.radius[i], opt.polygon_sides);
        bool trivial = true;
        for (size_t k = 0; k < s.size(); ++k) trivial = trivial && s[k] == static_cast<int>(k);
        if (!trivial) active.push_back(i);
    }
    if (active.size() < 2)
        raise(ErrorCode::RankDeficientHomology,
              "fewer than two branching critical values; no cycles to harvest");

    // Every lift gets its own jittered geometry: a pair loop revisits its
    // anchor mid-cycle on a permuted sheet, so two lifts of one x-polyline
    // can meet at a shared vertex where the segment-interior crossing
    // counter is blind. Distinct geometries turn every surface intersection
    // into a generic transversal crossing of distinct segments.
    int id = 0;
    for (size_t a = 0; a < active.size(); ++a) {
        for (size_t b2 = a + 1; b2 < active.size(); ++b2) {
            cplx ci = geo.critical[active[a]], cj = geo.critical[active[b2]];
            for (int laps = 1; laps <= d; ++laps) {
                for (int l = 0; l < d; ++l) {
                    ++id;
                    // Low-discrepancy jitter: every candidate loop gets its own
                    // circle radii and its own anchor so that no two polylines
                    // share a vertex or run exactly parallel.  Coincident
                    // vertices would hide surface crossings from the open
                    // parameter window of the segment intersection test.
                    const double golden = 0.61803398874989485;
                    double fi = std::fmod(golden * double(id), 1.0);
                    double fj = std::fmod(golden * double(id) + 0.37, 1.0);
                    double ri = geo.radius[active[a]] * (1.0 + 0.03 + 0.22 * fi);
                    double rj = geo.radius[active[b2]] * (1.0 + 0.03 + 0.22 * fj);
                    // Spread scales with the whole configuration, not with the
                    // smallest critical gap: corridors are configuration-sized,
                    // so anchors packed closer than quadrature windows would
                    // make corridor junctions nearly coincident again.
                    cplx anchor_c =
                        H.anchor + 0.015 * (geo.scale + 0.5) * std::sqrt(double(id)) *
                                       std::polar(1.0, 2.3999632297286533 * double(id));
                    auto xs = pair_loop_xs(geo, anchor_c, ci, ri, cj, rj, laps,
                                           opt.polygon_sides, id);
                    std::vector<std::vector<cplx>> fibers;
                    std::vector<cplx> end = track_cycle(spec, xs, fibers);
                    const auto& start = fibers.front();
                    double yscale = 0.0;
                    for (const cplx& y : start) yscale = std::max(yscale, std::abs(y));
                    double res = std::abs(end[static_cast<size_t>(l)] -
                                          start[static_cast<size_t>(l)]);
                    if (res > 1e-8 * (1.0 + yscale)) continue; // lift does not close
                    Cycle C;
                    C.xs = std::move(xs);
                    C.fibers = std::move(fibers);
                    C.lift = l;
                    C.closure_residual = res;
                    C.around_first = static_cast<int>(active[a]);
                    C.around_second = static_cast<int>(active[b2]);
                    C.laps_second = laps;
                    C.geometry_id = id;
                    H.max_closure = std::max(H.max_closure, res);
                    H.cycles.push_back(std::move(C));
                }
            }
        }
    }
    return H;
}

} // namespace detail

/// Compute the canonical period matrices of the basis one-forms.
template <class Spec, class Basis>
PeriodData period_matrices(const Spec& spec, const SurfaceGeometry& geo, const Basis& basis,
                           const PeriodOptions& opt = {}) {
    const Eigen::Index g = static_cast<Eigen::Index>(basis.genus);
    FormSet fs = forms_from_basis(basis);
    if (static_cast<Eigen::Index>(fs.numerators.size()) != g)
        raise(ErrorCode::ShapeMismatch, "basis length disagrees with genus");

    auto H = detail::harvest_cycles(spec, geo, opt);
    const size_t N = H.cycles.size();
    if (static_cast<Eigen::Index>(N) < 2 * g)
        raise(ErrorCode::RankDeficientHomology,
              "harvest produced fewer closed candidates than 2g");

    std::vector<std::vector<long long>> J(N, std::vector<long long>(N, 0));
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j) {
            long long v = detail::intersection_number(spec, H.cycles[i], H.cycles[j]);
            J[i][j] = v;
            J[j][i] = -v;
        }

    auto red = detail::symplectic_reduce(J);
    if (red.divisors.size() > static_cast<size_t>(g))
        raise(ErrorCode::RankDeficientHomology,
              "intersection form rank exceeds 2g; crossing counts are inconsistent");
    if (red.divisors.size() < static_cast<size_t>(g))
        raise(ErrorCode::RankDeficientHomology,
              "harvested cycles span a homology sublattice of rank below 2g");
    for (long long dk : red.divisors)
        if (dk != 1)
            raise(ErrorCode::RankDeficientHomology,
                  "harvested cycles span a finite-index sublattice (divisor " +
                      std::to_string(dk) + ")");

    // integrate every cycle used by the first 2g rows
    std::vector<bool> used(N, false);
    for (Eigen::Index r = 0; r < 2 * g; ++r)
        for (size_t c = 0; c < N; ++c)
            if (red.U[static_cast<size_t>(r)][c] != 0) used[c] = true;
    std::vector<Eigen::VectorXcd> V(N);
    IntegrationStats stats;
    stats.cap = opt.eval_cap;
    int integrated = 0;
    for (size_t c = 0; c < N; ++c) {
        if (!used[c]) continue;
        std::vector<cplx> values = H.cycles[c].fibers.front();
        V[c] = integrate_polyline(spec, fs, H.cycles[c].xs, values, H.cycles[c].lift,
                                  opt.quad, stats);
        ++integrated;
    }

    Eigen::MatrixXcd A0 = Eigen::MatrixXcd::Zero(g, g); // A0(i, j): alpha_i of form j
    Eigen::MatrixXcd B0 = Eigen::MatrixXcd::Zero(g, g);
    for (Eigen::Index i = 0; i < g; ++i)
        for (size_t c = 0; c < N; ++c) {
            long long fa = red.U[static_cast<size_t>(2 * i)][c];
            long long fb = red.U[static_cast<size_t>(2 * i + 1)][c];
            if (fa != 0) A0.row(i) += double(fa) * V[c].transpose();
            if (fb != 0) B0.row(i) += double(fb) * V[c].transpose();
        }

    PeriodData pd;
    pd.genus = g;
    pd.candidates = static_cast<int>(N);
    pd.max_closure_residual = H.max_closure;
    pd.cycles_integrated = integrated;

    // The crossing sign convention fixes the orientation only up to a global
    // flip; the flipped orientation corresponds to swapping the roles of the
    // alpha and beta rows. Exactly one choice yields Im tau > 0.
    bool done = false;
    for (int orient = 0; orient < 2 && !done; ++orient) {
        Eigen::MatrixXcd A = orient == 0 ? A0 : B0;
        Eigen::MatrixXcd B = orient == 0 ? B0 : A0;
        if (g == 1) {
            for (int it = 0; it < 64; ++it) { // standard fundamental-domain walk
                cplx tau1 = B(0, 0) / A(0, 0);
                if (std::abs(tau1.real()) > 0.5 + 1e-12) { // boundary ties stay put
                    B.row(0) -= double(std::llround(tau1.real())) * A.row(0);
                    continue;
                }
                if (std::abs(tau1) < 1.0 - 1e-12) {
                    Eigen::MatrixXcd A2 = B, B2 = -A;
                    A = A2;
                    B = B2;
                    continue;
                }
                break;
            }
        }
        Eigen::MatrixXcd T = A.transpose().partialPivLu().solve(B.transpose());
        Eigen::MatrixXcd Tsym = 0.5 * (T + T.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tsym.imag());
        if (es.eigenvalues()(0) <= 0.0) continue;
        double tmag = T.cwiseAbs().maxCoeff();
        double asym = (T - T.transpose()).cwiseAbs().maxCoeff();
        if (asym > opt.tau_symmetry_tol * std::max(1.0, tmag))
            raise(ErrorCode::TauNotSymmetric,
                  "normalized period matrix asymmetry " + std::to_string(asym) +
                      " exceeds tolerance; homology certification failed");
        pd.omega1 = 0.5 * A.transpose();
        pd.omega2 = 0.5 * B.transpose();
        pd.tau = Tsym;
        pd.tau_asymmetry = asym;
        done = true;
    }
    if (!done)
        raise(ErrorCode::TauNotSymmetric,
              "neither orientation of the canonical basis yields Im tau > 0");

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pd.omega1);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    pd.cond_omega1 = smin > 0.0 ? svd.singularValues()(0) / smin : 1e300;
    return pd;
}

} // namespace wcurve
