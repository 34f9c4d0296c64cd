// Frobenius-Stickelberger determinants and mu-functions: Vandermonde and
// Mumford oracles, expansion identity, symmetry, degeneracy, pole growth.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"
#include "wcurve/fs_mu.hpp"

using namespace wcurve;

namespace {

CyclicCurveSpec hyper_g2() {
    // y^2 = x(x-1)(x+1)(x-2)(x+2)
    return CyclicCurveSpec(2, {cplx(0.0), cplx(1.0), cplx(-1.0), cplx(2.0), cplx(-2.0)},
                           {1, 1, 1, 1, 1});
}

CyclicCurveSpec trigonal_g3() {
    // y^3 = (x^2-1)(x^2-4)
    return CyclicCurveSpec(3, {cplx(1.0), cplx(-1.0), cplx(2.0), cplx(-2.0)},
                           {1, 1, 1, 1});
}

CyclicCurveSpec cyclic_trigonal_g4() {
    return CyclicCurveSpec(3, {cplx(-2.0), cplx(-1.0), cplx(0.0), cplx(1.0), cplx(2.0)},
                           {2, 2, 1, 1, 1});
}

CyclicCurveSpec genus8_cyclic() {
    return CyclicCurveSpec(5, {cplx(-2.0), cplx(-1.0), cplx(0.0), cplx(1.0), cplx(2.0)},
                           {2, 2, 1, 1, 1});
}

PlaneWeierstrassSpec plane_trigonal_g4() {
    Poly k2 = poly_mul(poly_linear(cplx(-2.0)), poly_linear(cplx(-1.0)));
    Poly k3 = poly_mul(poly_mul(poly_linear(cplx(0.0)), poly_linear(cplx(1.0))),
                       poly_linear(cplx(2.0)));
    Poly kt2{cplx(1.0), cplx(0.0), cplx(1.0)};
    std::vector<Poly> A(3);
    A[0] = poly_scale(k2, cplx(0.5));
    A[1] = poly_scale(poly_mul(kt2, k2), cplx(1.0 / 3.0));
    A[2] = poly_mul(poly_mul(k2, k2), k3);
    return PlaneWeierstrassSpec(3, 7, A);
}

/// Deterministic generic points away from branch loci; the angle spread keeps
/// the x-values off the real axis where the branch points sit.
template <class Spec>
std::vector<PointOnCurve> generic_points(const Spec& spec, size_t n,
                                         unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> radius(0.8, 2.4), angle(0.2, 3.0);
    std::uniform_int_distribution<int> sheet(0, 1);
    std::vector<PointOnCurve> out;
    while (out.size() < n) {
        cplx x = std::polar(radius(rng), angle(rng));
        try {
            out.push_back(point_on_curve(spec, x, sheet(rng)));
        } catch (const Error&) {
            continue; // too close to a branch locus; draw again
        }
    }
    return out;
}

} // namespace

TEST_CASE("determinant basics") {
    auto spec = hyper_g2();
    auto b = differential_basis(spec);
    auto basis = extended_numerators(spec, b, 4); // 1, x, x^2, x^3

    auto P1 = point_on_curve(spec, cplx(0.5, 0.7), 0);
    auto P2 = point_on_curve(spec, cplx(-1.3, 0.4), 1);

    CHECK(fs_det(spec, basis, {P1}) == cplx(1.0)); // phi_0 = 1
    CHECK(fs_det(spec, basis, {P1, P1}) == cplx(0.0));

    cplx d2 = fs_det(spec, basis, {P1, P2});
    cplx expected = P2.x - P1.x;
    CHECK(std::abs(d2 - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("hyperelliptic mu is the Mumford polynomial") {
    auto spec = hyper_g2();
    auto b = differential_basis(spec);
    auto basis = extended_numerators(spec, b, 4);

    auto pts = generic_points(spec, 2, 101);
    auto probes = generic_points(spec, 5, 202);
    for (const auto& P : probes) {
        cplx lhs = mu(spec, basis, 2, P, pts);
        cplx rhs = (P.x - pts[0].x) * (P.x - pts[1].x);
        CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
    }

    auto ex = mu_coefficients(spec, basis, 2, pts);
    REQUIRE(ex.coefficients.size() == 3);
    CHECK(ex.coefficients[2] == cplx(1.0));
    cplx e1 = pts[0].x + pts[1].x, e0 = pts[0].x * pts[1].x;
    CHECK(std::abs(ex.coefficients[1] - e1) < 1e-9 * (1.0 + std::abs(e1)));
    CHECK(std::abs(ex.coefficients[0] - e0) < 1e-9 * (1.0 + std::abs(e0)));
    CHECK(ex.condition >= 1.0);
}

TEST_CASE("expansion identity reconstructs the determinant ratio") {
    // cyclic trigonal, level 2
    {
        auto spec = cyclic_trigonal_g4();
        auto b = differential_basis(spec);
        auto pts = generic_points(spec, 2, 7);
        auto ex = mu_coefficients(spec, b.phi, 2, pts);
        for (const auto& P : generic_points(spec, 10, 8)) {
            cplx direct = mu(spec, b.phi, 2, P, pts);
            cplx expanded = mu_from_expansion(spec, b.phi, ex, P);
            CHECK(std::abs(direct - expanded) < 1e-9 * (1.0 + std::abs(direct)));
        }
    }
    // plane trigonal with nodes, level 3
    {
        auto spec = plane_trigonal_g4();
        auto geo = plane_geometry(spec);
        auto b = differential_basis(spec, geo);
        auto pts = generic_points(spec, 3, 9);
        auto ex = mu_coefficients(spec, b.phi, 3, pts);
        for (const auto& P : generic_points(spec, 10, 10)) {
            cplx direct = mu(spec, b.phi, 3, P, pts);
            cplx expanded = mu_from_expansion(spec, b.phi, ex, P);
            CHECK(std::abs(direct - expanded) < 1e-9 * (1.0 + std::abs(direct)));
        }
    }
    // pentagonal genus 8, level 7: the full 8x8 / 7x7 ratio
    {
        auto spec = genus8_cyclic();
        auto b = differential_basis(spec);
        auto pts = generic_points(spec, 7, 11);
        auto ex = mu_coefficients(spec, b.phi, 7, pts);
        for (const auto& P : generic_points(spec, 10, 12)) {
            cplx direct = mu(spec, b.phi, 7, P, pts);
            cplx expanded = mu_from_expansion(spec, b.phi, ex, P);
            CHECK(std::abs(direct - expanded) < 1e-9 * (1.0 + std::abs(direct)));
        }
    }
}

TEST_CASE("mu is invariant under relabeling the divisor points") {
    auto spec = cyclic_trigonal_g4();
    auto b = differential_basis(spec);
    auto pts = generic_points(spec, 3, 13);
    auto P = generic_points(spec, 1, 14)[0];

    cplx ref = mu(spec, b.phi, 3, P, pts);
    auto ex_ref = mu_coefficients(spec, b.phi, 3, pts);
    std::vector<size_t> perm{2, 0, 1};
    std::vector<PointOnCurve> shuffled;
    for (size_t i : perm) shuffled.push_back(pts[i]);

    cplx alt = mu(spec, b.phi, 3, P, shuffled);
    CHECK(std::abs(alt - ref) < 1e-10 * (1.0 + std::abs(ref)));
    auto ex_alt = mu_coefficients(spec, b.phi, 3, shuffled);
    for (size_t k = 0; k < ex_ref.coefficients.size(); ++k)
        CHECK(std::abs(ex_alt.coefficients[k] - ex_ref.coefficients[k]) <
              1e-10 * (1.0 + std::abs(ex_ref.coefficients[k])));
}

TEST_CASE("level g-1 mu vanishes at its own divisor points") {
    auto spec = cyclic_trigonal_g4();
    auto b = differential_basis(spec);
    auto pts = generic_points(spec, 3, 15); // g - 1 = 3
    for (const auto& Pi : pts) CHECK(mu(spec, b.phi, 3, Pi, pts) == cplx(0.0));
    auto Q = generic_points(spec, 1, 16)[0];
    CHECK(std::abs(mu(spec, b.phi, 3, Q, pts)) > 1e-6);
}

TEST_CASE("mu coefficients grow with the basis weight step at infinity") {
    // last point to infinity: mu_{n,k} ~ |x|^((wt phi_n - wt phi_{n-1}) / r)
    auto spec = trigonal_g3();
    auto b = differential_basis(spec);
    auto basis = extended_numerators(spec, b, 4); // 1, x, y, x^2: weights 0,3,4,6
    auto fixed = generic_points(spec, 2, 17);

    double mag[2];
    const double radii[2] = {1e6, 1e9};
    for (int t = 0; t < 2; ++t) {
        auto pts = fixed;
        pts.push_back(point_on_curve(spec, cplx(radii[t], 0.37 * radii[t]), 0));
        auto ex = mu_coefficients(spec, basis, 3, pts);
        mag[t] = std::abs(ex.coefficients[0]);
    }
    double slope = std::log(mag[1] / mag[0]) / std::log(radii[1] / radii[0]);
    double expected = double(basis[3].wt - basis[2].wt) / double(spec.r());
    CHECK(std::abs(slope - expected) < 0.02);
}

TEST_CASE("special divisors are rejected") {
    auto spec = hyper_g2();
    auto b = differential_basis(spec);
    auto basis = extended_numerators(spec, b, 4);

    // same x on both sheets: psi_2 = x_2 - x_1 = 0
    auto P1 = point_on_curve(spec, cplx(0.9, 0.6), 0);
    auto P2 = point_on_curve(spec, cplx(0.9, 0.6), 1);
    auto Q = point_on_curve(spec, cplx(-0.8, 1.1), 0);
    CHECK_THROWS_MATCHES(mu(spec, basis, 2, Q, {P1, P2}), Error,
                         ErrorCodeMatcher(ErrorCode::DegenerateDivisor));
    CHECK_THROWS_MATCHES(mu_coefficients(spec, basis, 2, {P1, P2}), Error,
                         ErrorCodeMatcher(ErrorCode::DegenerateDivisor));

    // shape guards
    CHECK_THROWS_MATCHES(mu(spec, basis, 3, Q, {P1}), Error,
                         ErrorCodeMatcher(ErrorCode::ShapeMismatch));
}
