// Surface navigation: certified fiber continuation, clearance polylines,
// circle polygons, and monodromy permutations, cross-checked against a
// brute-force small-step continuation oracle.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "test_support.hpp"
#include "wcurve/paths.hpp"
#include "wcurve/plane.hpp"

using namespace wcurve;

namespace {

// y^2 = x^3 - x
CyclicCurveSpec lemniscatic_like() {
    return CyclicCurveSpec(2, {cplx(0.0), cplx(1.0), cplx(-1.0)}, {1, 1, 1});
}

// y^5 = (x+2)^2 (x+1)^2 x (x-1) (x-2): genus 8
CyclicCurveSpec genus8_cyclic() {
    return CyclicCurveSpec(
        5, {cplx(-2.0), cplx(-1.0), cplx(0.0), cplx(1.0), cplx(2.0)}, {2, 2, 1, 1, 1});
}

Poly k2_poly() { return poly_mul(poly_linear(cplx(-2.0)), poly_linear(cplx(-1.0))); }

Poly k3_poly() {
    return poly_mul(poly_mul(poly_linear(cplx(0.0)), poly_linear(cplx(1.0))),
                    poly_linear(cplx(2.0)));
}

PlaneWeierstrassSpec plane_trigonal_g4() {
    Poly kt2{cplx(1.0), cplx(0.0), cplx(1.0)};
    std::vector<Poly> A(3);
    A[0] = poly_scale(k2_poly(), cplx(0.5));
    A[1] = poly_scale(poly_mul(kt2, k2_poly()), cplx(1.0 / 3.0));
    A[2] = poly_mul(poly_mul(k2_poly(), k2_poly()), k3_poly());
    return PlaneWeierstrassSpec(3, 7, A);
}

/// Brute-force monodromy oracle: walk the circle in many small steps and
/// match each value to the nearest new root, with no certification beyond
/// uniqueness of the nearest match.
template <class Spec>
std::vector<int> monodromy_oracle(const Spec& spec, cplx center, double radius,
                                  int steps = 512) {
    cplx base = center + cplx(radius, 0.0);
    auto start = fiber(spec, base);
    auto values = start;
    for (int k = 1; k <= steps; ++k) {
        double ang = 2.0 * kPi * double(k % steps) / steps;
        cplx x = center + radius * cplx(std::cos(ang), std::sin(ang));
        auto roots = fiber(spec, x);
        for (auto& v : values) {
            size_t best = 0;
            for (size_t j = 1; j < roots.size(); ++j)
                if (std::abs(roots[j] - v) < std::abs(roots[best] - v)) best = j;
            v = roots[best];
        }
    }
    std::vector<int> perm(values.size(), -1);
    for (size_t i = 0; i < values.size(); ++i) {
        size_t best = 0;
        for (size_t j = 1; j < start.size(); ++j)
            if (std::abs(start[j] - values[i]) < std::abs(start[best] - values[i])) best = j;
        REQUIRE(std::abs(start[best] - values[i]) < 1e-6 * (1.0 + std::abs(values[i])));
        perm[i] = static_cast<int>(best);
    }
    return perm;
}

/// Smallest distance from point c to the segment [a, b].
double segment_distance(cplx a, cplx b, cplx c) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(c - a);
    double t = ((c - a) * std::conj(d)).real() / len2;
    t = std::min(1.0, std::max(0.0, t));
    return std::abs(c - (a + t * d));
}

bool is_identity(const std::vector<int>& perm) {
    for (size_t i = 0; i < perm.size(); ++i)
        if (perm[i] != static_cast<int>(i)) return false;
    return true;
}

/// Recover the shift amount of a cyclic permutation i -> (i + s) mod d, or
/// -1 if perm is not of that form.
int cyclic_shift_amount(const std::vector<int>& perm) {
    const int d = static_cast<int>(perm.size());
    int s = perm[0];
    for (int i = 0; i < d; ++i)
        if (perm[static_cast<size_t>(i)] != (i + s) % d) return -1;
    return s;
}

} // namespace

TEST_CASE("expression evaluation with negative y powers") {
    FunctionExpr f = FunctionExpr::monomial(cplx(1.0), 2, -1);
    CHECK(std::abs(eval_xy(f, cplx(2.0), cplx(4.0)) - cplx(1.0)) < 1e-14);
    CHECK_THROWS_MATCHES(eval_xy(f, cplx(1.0), cplx(0.0)), Error,
                         ErrorCodeMatcher(ErrorCode::PoleAtPoint));
}

TEST_CASE("fiber continuation round trip returns the start values") {
    auto spec = genus8_cyclic();
    std::vector<cplx> xs{cplx(3.0, 1.0), cplx(0.5, 2.5), cplx(-3.0, 0.8),
                         cplx(-0.4, -2.2), cplx(3.0, 1.0)};
    auto start = fiber(spec, xs.front());
    auto values = start;
    track_fiber_path(spec, values, xs);
    // the loop encloses no branch point region fully; whatever permutation it
    // induces, reversing the path must undo it exactly
    std::vector<cplx> rev(xs.rbegin(), xs.rend());
    track_fiber_path(spec, values, rev);
    for (size_t i = 0; i < start.size(); ++i)
        CHECK(std::abs(values[i] - start[i]) < 1e-9 * (1.0 + std::abs(start[i])));
}

TEST_CASE("tracking into a branch point is rejected") {
    auto spec = lemniscatic_like();
    auto values = fiber(spec, cplx(2.0));
    CHECK_THROWS_MATCHES(track_fiber_segment(spec, values, cplx(2.0), cplx(1.0)), Error,
                         ErrorCodeMatcher(ErrorCode::BranchClearanceViolated));
}

TEST_CASE("clearance polyline avoids interior critical points") {
    auto geo = surface_geometry(genus8_cyclic());
    const double rho = 0.3;
    cplx from(-4.0, -2.0), to(4.0, 1.5);
    auto xs = clearance_polyline(geo, from, to, rho);
    REQUIRE(xs.size() >= 2);
    CHECK(xs.front() == from);
    CHECK(xs.back() == to);
    for (size_t k = 0; k + 1 < xs.size(); ++k)
        for (const cplx& c : geo.critical)
            CHECK(segment_distance(xs[k], xs[k + 1], c) > 0.99 * rho);
}

TEST_CASE("clearance polyline exempts critical points near the endpoints") {
    auto geo = surface_geometry(lemniscatic_like());
    cplx from(3.0, 2.0), to = cplx(1.0) + cplx(0.05, 0.0); // deliberately close to b = 1
    auto xs = clearance_polyline(geo, from, to, 0.4);
    CHECK(xs.front() == from);
    CHECK(xs.back() == to);
    // the other two branch points must still be avoided
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        CHECK(segment_distance(xs[k], xs[k + 1], cplx(0.0)) > 0.99 * 0.4);
        CHECK(segment_distance(xs[k], xs[k + 1], cplx(-1.0)) > 0.99 * 0.4);
    }
}

TEST_CASE("circle polygon closes exactly") {
    auto xs = circle_polygon(cplx(1.0, -0.5), 0.75, 16, 3, 0.4, true);
    REQUIRE(xs.size() == 16u * 3u + 1u);
    CHECK(xs.front() == xs.back());
    for (const cplx& p : xs) CHECK(std::abs(std::abs(p - cplx(1.0, -0.5)) - 0.75) < 1e-12);
    for (size_t k = 0; k + 1 < xs.size(); ++k) CHECK(std::abs(xs[k + 1] - xs[k]) > 1e-3);
}

TEST_CASE("monodromy around a simple branch point is a transposition") {
    auto spec = lemniscatic_like();
    auto geo = surface_geometry(spec);
    for (size_t i = 0; i < geo.critical.size(); ++i) {
        auto perm = monodromy_around(spec, geo, i);
        REQUIRE(perm.size() == 2);
        CHECK(perm[0] == 1);
        CHECK(perm[1] == 0);
    }
}

TEST_CASE("contractible loop has trivial monodromy") {
    auto spec = genus8_cyclic();
    auto geo = surface_geometry(spec);
    CHECK(is_identity(monodromy(spec, geo, cplx(4.0, 4.0), 0.5)));
    CHECK(is_identity(monodromy(spec, geo, cplx(0.5, -3.0), 0.8)));
}

TEST_CASE("cyclic branch point monodromy shifts sheets by the multiplicity") {
    auto spec = genus8_cyclic();
    auto geo = surface_geometry(spec);
    // direction of the shift convention, read off from a multiplicity-1 point
    int dir = 0;
    for (size_t i = 0; i < geo.critical.size(); ++i) {
        auto perm = monodromy_around(spec, geo, i);
        auto oracle = monodromy_oracle(spec, geo.critical[i], geo.radius[i]);
        CHECK(perm == oracle);
        int s = cyclic_shift_amount(perm);
        REQUIRE(s >= 0);
        // the branch multiplicities are ordered as the sorted branch points
        long long mult = 0;
        for (size_t j = 0; j < spec.branch_points().size(); ++j)
            if (std::abs(spec.branch_points()[j] - geo.critical[i]) < 1e-12)
                mult = spec.multiplicities()[j];
        REQUIRE(mult > 0);
        if (mult == 1) {
            REQUIRE((s == 1 || s == 4));
            if (dir == 0) dir = (s == 1) ? 1 : -1;
        }
        CHECK(s == ((dir >= 0 ? 1 : -1) * mult % 5 + 5) % 5);
    }
    REQUIRE(dir != 0);
    // a loop enclosing every branch point composes all the shifts
    auto big = monodromy(spec, geo, cplx(0.0), 10.0, 64);
    int total = cyclic_shift_amount(big);
    CHECK(total == ((dir * 7) % 5 + 5) % 5);
}

TEST_CASE("plane critical values are fully resolved") {
    auto spec = plane_trigonal_g4();
    auto geo = surface_geometry(spec);
    // two nodes, one satellite tangent next to each node, and three
    // conjugate pairs of vertical tangents: ten distinct critical values
    CHECK(geo.critical.size() == 10);
    for (double nodex : {-2.0, -1.0}) {
        int exact = 0, nearby = 0;
        for (const cplx& c : geo.critical) {
            if (std::abs(c - cplx(nodex)) < 1e-10) ++exact;
            else if (std::abs(c - cplx(nodex)) < 5e-2) ++nearby;
        }
        CHECK(exact == 1);   // the node itself, machine exact
        CHECK(nearby == 1);  // its satellite vertical tangent
    }
}

TEST_CASE("plane node monodromy swaps the vertical pair") {
    auto spec = plane_trigonal_g4();
    auto geo = surface_geometry(spec);
    for (double nodex : {-2.0, -1.0}) {
        size_t idx = geo.critical.size();
        for (size_t i = 0; i < geo.critical.size(); ++i)
            if (std::abs(geo.critical[i] - cplx(nodex)) < 1e-8) idx = i;
        REQUIRE(idx < geo.critical.size());
        auto perm = monodromy_around(spec, geo, idx);
        auto oracle = monodromy_oracle(spec, geo.critical[idx], geo.radius[idx]);
        CHECK(perm == oracle);
        REQUIRE(perm.size() == 3);
        CHECK(!is_identity(perm));
        int fixed = 0;
        for (size_t i = 0; i < perm.size(); ++i) {
            if (perm[i] == static_cast<int>(i)) ++fixed;
            CHECK(perm[static_cast<size_t>(perm[i])] == static_cast<int>(i));
        }
        CHECK(fixed == 1);
    }
}

TEST_CASE("monodromy loop through a critical point is rejected") {
    auto spec = genus8_cyclic();
    auto geo = surface_geometry(spec);
    // radius 1 around x = -2 passes straight through the branch point at -1
    CHECK_THROWS_MATCHES(monodromy(spec, geo, cplx(-2.0), 1.0), Error,
                         ErrorCodeMatcher(ErrorCode::BranchClearanceViolated));
}
