#include <catch2/catch_amalgamated.hpp>

#include "wcurve/gauss.hpp"
#include "wcurve/poly.hpp"

using namespace wcurve;
using Catch::Approx;

TEST_CASE("evaluation, arithmetic, deflation") {
    Poly p{cplx(-6.0), cplx(11.0), cplx(-6.0), cplx(1.0)}; // (x-1)(x-2)(x-3)
    CHECK(std::abs(poly_eval(p, cplx(1.0))) < 1e-14);
    CHECK(std::abs(poly_eval(p, cplx(4.0)) - cplx(6.0)) < 1e-12);

    cplx rem;
    Poly q = poly_deflate(p, cplx(2.0), &rem);
    CHECK(std::abs(rem) < 1e-14);
    CHECK(std::abs(poly_eval(q, cplx(1.0))) < 1e-14);
    CHECK(std::abs(poly_eval(q, cplx(3.0))) < 1e-14);

    Poly prod = poly_mul(poly_linear(cplx(1.0)), poly_linear(cplx(2.0)));
    prod = poly_mul(prod, poly_linear(cplx(3.0)));
    for (size_t i = 0; i < p.size(); ++i) CHECK(std::abs(prod[i] - p[i]) < 1e-14);
}

TEST_CASE("root multiplicity with relative tolerance") {
    // (x-2)^3 (x+1)
    Poly p = poly_mul(poly_mul(poly_linear(cplx(2.0)), poly_linear(cplx(2.0))),
                      poly_mul(poly_linear(cplx(2.0)), poly_linear(cplx(-1.0))));
    CHECK(poly_root_multiplicity(p, cplx(2.0)) == 3);
    CHECK(poly_root_multiplicity(p, cplx(-1.0)) == 1);
    CHECK(poly_root_multiplicity(p, cplx(5.0)) == 0);
    // huge-scale coefficients: relative tolerance keeps the answer
    Poly ps = poly_scale(p, cplx(1e12));
    CHECK(poly_root_multiplicity(ps, cplx(2.0)) == 3);
}

TEST_CASE("companion-matrix roots with Newton polish") {
    Poly p{cplx(-1.0), cplx(0.0), cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)}; // x^5 = 1
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 5);
    for (const cplx& r : roots) {
        CHECK(std::abs(std::abs(r) - 1.0) < 1e-12);
        CHECK(std::abs(poly_eval(p, r)) < 1e-12);
    }
    // deterministic ordering
    auto roots2 = poly_roots(p);
    CHECK(roots == roots2);
}

TEST_CASE("interpolation round-trip") {
    Poly p{cplx(2.0, 1.0), cplx(-1.0), cplx(0.0, 3.0), cplx(4.0)};
    std::vector<cplx> xs, ys;
    for (int i = 0; i < 4; ++i) {
        xs.push_back(cplx(i, 0.3 * i));
        ys.push_back(poly_eval(p, xs.back()));
    }
    Poly q = poly_interpolate(xs, ys);
    REQUIRE(q.size() == p.size());
    for (size_t i = 0; i < p.size(); ++i) CHECK(std::abs(q[i] - p[i]) < 1e-10);
}

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
    const auto& rule = gauss_legendre(12);
    REQUIRE(rule.nodes.size() == 12);
    // exact for degree <= 23: try x^10 and x^22
    double s10 = 0, s22 = 0, s0 = 0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        s0 += rule.weights[i];
        s10 += rule.weights[i] * std::pow(rule.nodes[i], 10);
        s22 += rule.weights[i] * std::pow(rule.nodes[i], 22);
    }
    CHECK(s0 == Approx(2.0).epsilon(1e-14));
    CHECK(s10 == Approx(2.0 / 11.0).epsilon(1e-13));
    CHECK(s22 == Approx(2.0 / 23.0).epsilon(1e-13));
    // nodes ascending
    for (size_t i = 1; i < rule.nodes.size(); ++i)
        REQUIRE(rule.nodes[i] > rule.nodes[i - 1]);
}
