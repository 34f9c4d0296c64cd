#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "wcurve/semigroup.hpp"

using namespace wcurve;

namespace {

// Independent oracle: enumerate all non-negative integer combinations of the
// generators up to `bound` by breadth-first sums, with no additive-closure
// table shared with the implementation.
std::set<long long> naive_member_set(const std::vector<long long>& gens, long long bound) {
    std::set<long long> members{0};
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<long long> next = members;
        for (long long m : members)
            for (long long gsel : gens) {
                long long v = m + gsel;
                if (v <= bound && !next.count(v)) {
                    next.insert(v);
                    grew = true;
                }
            }
        members.swap(next);
    }
    return members;
}

std::vector<long long> naive_gaps(const std::vector<long long>& gens, long long bound) {
    auto members = naive_member_set(gens, bound);
    std::vector<long long> gaps;
    for (long long v = 1; v <= bound; ++v)
        if (!members.count(v)) gaps.push_back(v);
    return gaps;
}

} // namespace

TEST_CASE("golden gap sequences") {
    auto H1 = semigroup_from_generators({5, 7});
    CHECK(H1.gaps == std::vector<long long>{1, 2, 3, 4, 6, 8, 9, 11, 13, 16, 18, 23});
    CHECK(H1.genus == 12);
    CHECK(H1.generators == std::vector<long long>{5, 7});

    auto H2 = semigroup_from_generators({5, 7, 11});
    CHECK(H2.gaps == std::vector<long long>{1, 2, 3, 4, 6, 8, 9, 13});
    CHECK(H2.genus == 8);

    auto H3 = semigroup_from_generators({3, 7, 8});
    CHECK(H3.gaps == std::vector<long long>{1, 2, 4, 5});
    CHECK(H3.genus == 4);

    auto Hfull = semigroup_from_generators({1});
    CHECK(Hfull.gaps.empty());
    CHECK(Hfull.genus == 0);
    CHECK(Hfull.conductor == 0);
}

TEST_CASE("membership closure and conductor") {
    auto H = semigroup_from_generators({5, 7, 11});
    // every integer >= conductor is a member; conductor-1 is not
    CHECK(H.contains(H.conductor));
    CHECK_FALSE(H.contains(H.conductor - 1));
    // closed under addition, exhaustively up to 2*conductor
    for (long long a = 0; a <= H.conductor; ++a)
        for (long long b = a; a + b <= 2 * H.conductor; ++b)
            if (H.contains(a) && H.contains(b)) REQUIRE(H.contains(a + b));
}

TEST_CASE("gcd != 1 is rejected") {
    CHECK_THROWS_AS(semigroup_from_generators({4, 6}), Error);
    try {
        semigroup_from_generators({4, 6});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotCofinite);
    }
}

TEST_CASE("minimal generators are recovered and construction is idempotent") {
    auto H = semigroup_from_generators({5, 7, 12, 24, 22});
    CHECK(H.generators == std::vector<long long>{5, 7}); // 12 = 5+7 etc. pruned
    auto H2 = semigroup_from_generators(H.generators);
    CHECK(H2.gaps == H.gaps);
    CHECK(H2.generators == H.generators);
    // generator-order invariance
    auto H3 = semigroup_from_generators({7, 5});
    CHECK(H3.gaps == H.gaps);
}

TEST_CASE("brute-force oracle equivalence on random generator sets") {
    std::mt19937_64 rng(20260815);
    for (int trial = 0; trial < 40; ++trial) {
        int count = 2 + int(rng() % 3); // 2..4 generators
        std::vector<long long> gens;
        for (int i = 0; i < count; ++i) gens.push_back(2 + static_cast<long long>(rng() % 29));
        long long d = 0;
        for (long long v : gens) d = igcd(d, v);
        if (d != 1) {
            CHECK_THROWS_AS(semigroup_from_generators(gens), Error);
            continue;
        }
        auto H = semigroup_from_generators(gens);
        CHECK(H.gaps == naive_gaps(gens, 2000));
    }
}

TEST_CASE("Schubert index and Young diagrams") {
    auto y1 = schubert_data(semigroup_from_generators({5, 7})).young;
    CHECK(y1 == std::vector<long long>{12, 8, 7, 5, 4, 3, 3, 2, 1, 1, 1, 1});
    auto y2 = schubert_data(semigroup_from_generators({5, 7, 11})).young;
    CHECK(y2 == std::vector<long long>{6, 3, 3, 2, 1, 1, 1, 1});
    auto y3 = schubert_data(semigroup_from_generators({3, 7, 8})).young;
    CHECK(y3 == std::vector<long long>{2, 2, 1, 1});

    // weakly decreasing + top row identity on assorted semigroups
    for (auto gens : std::vector<std::vector<long long>>{
             {5, 7}, {5, 7, 11}, {3, 7, 8}, {2, 5}, {2, 7}, {3, 4}, {4, 5, 6}}) {
        auto H = semigroup_from_generators(gens);
        auto s = schubert_data(H);
        for (size_t i = 1; i < s.young.size(); ++i)
            REQUIRE(s.young[i - 1] >= s.young[i]);
        if (H.genus > 0)
            CHECK(s.young.front() == H.gaps.back() - H.genus + 1);
    }
}

TEST_CASE("symmetry") {
    CHECK(is_symmetric(semigroup_from_generators({5, 7})));        // 23 = 2g-1 is a gap
    CHECK_FALSE(is_symmetric(semigroup_from_generators({5, 7, 11}))); // 15 = 5+5+5
    CHECK(is_symmetric(semigroup_from_generators({2, 3})));
    CHECK_THROWS_AS(is_symmetric(semigroup_from_generators({1})), Error);
}

TEST_CASE("normal-form profile") {
    auto p = normal_form_profile(semigroup_from_generators({5, 7, 11}));
    CHECK(p.m == 5);
    CHECK(p.m_seq == std::vector<long long>{5, 11, 7, 18, 14});
    CHECK(p.n == 7);

    auto ph = normal_form_profile(semigroup_from_generators({2, 11}));
    CHECK(ph.m == 2);
    CHECK(ph.n == 11);

    auto p3 = normal_form_profile(semigroup_from_generators({3, 7, 8}));
    CHECK(p3.m == 3);
    CHECK(p3.m_seq == std::vector<long long>{3, 7, 8});
    CHECK(p3.n == 7);
    CHECK(p3.degree_bounds == std::vector<long long>{2, 4, 7});

    // m_seq residues and coprimality invariants
    for (auto gens : std::vector<std::vector<long long>>{{5, 7}, {5, 7, 11}, {3, 7, 8}, {4, 6, 9}}) {
        auto H = semigroup_from_generators(gens);
        auto prof = normal_form_profile(H);
        CHECK(prof.m_seq[0] == prof.m);
        for (long long i = 0; i < prof.m; ++i)
            CHECK(prof.m_seq[size_t(i)] % prof.m == i);
        CHECK(igcd(prof.m, prof.n) == 1);
        CHECK(H.contains(prof.n));
    }
}
