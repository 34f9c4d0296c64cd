// Exact integer engine for numerical semigroups: membership, gaps, genus,
// Schubert index / Young diagram, symmetry, and the residue-class data
// (m_i, n, degree bounds) behind the normal-form degree staircase.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "wcurve/errors.hpp"
#include "wcurve/numeric.hpp"

namespace wcurve {

struct NumericalSemigroup {
    std::vector<long long> generators; // minimal generating set, sorted
    long long conductor = 0;           // least c with [c, inf) contained in H
    std::vector<char> member;          // membership table, index 0..table_bound
    long long genus = 0;
    std::vector<long long> gaps;       // sorted; |gaps| == genus

    [[nodiscard]] bool contains(long long v) const {
        if (v < 0) return false;
        if (v >= conductor) return true;
        return member[static_cast<size_t>(v)] != 0;
    }

    [[nodiscard]] long long table_bound() const {
        return static_cast<long long>(member.size()) - 1;
    }
};

struct SchubertData {
    std::vector<long long> alpha; // alpha[i] = gaps[i] - i - 1 (0-indexed)
    std::vector<long long> young; // row lengths, weakly decreasing
};

struct NormalFormProfile {
    long long m = 0;                    // least nonzero element
    std::vector<long long> m_seq;       // m_seq[i] = min{h in H\{0}: h == i mod m}
    long long n = 0;                    // least m_j with gcd(m, j) = 1
    std::vector<long long> degree_bounds; // floor(i*n/m), i = 1..m
};

/// Builds the semigroup generated by `gens`. Generators need not be minimal;
/// the minimal generating set is recomputed. Throws NotCofinite when
/// gcd(gens) != 1 (the complement would be infinite).
inline NumericalSemigroup semigroup_from_generators(std::vector<long long> gens) {
    if (gens.empty()) raise(ErrorCode::NotCofinite, "empty generator list");
    for (long long v : gens)
        if (v < 1) raise(ErrorCode::NotCofinite, "generators must be positive");
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

    long long d = 0;
    for (long long v : gens) d = igcd(d, v);
    if (d != 1)
        raise(ErrorCode::NotCofinite,
              "gcd of generators is " + std::to_string(d) + ", not 1");

    const long long m = gens.front();
    // Additive-closure table with a doubling bound; the conductor is found
    // from the first run of m consecutive members (then c + k*1 stays inside
    // by adding copies of m along the run).
    long long bound = std::max<long long>(2 * gens.front() * gens.back(), 64);
    std::vector<char> tbl;
    long long conductor = -1;
    for (int attempt = 0; attempt < 20 && conductor < 0; ++attempt) {
        tbl.assign(static_cast<size_t>(bound) + 1, 0);
        tbl[0] = 1;
        for (long long v = 1; v <= bound; ++v) {
            for (long long gsel : gens) {
                if (gsel > v) break;
                if (tbl[static_cast<size_t>(v - gsel)]) {
                    tbl[static_cast<size_t>(v)] = 1;
                    break;
                }
            }
        }
        long long run = 0;
        for (long long v = 0; v <= bound; ++v) {
            run = tbl[static_cast<size_t>(v)] ? run + 1 : 0;
            if (run == m) {
                conductor = v - m + 1;
                break;
            }
        }
        if (conductor < 0) bound *= 2;
    }
    if (conductor < 0)
        raise(ErrorCode::NotCofinite, "no conductor found within search bound");

    NumericalSemigroup H;
    H.conductor = conductor;
    // Keep the table out to at least 2*conductor + 2m so closure and
    // minimal-generator checks stay in range.
    long long keep = std::max(bound, 2 * conductor + 2 * m + 2);
    if (keep > bound) {
        tbl.resize(static_cast<size_t>(keep) + 1, 0);
        for (long long v = bound + 1; v <= keep; ++v) {
            tbl[static_cast<size_t>(v)] = (v >= conductor) ? 1 : tbl[static_cast<size_t>(v)];
        }
    }
    H.member = std::move(tbl);
    for (long long v = 1; v < conductor; ++v)
        if (!H.member[static_cast<size_t>(v)]) H.gaps.push_back(v);
    H.genus = static_cast<long long>(H.gaps.size());

    // Minimal generators: nonzero members not expressible as a sum of two
    // nonzero members. They all lie below conductor + m.
    for (long long v = 1; v <= conductor + m; ++v) {
        if (!H.contains(v)) continue;
        bool decomposable = false;
        for (long long u = 1; u + u <= v && !decomposable; ++u)
            if (H.contains(u) && H.contains(v - u)) decomposable = true;
        if (!decomposable) H.generators.push_back(v);
    }
    return H;
}

/// Schubert index and Young diagram of the gap sequence.
inline SchubertData schubert_data(const NumericalSemigroup& H) {
    SchubertData s;
    const long long g = H.genus;
    s.alpha.resize(static_cast<size_t>(g));
    s.young.resize(static_cast<size_t>(g));
    for (long long i = 0; i < g; ++i)
        s.alpha[static_cast<size_t>(i)] = H.gaps[static_cast<size_t>(i)] - i - 1;
    for (long long i = 0; i < g; ++i)
        s.young[static_cast<size_t>(i)] = s.alpha[static_cast<size_t>(g - 1 - i)] + 1;
    return s;
}

/// Conjugate (transpose) of a weakly decreasing partition.
inline std::vector<long long> partition_conjugate(const std::vector<long long>& lam) {
    std::vector<long long> conj;
    if (lam.empty()) return conj;
    conj.assign(static_cast<size_t>(lam.front()), 0);
    for (long long row : lam)
        for (long long j = 0; j < row; ++j) ++conj[static_cast<size_t>(j)];
    return conj;
}

/// True iff 2g-1 is a gap; cross-checked against self-transposition of the
/// Young diagram (the two criteria must agree).
inline bool is_symmetric(const NumericalSemigroup& H) {
    if (H.genus == 0) raise(ErrorCode::DegenerateGenusZero, "genus-0 semigroup");
    bool gap_check =
        std::binary_search(H.gaps.begin(), H.gaps.end(), 2 * H.genus - 1);
    SchubertData s = schubert_data(H);
    bool young_check = (partition_conjugate(s.young) == s.young);
    if (gap_check != young_check)
        throw std::logic_error("symmetry criteria disagree (internal invariant violated)");
    return gap_check;
}

/// Residue-class minima m_i, the coprime minimum n, and the degree staircase.
inline NormalFormProfile normal_form_profile(const NumericalSemigroup& H) {
    if (H.genus == 0) raise(ErrorCode::DegenerateGenusZero, "genus-0 semigroup");
    NormalFormProfile p;
    p.m = H.generators.front();
    p.m_seq.assign(static_cast<size_t>(p.m), -1);
    long long found = 0;
    for (long long v = 1; found < p.m; ++v) {
        if (!H.contains(v)) continue;
        long long r = v % p.m;
        if (p.m_seq[static_cast<size_t>(r)] < 0) {
            p.m_seq[static_cast<size_t>(r)] = v;
            ++found;
        }
    }
    p.n = -1;
    for (long long j = 1; j < p.m; ++j) {
        if (igcd(p.m, j) != 1) continue;
        long long mj = p.m_seq[static_cast<size_t>(j)];
        if (p.n < 0 || mj < p.n) p.n = mj;
    }
    if (p.m == 1) p.n = 1;
    for (long long i = 1; i <= p.m; ++i)
        p.degree_bounds.push_back((i * p.n) / p.m);
    return p;
}

} // namespace wcurve
