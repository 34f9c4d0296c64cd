// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre recurrence and cached per order. Node order is fixed
// (ascending), so every integral in the library is bit-reproducible.
#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "wcurve/numeric.hpp"

namespace wcurve {

struct GaussRule {
    std::vector<double> nodes;   // ascending in (-1, 1)
    std::vector<double> weights; // matching weights, all positive
};

inline GaussRule gauss_legendre_compute(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess for the i-th root (descending), then
        // Newton on P_n evaluated by the three-term recurrence.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        rule.nodes[n - 1 - i] = x; // store ascending
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

/// Cached access; thread-safe, deterministic.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre_compute(n)).first;
    return it->second;
}

} // namespace wcurve
