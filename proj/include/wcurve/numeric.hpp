// Shared numeric helpers: complex aliases, constants, deterministic RNG,
// and small formatting utilities.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace wcurve {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline const cplx kI{0.0, 1.0};

/// Deterministic RNG wrapper; all sampling in the library goes through this
/// so a fixed seed reproduces every report byte-for-byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(eng_);
    }

    int uniform_int(int lo, int hi) { // inclusive bounds
        std::uniform_int_distribution<int> d(lo, hi);
        return d(eng_);
    }

    cplx complex_in_annulus(double rlo, double rhi) {
        double r = uniform(rlo, rhi);
        double a = uniform(0.0, 2.0 * kPi);
        return cplx(r * std::cos(a), r * std::sin(a));
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline double sq(double v) { return v * v; }

/// gcd for non-negative integers (std::gcd needs <numeric>; tiny local copy
/// avoids pulling it into every header).
inline long long igcd(long long a, long long b) {
    while (b != 0) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

/// Format a double with 17 significant digits (round-trip exact).
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt17(const cplx& z) {
    return fmt17(z.real()) + " " + fmt17(z.imag());
}

/// FNV-1a hash of a string; used to fingerprint curve configurations.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace wcurve
