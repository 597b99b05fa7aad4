#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace wdmqkd::detail {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt2 = 1.41421356237309504880;

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / sqrt2);
}

// P(a < Z < b) for standard normal, stable in the far tails.
inline double normal_interval_prob(double a, double b) {
    if (!(a < b)) return 0.0;
    if (a >= 0.0) return 0.5 * (std::erfc(a / sqrt2) - std::erfc(b / sqrt2));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / sqrt2) - std::erfc(-a / sqrt2));
    return 0.5 * (std::erf(b / sqrt2) + std::erf(-a / sqrt2));
}

inline double powint(double x, long long n) {
    double r = 1.0;
    double base = x;
    while (n > 0) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

// Neumaier-compensated sum; keeps mass bookkeeping honest at 1e-12 tolerances.
inline double stable_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace wdmqkd::detail
