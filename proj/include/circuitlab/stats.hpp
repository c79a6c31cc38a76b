#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace circuitlab {

// Hoeffding half-width: m samples estimate a [0,1] mean up to gamma except
// with probability 2/e^{2 gamma^2 m}; inverting at failure probability delta
// gives gamma = sqrt(ln(2/delta) / 2m).
inline double hoeffding_half_width(std::uint64_t samples, double delta = 0.05) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

// Wilson score interval for a binomial proportion.
struct interval {
    double lo;
    double hi;
    double half_width() const { return (hi - lo) / 2.0; }
};

inline interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                double z = 1.959964) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double rad =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - rad), std::min(1.0, center + rad)};
}

// Counter for Bernoulli estimates.
struct tally {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    void add(bool hit) {
        hits += hit ? 1 : 0;
        ++trials;
    }
    double mean() const {
        return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
    }
    interval ci95() const { return wilson_interval(hits, trials); }
};

}  // namespace circuitlab
