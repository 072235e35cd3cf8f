#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cssd/cssd.hpp"

namespace testsupport {

inline double u01(std::mt19937_64& rng) { return cssd::synthetic::uniform01(rng); }

/// Random well-conditioned series: spacing in [0.05, 1.05], observations
/// in [-1, 1], deltas in [0.3, 1.3].
inline cssd::DataSeries random_series(std::mt19937_64& rng, std::size_t n,
                                      std::size_t dims) {
    std::vector<double> xs(n), deltas(n), ys(n * dims);
    double x = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x += 0.05 + u01(rng);
        xs[i] = x;
        deltas[i] = 0.3 + u01(rng);
    }
    for (auto& v : ys) v = 2 * u01(rng) - 1;
    return cssd::DataSeries(std::move(xs), std::move(ys), dims, std::move(deltas));
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u01(rng));
}

inline double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-30);
    return std::abs(got - want) / scale;
}

/// Relative error with an absolute floor for values that are exactly zero
/// in theory (spline energies of interpolable data).
inline double rel_or_abs_err(double got, double want, double floor = 1e-18) {
    if (std::abs(want) < floor) return std::abs(got - want);
    return std::abs(got - want) / std::abs(want);
}

inline std::vector<std::size_t> gaps_of(const cssd::DiscontinuitySet& set) {
    return {set.gaps().begin(), set.gaps().end()};
}

}  // namespace testsupport
