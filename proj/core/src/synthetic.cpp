#include "cssd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cssd {
namespace synthetic {

namespace {

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

double heavisine(double x) {
    return 4.0 * std::sin(4.0 * std::numbers::pi * x) - sign(x - 0.3) - sign(0.72 - x);
}

double bessel_ramp(double x) {
    double v = std::cyl_bessel_j(1.0, 20.0 * x);
    if (x >= 0.3 && x <= 0.4) v += x;
    if (x >= 0.6 && x <= 1.0) v -= x;
    return v;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1], keeps the log finite
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DataSeries sample_signal(double (*signal)(double), std::size_t n, double sigma,
                         std::uint64_t seed, SiteLayout layout, double x_max) {
    if (n == 0) throw Error(errc::empty_input, "sample count must be positive");
    if (sigma < 0 || !std::isfinite(sigma)) {
        throw Error(errc::invalid_argument, "sigma must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> xs(n);
    if (layout == SiteLayout::equidistant || n == 1) {
        const double step = n > 1 ? x_max / static_cast<double>(n - 1) : 0.0;
        for (std::size_t i = 0; i < n; ++i) xs[i] = step * static_cast<double>(i);
    } else {
        bool distinct = false;
        while (!distinct) {
            for (std::size_t i = 0; i < n; ++i) xs[i] = uniform01(rng) * x_max;
            std::sort(xs.begin(), xs.end());
            distinct = std::adjacent_find(xs.begin(), xs.end()) == xs.end();
        }
    }
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = signal(xs[i]);
        if (sigma > 0) ys[i] += sigma * gaussian(rng);
    }
    std::vector<double> deltas(n, sigma > 0 ? sigma : 1.0);
    return DataSeries(std::move(xs), std::move(ys), 1, std::move(deltas));
}

DataSeries sample_signal_periodic(double (*signal)(double), std::size_t n,
                                  double sigma, std::uint64_t seed,
                                  std::size_t periods) {
    if (n < 2 || periods == 0) {
        throw Error(errc::invalid_argument, "need at least two sites and one period");
    }
    if (sigma < 0 || !std::isfinite(sigma)) {
        throw Error(errc::invalid_argument, "sigma must be non-negative");
    }
    std::mt19937_64 rng(seed);
    const double x_max = static_cast<double>(periods);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x_max * static_cast<double>(i) / static_cast<double>(n - 1);
        ys[i] = signal(xs[i] - std::floor(xs[i]));
        if (sigma > 0) ys[i] += sigma * gaussian(rng);
    }
    std::vector<double> deltas(n, sigma > 0 ? sigma : 1.0);
    return DataSeries(std::move(xs), std::move(ys), 1, std::move(deltas));
}

}  // namespace synthetic
}  // namespace cssd
