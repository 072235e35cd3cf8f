#pragma once

#include <cstdint>
#include <random>

#include "cssd/types.hpp"

namespace cssd {
namespace synthetic {

/// HeaviSine: 4 sin(4 pi x) - sign(x - 0.3) - sign(0.72 - x).
double heavisine(double x);

/// Bessel ramp: J1(20 x) + x on [0.3, 0.4], minus x on [0.6, 1].
/// Jumps at 0.3, 0.4 and 0.6 with heights 0.3, -0.4 and -0.6.
double bessel_ramp(double x);

/// Uniform double in [0, 1) from the top 53 bits of the generator;
/// bit-stable across standard libraries, unlike the std distributions.
double uniform01(std::mt19937_64& rng);

/// Standard normal via Box-Muller on uniform01 draws.
double gaussian(std::mt19937_64& rng);

enum class SiteLayout { equidistant, uniform_random };

/// Samples `signal` at n sites over [0, x_max] with additive Gaussian
/// noise of standard deviation sigma. Per-site delta is sigma when
/// positive, else 1 (noiseless data). Deterministic for a fixed seed.
DataSeries sample_signal(double (*signal)(double), std::size_t n, double sigma,
                         std::uint64_t seed, SiteLayout layout, double x_max = 1.0);

/// Tiles a unit-interval signal over [0, periods] and samples it at n
/// equidistant sites: y_i = signal(x_i mod 1) + noise. Grows the number
/// of discontinuities linearly with the sample count.
DataSeries sample_signal_periodic(double (*signal)(double), std::size_t n,
                                  double sigma, std::uint64_t seed,
                                  std::size_t periods);

}  // namespace synthetic
}  // namespace cssd
