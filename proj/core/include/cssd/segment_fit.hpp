#pragma once

#include <cstddef>

#include "cssd/types.hpp"

namespace cssd {

/// Computes the minimizing smoothing spline (not just its energy) on the
/// 0-based inclusive site range [l, r], returning its Hermite control
/// points. The factorization of the segment's least-squares system is
/// retained in banded form and back-substituted, so values and first
/// derivatives come out directly. O(r - l) time and memory.
SegmentSpline fit_segment(const DataSeries& series, std::size_t l, std::size_t r,
                          double p, SegmentSpline::Interval domain);

/// Evaluates the smoothing functional of `spline` against the data on
/// [l, r]: p * sum of normalized squared residuals plus (1-p) times the
/// integral of the squared second derivative, summed over dimensions.
/// The integral is the exact per-gap quadratic form, not a quadrature.
double spline_functional(const DataSeries& series, std::size_t l, std::size_t r,
                         const SegmentSpline& spline, double p);

}  // namespace cssd
