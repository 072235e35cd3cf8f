#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {

/// Random partition of {0, ..., n-1} into k disjoint folds whose sizes
/// differ by at most one. Deterministic for a fixed seed.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

/// K-fold cross validation score: for each fold, solve on the complement
/// and accumulate the normalized squared prediction error at the held-out
/// sites, divided by the total number of sites. A held-out site that
/// coincides exactly with a discontinuity location of the fold model is
/// predicted by the mean of the left and right limits; sites outside the
/// training extent use the linear extension of the boundary segment.
/// Folds are evaluated independently (possibly in parallel, capped by the
/// CSSD_THREADS environment variable) and reduced in fold order.
double cv_score(const DataSeries& series,
                const std::vector<std::vector<std::size_t>>& folds,
                const Hyperparams& params);

struct SelectionResult {
    Hyperparams params;
    double score;
    std::size_t evaluations;
};

/// Improves a starting parameter pair under an evaluation budget: the
/// start is scored first, then a coarse deterministic grid (including the
/// infinite-gamma candidate), then a Nelder-Mead refinement in the
/// transformed coordinates. The returned score is never worse than the
/// starting score.
SelectionResult select_params(const DataSeries& series, std::size_t k,
                              std::uint64_t seed, const Hyperparams& start,
                              std::size_t budget);

/// Bijection mapping the jump-penalty domain (0, inf) to the unit
/// interval, t = (2/pi) atan(gamma), and its inverse. Computed through
/// the reciprocal branch above gamma = 1 to limit cancellation near
/// t = 1.
double gamma_to_unit(double gamma);
double unit_to_gamma(double t);

/// Smoothing weight mapped to a unit coordinate through a bounded logit;
/// useful p values cluster near 1, which the transform spreads out.
double p_to_unit(double p);
double unit_to_p(double u);

}  // namespace cssd
