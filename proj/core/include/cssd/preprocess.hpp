#pragma once

#include <optional>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {

/// One raw input record prior to validation. A missing delta defaults
/// to 1.
struct RawPoint {
    double x;
    std::vector<double> y;
    std::optional<double> delta;
};

/// Validates raw records, sorts by abscissa and merges coincident sites.
/// Rejects empty input, non-finite values, non-positive deltas and
/// inconsistent dimensions.
DataSeries validate_and_sort(std::vector<RawPoint> raw);

/// Merges runs of exactly equal x by inverse-variance weighted averaging:
/// merged y = sum(y_i/delta_i^2)/sum(1/delta_i^2) per component and
/// merged delta = (sum 1/delta_i^2)^(-1/2), which preserves the weighted
/// least-squares data term. Identity when no duplicates.
DataSeries merge_coincident(const std::vector<double>& xs,
                            const std::vector<double>& ys_by_component,
                            std::size_t dims, const std::vector<double>& deltas);

/// max gap / min gap of the sample sites; a conditioning indicator for
/// the fitting system. Requires at least two sites.
double mesh_ratio(const DataSeries& series);

/// Default ratio above which callers should warn about conditioning.
inline constexpr double kDefaultMeshRatioWarnThreshold = 1e6;

/// Repeatedly merges the closest pair of sites (weighted averaging of x,
/// y and delta) until the mesh ratio drops to `threshold` or fewer than
/// two sites remain. Opt-in; plain solving never bins implicitly.
DataSeries bin_to_mesh_ratio(const DataSeries& series, double threshold);

}  // namespace cssd
