#pragma once

#include <cstddef>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {

/// Bellman values and traceback of the optimal-partition recursion.
/// fstar[r] is the minimal objective over the first r sites (1-based r,
/// fstar[0] = -gamma); z[r] is the left boundary of the last segment of
/// an optimal partition of 1..r, in 1-based site numbering.
struct DpTables {
    std::vector<double> fstar;
    std::vector<std::size_t> z;

    std::size_t n() const noexcept { return z.empty() ? 0 : z.size() - 1; }
};

enum class Pruning { enabled, disabled };

/// Fills the Bellman tables for a finite jump penalty. The candidate
/// without any jump is seeded first, then the inner loop scans the last-
/// segment start downward with strict-improvement updates, so ties keep
/// the largest possible right-most interval. With pruning enabled the
/// scan stops as soon as the segment energy plus gamma reaches the
/// running minimum; pruned candidates are provably non-improving, so
/// both modes produce identical tables.
DpTables solve_partition(const DataSeries& series, double p, double gamma,
                         Pruning pruning = Pruning::enabled);

/// Reads the optimal jump set off the traceback column.
DiscontinuitySet traceback(const DpTables& tables, const DataSeries& series);

/// Full solve: optimal partition, then one fitted spline and one freshly
/// recomputed energy per segment. An infinite gamma bypasses the
/// partition search and fits a single classical smoothing spline.
CssdSolution solve_cssd(const DataSeries& series, const Hyperparams& params);

/// Independent audit of a candidate jump set: fresh energy streams per
/// induced segment plus the jump penalty. Infinite gamma with a
/// non-empty set yields +infinity.
double objective_value(const DataSeries& series, const DiscontinuitySet& jumps,
                       const Hyperparams& params);

}  // namespace cssd
