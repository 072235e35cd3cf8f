#pragma once

#include <cstddef>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {
namespace oracle {

/// Reference spline energies on the 0-based inclusive site range [l, r]:
/// materializes the full block least-squares system and solves it with a
/// dense factorization, one shared factor for all dimensions. Slow by
/// design; exists to audit the incremental engine and the solver.
std::vector<double> dense_energy(const DataSeries& series, std::size_t l,
                                 std::size_t r, double p);

struct BruteForceResult {
    double objective;
    /// Every gap set whose objective lies within the tie tolerance of the
    /// optimum, as sorted 1-based gap indices, in enumeration order.
    std::vector<std::vector<std::size_t>> optimal_gap_sets;
};

/// Ties closer than this absolute distance to the optimum are reported
/// as co-optimal; analytic ties are exact in theory but not in floats.
inline constexpr double kBruteForceTieTolerance = 1e-12;

/// Exhaustive minimization over all 2^(N-1) midpoint subsets. Guarded to
/// N <= 20.
BruteForceResult brute_force_solve(const DataSeries& series, double p, double gamma);

}  // namespace oracle
}  // namespace cssd
