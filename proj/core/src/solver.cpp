#include "cssd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cssd/energy.hpp"
#include "cssd/segment_fit.hpp"

namespace cssd {

namespace {

// Fresh-stream energy of the 0-based inclusive range, summed over
// dimensions.
double interval_energy(const DataSeries& series, std::size_t l, std::size_t r,
                       double p) {
    PrefixEnergyStream stream(series, l, StreamDirection::forward, p);
    while (stream.right() < r) stream.advance();
    return stream.total();
}

}  // namespace

DpTables solve_partition(const DataSeries& series, double p, double gamma,
                         Pruning pruning) {
    if (!(gamma > 0) || !std::isfinite(gamma)) {
        throw Error(errc::invalid_gamma, "gamma must be positive and finite");
    }
    const std::size_t n = series.size();
    DpTables tables;
    tables.fstar.assign(n + 1, 0.0);
    tables.z.assign(n + 1, 0);
    tables.fstar[0] = -gamma;

    // One forward stream supplies the no-jump candidates E_{1:r} for all r.
    PrefixEnergyStream whole(series, 0, StreamDirection::forward, p);
    for (std::size_t r = 1; r <= n; ++r) {
        if (r > 1) whole.advance();
        // Seed with the largest possible right-most interval (l = 1); the
        // downward scan below replaces it only on strict improvement, so
        // ties keep the longer last segment.
        double best = whole.total();
        std::size_t arg = 1;
        if (r >= 3) {
            // E_{l:r} for l = r-1, r-2, ... comes from one stream running
            // leftward from the anchor r; its energies are non-decreasing
            // along the scan while the Bellman prefix values are
            // non-negative, so once E_{l:r} + gamma reaches the running
            // minimum no smaller l can improve it.
            PrefixEnergyStream back(series, r - 1, StreamDirection::reverse, p);
            for (std::size_t l = r - 1; l >= 2; --l) {
                back.advance();
                const double e = back.total();
                const double candidate = e + gamma + tables.fstar[l - 1];
                if (candidate < best) {
                    best = candidate;
                    arg = l;
                }
                if (pruning == Pruning::enabled && e + gamma >= best) break;
            }
        }
        tables.fstar[r] = best;
        tables.z[r] = arg;
    }
    return tables;
}

DiscontinuitySet traceback(const DpTables& tables, const DataSeries& series) {
    const std::size_t n = series.size();
    if (tables.n() != n) {
        throw Error(errc::corrupt_traceback, "tables do not match the series");
    }
    std::vector<std::size_t> gaps;
    std::size_t r = n;
    while (r >= 1) {
        const std::size_t l = tables.z[r];
        if (l < 1 || l > r) {
            throw Error(errc::corrupt_traceback, "traceback column out of range");
        }
        if (l == 1) break;
        gaps.push_back(l - 1);
        r = l - 1;
    }
    std::reverse(gaps.begin(), gaps.end());
    return DiscontinuitySet::from_gaps(series, gaps);
}

CssdSolution solve_cssd(const DataSeries& series, const Hyperparams& params) {
    const std::size_t n = series.size();
    const double p = params.p();

    DiscontinuitySet jumps = DiscontinuitySet::none();
    if (!params.gamma().is_infinite() && n > 1) {
        const DpTables tables = solve_partition(series, p, params.gamma().value());
        jumps = traceback(tables, series);
    }

    const auto ranges = jumps.segment_ranges(n);
    const auto locations = jumps.locations();
    std::vector<SegmentSpline> segments;
    segments.reserve(ranges.size());
    std::vector<double> energies;
    energies.reserve(ranges.size());
    double objective = 0;
    for (std::size_t j = 0; j < ranges.size(); ++j) {
        const auto [l, r] = ranges[j];
        const SegmentSpline::Interval domain{
            j == 0 ? series.x(0) : locations[j - 1],
            j + 1 == ranges.size() ? series.x(n - 1) : locations[j]};
        segments.push_back(fit_segment(series, l, r, p, domain));
        energies.push_back(interval_energy(series, l, r, p));
        objective += energies.back();
    }
    if (!params.gamma().is_infinite()) {
        objective += params.gamma().value() * static_cast<double>(jumps.count());
    }
    return CssdSolution(params, std::move(jumps), std::move(segments),
                        std::move(energies), objective);
}

double objective_value(const DataSeries& series, const DiscontinuitySet& jumps,
                       const Hyperparams& params) {
    if (params.gamma().is_infinite() && !jumps.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    double total = 0;
    for (const auto& [l, r] : jumps.segment_ranges(series.size())) {
        total += interval_energy(series, l, r, params.p());
    }
    if (!params.gamma().is_infinite()) {
        total += params.gamma().value() * static_cast<double>(jumps.count());
    }
    return total;
}

}  // namespace cssd
