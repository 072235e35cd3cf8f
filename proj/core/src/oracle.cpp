#include "cssd/oracle.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "cssd/energy.hpp"

namespace cssd {
namespace oracle {

std::vector<double> dense_energy(const DataSeries& series, std::size_t l,
                                 std::size_t r, double p) {
    if (l > r || r >= series.size()) {
        throw Error(errc::invalid_argument, "invalid oracle range");
    }
    if (!(p > 0) || !(p < 1)) {
        throw Error(errc::invalid_p, "p must lie strictly between 0 and 1");
    }
    const std::size_t m = r - l + 1;
    const std::size_t dims = series.dims();
    // Interpolation is exact on up to two sites.
    if (m <= 2) return std::vector<double>(dims, 0.0);

    const auto rows = static_cast<Eigen::Index>(3 * m - 2);
    const auto cols = static_cast<Eigen::Index>(2 * m);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(dims));
    const double beta = std::sqrt(1.0 - p);
    for (std::size_t i = 0; i < m; ++i) {
        const double alpha = std::sqrt(p) / series.delta(l + i);
        const auto row = static_cast<Eigen::Index>(3 * i);
        a(row, static_cast<Eigen::Index>(2 * i)) = alpha;
        for (std::size_t d = 0; d < dims; ++d) {
            rhs(row, static_cast<Eigen::Index>(d)) = alpha * series.y(l + i, d);
        }
        if (i + 1 < m) {
            const RoughnessFactor u =
                local_roughness_factor(series.x(l + i + 1) - series.x(l + i));
            for (int j = 0; j < 4; ++j) {
                const auto col = static_cast<Eigen::Index>(2 * i + static_cast<std::size_t>(j));
                a(row + 1, col) = beta * u.row0[static_cast<std::size_t>(j)];
                a(row + 2, col) = beta * u.row1[static_cast<std::size_t>(j)];
            }
        }
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    std::vector<double> energies(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const Eigen::VectorXd y = rhs.col(static_cast<Eigen::Index>(d));
        const Eigen::VectorXd u = qr.solve(y);
        const double residual = (a * u - y).squaredNorm();
        if (!std::isfinite(residual)) {
            throw Error(errc::oracle_failure, "dense least-squares solve failed");
        }
        energies[d] = residual;
    }
    return energies;
}

BruteForceResult brute_force_solve(const DataSeries& series, double p, double gamma) {
    const std::size_t n = series.size();
    if (n > 20) {
        throw Error(errc::too_large_for_oracle,
                    "brute force enumerates 2^(N-1) subsets; N must not exceed 20");
    }
    if (!(gamma > 0) || !std::isfinite(gamma)) {
        throw Error(errc::invalid_gamma, "gamma must be positive and finite");
    }
    // Interval energy table, summed over dimensions.
    std::vector<std::vector<double>> e(n, std::vector<double>(n, 0.0));
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t r = l; r < n; ++r) {
            const auto per_dim = dense_energy(series, l, r, p);
            double total = 0;
            for (double v : per_dim) total += v;
            e[l][r] = total;
        }
    }

    const std::size_t gap_count = n - 1;
    const std::uint64_t subsets = std::uint64_t{1} << gap_count;
    auto subset_objective = [&](std::uint64_t mask) {
        double total = 0;
        std::size_t left = 0;
        std::size_t jumps = 0;
        for (std::size_t g = 0; g < gap_count; ++g) {
            if (mask & (std::uint64_t{1} << g)) {
                total += e[left][g];
                left = g + 1;
                ++jumps;
            }
        }
        total += e[left][n - 1];
        return total + gamma * static_cast<double>(jumps);
    };

    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        best = std::min(best, subset_objective(mask));
    }
    BruteForceResult result;
    result.objective = best;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        if (subset_objective(mask) <= best + kBruteForceTieTolerance) {
            std::vector<std::size_t> gaps;
            for (std::size_t g = 0; g < gap_count; ++g) {
                if (mask & (std::uint64_t{1} << g)) gaps.push_back(g + 1);
            }
            result.optimal_gap_sets.push_back(std::move(gaps));
        }
    }
    return result;
}

}  // namespace oracle
}  // namespace cssd
