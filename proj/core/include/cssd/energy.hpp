#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {

/// 2x4 factor U of the per-gap roughness form: U^T U equals the matrix B
/// for which v^T B v is the exact integral of the squared second
/// derivative of the Hermite cubic with control points
/// v = [f_i, f'_i, f_{i+1}, f'_{i+1}] over a gap of width d.
struct RoughnessFactor {
    std::array<double, 4> row0;
    std::array<double, 4> row1;
};

RoughnessFactor local_roughness_factor(double gap);

/// The roughness form B itself, assembled from the closed-form entries
/// (12/d^3, 6/d^2, ...). Used for exact functional evaluation.
std::array<std::array<double, 4>, 4> roughness_form(double gap);

/// v^T B(gap) v for v = [f0, df0, f1, df1].
double roughness_energy(double gap, double f0, double df0, double f1, double df1);

namespace detail {
/// Two finished rows of the factorization emitted while absorbing a
/// point; retained only when reconstructing the minimizer.
struct CompletedBlock {
    // row0 spans local columns 0..3, row1 columns 1..3 (its column 0 is
    // structurally zero); one reduced right-hand side entry per dimension
    // and per row.
    std::array<double, 4> row0;
    std::array<double, 3> row1;
    std::vector<double> rhs0;
    std::vector<double> rhs1;
};
}  // namespace detail

/// Rolling state of the incremental least-squares reduction that yields
/// smoothing-spline energies in constant time per absorbed site. Holds
/// only the trailing 2x2 factor block, the reduced right-hand sides
/// (one column per data dimension) and the accumulated residual squares.
///
/// A value type: copy it to branch, share freely across threads.
class EnergyState {
public:
    /// Absorbs the first site. Requires 0 < p < 1 and delta > 0.
    EnergyState(double x0, std::span<const double> y0, double delta0, double p);
    /// As above with strided access to the observation components.
    EnergyState(double x0, const double* y0, std::ptrdiff_t stride, std::size_t dims,
                double delta0, double p);

    /// Absorbs the next site (x strictly beyond the last one). Constant
    /// arithmetic cost regardless of how many sites were absorbed.
    /// When `completed` is non-null the two rows finished by this step
    /// are recorded there for later back-substitution.
    void push(double x, std::span<const double> y, double delta,
              detail::CompletedBlock* completed = nullptr);
    void push(double x, const double* y, std::ptrdiff_t stride, double delta,
              detail::CompletedBlock* completed = nullptr);

    std::size_t count() const noexcept { return count_; }
    std::size_t dims() const noexcept { return dims_; }
    double p() const noexcept { return p_; }
    double last_x() const noexcept { return last_x_; }

    /// Accumulated minimal energies per dimension over the absorbed
    /// sites. Exactly zero while count <= 2.
    std::span<const double> energies() const noexcept { return energies_; }
    double total_energy() const noexcept;

    /// Trailing factor block and reduced right-hand sides, exposed for
    /// the segment reconstruction.
    const std::array<double, 3>& trailing_block() const noexcept { return r_block_; }
    std::span<const double> trailing_rhs() const noexcept { return z_block_; }

private:
    void refresh_energies();

    // Trailing upper-triangular 2x2 block, packed [r00, r01, r11].
    std::array<double, 3> r_block_;
    std::vector<double> z_block_;    // 2 x dims, row-major
    std::vector<double> energy_sum_; // plain accumulator per dimension
    std::vector<double> energy_comp_;// Neumaier compensation per dimension
    std::vector<double> energies_;   // sum + comp, refreshed on push
    std::vector<double> scratch_;    // 5 x (4 + dims) workspace
    std::size_t dims_;
    std::size_t count_;
    double p_;
    double beta_;  // sqrt(1 - p)
    double last_x_;
};

/// Functional form of the engine operations.
EnergyState engine_init(double x0, std::span<const double> y0, double delta0, double p);
EnergyState engine_push(const EnergyState& state, double x, std::span<const double> y,
                        double delta);

enum class StreamDirection { forward, reverse };

/// Lazily yields the spline energies of all prefixes anchored at one
/// site: E_{start:start}, E_{start:start+1}, ... when running forward,
/// or E_{start:start}, E_{start-1:start}, ... when running in reverse.
/// The reverse direction absorbs the mirrored abscissa so gap widths
/// stay positive; the functional is symmetric under that reflection.
class PrefixEnergyStream {
public:
    PrefixEnergyStream(const DataSeries& series, std::size_t start,
                       StreamDirection direction, double p);

    /// Energies of the interval currently covered.
    std::span<const double> energies() const noexcept { return state_.energies(); }
    double total() const noexcept { return state_.total_energy(); }

    /// Inclusive 0-based bounds of the covered interval.
    std::size_t left() const noexcept { return left_; }
    std::size_t right() const noexcept { return right_; }

    bool has_next() const noexcept;
    /// Extends the covered interval by one site.
    void advance();

private:
    const DataSeries* series_;
    EnergyState state_;
    StreamDirection direction_;
    std::size_t left_;
    std::size_t right_;
};

}  // namespace cssd
