#include "cssd/energy.hpp"

#include <algorithm>
#include <cmath>

namespace cssd {

RoughnessFactor local_roughness_factor(double gap) {
    if (!(gap > 0) || !std::isfinite(gap)) {
        throw Error(errc::non_positive_gap, "gap width must be positive");
    }
    const double s = 1.0 / std::sqrt(gap);       // d^(-1/2)
    const double s3 = s / gap;                   // d^(-3/2)
    const double r3 = std::sqrt(3.0);
    RoughnessFactor u;
    u.row0 = {2.0 * r3 * s3, r3 * s, -2.0 * r3 * s3, r3 * s};
    u.row1 = {0.0, s, 0.0, -s};
    return u;
}

std::array<std::array<double, 4>, 4> roughness_form(double gap) {
    if (!(gap > 0) || !std::isfinite(gap)) {
        throw Error(errc::non_positive_gap, "gap width must be positive");
    }
    const double d1 = 1.0 / gap;
    const double d2 = d1 / gap;
    const double d3 = d2 / gap;
    return {{{12 * d3, 6 * d2, -12 * d3, 6 * d2},
             {6 * d2, 4 * d1, -6 * d2, 2 * d1},
             {-12 * d3, -6 * d2, 12 * d3, -6 * d2},
             {6 * d2, 2 * d1, -6 * d2, 4 * d1}}};
}

double roughness_energy(double gap, double f0, double df0, double f1, double df1) {
    const auto b = roughness_form(gap);
    const std::array<double, 4> v{f0, df0, f1, df1};
    double acc = 0;
    for (int i = 0; i < 4; ++i) {
        double row = 0;
        for (int j = 0; j < 4; ++j) row += b[i][j] * v[j];
        acc += v[i] * row;
    }
    return acc;
}

namespace {

// In-place Householder reduction of the bordered subsystem. The scratch
// is `rows` x (4 + dims), row-major: four unknown columns followed by one
// right-hand-side column per dimension. On return the leading 4x4 block
// is upper triangular and row 4 carries only right-hand-side residue.
void reduce_bordered(double* m, std::size_t rows, std::size_t dims) {
    const std::size_t cols = 4 + dims;
    for (std::size_t c = 0; c < 4; ++c) {
        double norm2 = 0;
        for (std::size_t r = c; r < rows; ++r) norm2 += m[r * cols + c] * m[r * cols + c];
        const double norm = std::sqrt(norm2);
        if (norm == 0) continue;
        const double pivot = m[c * cols + c];
        const double alpha = pivot >= 0 ? -norm : norm;
        // Householder vector v = x - alpha*e1, stored over the column.
        double v0 = pivot - alpha;
        double vnorm2 = norm2 - pivot * pivot + v0 * v0;
        if (vnorm2 == 0) continue;
        const double inv = 2.0 / vnorm2;
        for (std::size_t j = c + 1; j < cols; ++j) {
            double dot = v0 * m[c * cols + j];
            for (std::size_t r = c + 1; r < rows; ++r) dot += m[r * cols + c] * m[r * cols + j];
            dot *= inv;
            m[c * cols + j] -= dot * v0;
            for (std::size_t r = c + 1; r < rows; ++r) m[r * cols + j] -= dot * m[r * cols + c];
        }
        m[c * cols + c] = alpha;
        for (std::size_t r = c + 1; r < rows; ++r) m[r * cols + c] = 0;
    }
}

}  // namespace

EnergyState::EnergyState(double x0, std::span<const double> y0, double delta0, double p)
    : EnergyState(x0, y0.data(), 1, y0.size(), delta0, p) {}

EnergyState::EnergyState(double x0, const double* y0, std::ptrdiff_t stride,
                         std::size_t dims, double delta0, double p)
    : dims_(dims), count_(1), p_(p), last_x_(x0) {
    if (!(p > 0) || !(p < 1)) throw Error(errc::invalid_p, "p must lie strictly between 0 and 1");
    if (!(delta0 > 0)) throw Error(errc::non_positive_delta, "delta must be positive");
    if (dims_ == 0) throw Error(errc::invalid_argument, "need at least one dimension");
    beta_ = std::sqrt(1.0 - p);
    const double alpha = std::sqrt(p) / delta0;
    // Only the first data row has been absorbed: the trailing block is
    // [alpha 0; 0 0] with right-hand side [alpha*y; 0].
    r_block_ = {alpha, 0.0, 0.0};
    z_block_.assign(2 * dims_, 0.0);
    for (std::size_t d = 0; d < dims_; ++d) {
        z_block_[d] = alpha * y0[static_cast<std::ptrdiff_t>(d) * stride];
    }
    energy_sum_.assign(dims_, 0.0);
    energy_comp_.assign(dims_, 0.0);
    energies_.assign(dims_, 0.0);
    scratch_.assign(5 * (4 + dims_), 0.0);
}

void EnergyState::push(double x, std::span<const double> y, double delta,
                       detail::CompletedBlock* completed) {
    if (y.size() != dims_) throw Error(errc::invalid_argument, "dimension mismatch in push");
    push(x, y.data(), 1, delta, completed);
}

void EnergyState::push(double x, const double* y, std::ptrdiff_t stride, double delta,
                       detail::CompletedBlock* completed) {
    if (!(x > last_x_)) {
        throw Error(errc::non_increasing_x, "pushed site must lie beyond the last one");
    }
    if (!(delta > 0)) throw Error(errc::non_positive_delta, "delta must be positive");
    const double gap = x - last_x_;
    const RoughnessFactor u = local_roughness_factor(gap);
    const double alpha = std::sqrt(p_) / delta;
    const std::size_t cols = 4 + dims_;
    double* m = scratch_.data();
    std::fill(scratch_.begin(), scratch_.end(), 0.0);

    // Bordered subsystem: the trailing factor rows, the scaled roughness
    // rows of the new gap, and the new data row.
    m[0 * cols + 0] = r_block_[0];
    m[0 * cols + 1] = r_block_[1];
    m[1 * cols + 1] = r_block_[2];
    for (std::size_t d = 0; d < dims_; ++d) {
        m[0 * cols + 4 + d] = z_block_[d];
        m[1 * cols + 4 + d] = z_block_[dims_ + d];
    }
    for (int j = 0; j < 4; ++j) {
        m[2 * cols + static_cast<std::size_t>(j)] = beta_ * u.row0[static_cast<std::size_t>(j)];
        m[3 * cols + static_cast<std::size_t>(j)] = beta_ * u.row1[static_cast<std::size_t>(j)];
    }
    m[4 * cols + 2] = alpha;
    for (std::size_t d = 0; d < dims_; ++d) {
        m[4 * cols + 4 + d] = alpha * y[static_cast<std::ptrdiff_t>(d) * stride];
    }

    reduce_bordered(m, 5, dims_);

    if (completed) {
        completed->row0 = {m[0 * cols + 0], m[0 * cols + 1], m[0 * cols + 2], m[0 * cols + 3]};
        completed->row1 = {m[1 * cols + 1], m[1 * cols + 2], m[1 * cols + 3]};
        completed->rhs0.assign(dims_, 0.0);
        completed->rhs1.assign(dims_, 0.0);
        for (std::size_t d = 0; d < dims_; ++d) {
            completed->rhs0[d] = m[0 * cols + 4 + d];
            completed->rhs1[d] = m[1 * cols + 4 + d];
        }
    }

    ++count_;
    // Row 4 carries the new residual. Until three sites are absorbed the
    // system is square and interpolation is exact, so the energy stays
    // identically zero; skipping the roundoff-sized residue keeps it so.
    if (count_ >= 3) {
        for (std::size_t d = 0; d < dims_; ++d) {
            const double term = m[4 * cols + 4 + d] * m[4 * cols + 4 + d];
            // Neumaier-compensated accumulation.
            const double sum = energy_sum_[d] + term;
            if (std::abs(energy_sum_[d]) >= std::abs(term)) {
                energy_comp_[d] += (energy_sum_[d] - sum) + term;
            } else {
                energy_comp_[d] += (term - sum) + energy_sum_[d];
            }
            energy_sum_[d] = sum;
        }
        refresh_energies();
    }

    r_block_ = {m[2 * cols + 2], m[2 * cols + 3], m[3 * cols + 3]};
    for (std::size_t d = 0; d < dims_; ++d) {
        z_block_[d] = m[2 * cols + 4 + d];
        z_block_[dims_ + d] = m[3 * cols + 4 + d];
    }
    last_x_ = x;
}

void EnergyState::refresh_energies() {
    for (std::size_t d = 0; d < dims_; ++d) {
        energies_[d] = energy_sum_[d] + energy_comp_[d];
    }
}

double EnergyState::total_energy() const noexcept {
    double acc = 0;
    for (double e : energies_) acc += e;
    return acc;
}

EnergyState engine_init(double x0, std::span<const double> y0, double delta0, double p) {
    return EnergyState(x0, y0, delta0, p);
}

EnergyState engine_push(const EnergyState& state, double x, std::span<const double> y,
                        double delta) {
    EnergyState next = state;
    next.push(x, y, delta);
    return next;
}

namespace {

std::size_t checked_stream_start(const DataSeries& series, std::size_t start) {
    if (start >= series.size()) {
        throw Error(errc::invalid_argument, "stream start index out of range");
    }
    return start;
}

}  // namespace

PrefixEnergyStream::PrefixEnergyStream(const DataSeries& series, std::size_t start,
                                       StreamDirection direction, double p)
    : series_(&series),
      state_(direction == StreamDirection::forward
                 ? series.x(checked_stream_start(series, start))
                 : -series.x(checked_stream_start(series, start)),
             series.y_site(start), series.component_stride(), series.dims(),
             series.delta(start), p),
      direction_(direction), left_(start), right_(start) {}

bool PrefixEnergyStream::has_next() const noexcept {
    return direction_ == StreamDirection::forward ? right_ + 1 < series_->size()
                                                  : left_ > 0;
}

void PrefixEnergyStream::advance() {
    if (!has_next()) throw Error(errc::invalid_argument, "stream exhausted");
    if (direction_ == StreamDirection::forward) {
        ++right_;
        state_.push(series_->x(right_), series_->y_site(right_),
                    series_->component_stride(), series_->delta(right_));
    } else {
        --left_;
        state_.push(-series_->x(left_), series_->y_site(left_),
                    series_->component_stride(), series_->delta(left_));
    }
}

}  // namespace cssd
