#include "cssd/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cssd {

namespace {

void check_finite(std::span<const double> values, errc code, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(code, std::string(what) + " is not finite", i);
        }
    }
}

}  // namespace

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::empty_input: return "empty_input";
        case errc::non_finite_value: return "non_finite_value";
        case errc::non_positive_delta: return "non_positive_delta";
        case errc::too_few_points: return "too_few_points";
        case errc::non_positive_gap: return "non_positive_gap";
        case errc::invalid_p: return "invalid_p";
        case errc::invalid_gamma: return "invalid_gamma";
        case errc::non_increasing_x: return "non_increasing_x";
        case errc::bad_fold_count: return "bad_fold_count";
        case errc::degenerate_fold: return "degenerate_fold";
        case errc::out_of_domain: return "out_of_domain";
        case errc::corrupt_traceback: return "corrupt_traceback";
        case errc::too_large_for_oracle: return "too_large_for_oracle";
        case errc::oracle_failure: return "oracle_failure";
        case errc::numerical_failure: return "numerical_failure";
        case errc::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

bool is_data_error(errc code) noexcept {
    switch (code) {
        case errc::corrupt_traceback:
        case errc::oracle_failure:
        case errc::numerical_failure:
            return false;
        default:
            return true;
    }
}

DataSeries::DataSeries(std::vector<double> xs, std::vector<double> ys_by_component,
                       std::size_t dims, std::vector<double> deltas)
    : xs_(std::move(xs)), ys_(std::move(ys_by_component)), dims_(dims),
      deltas_(std::move(deltas)) {
    const std::size_t n = xs_.size();
    if (n == 0) throw Error(errc::empty_input, "data series is empty");
    if (dims_ == 0) throw Error(errc::invalid_argument, "data series needs at least one dimension");
    if (ys_.size() != n * dims_) {
        throw Error(errc::invalid_argument, "observation count does not match sites times dimensions");
    }
    if (deltas_.size() != n) {
        throw Error(errc::invalid_argument, "delta count does not match site count");
    }
    check_finite(xs_, errc::non_finite_value, "sample site");
    check_finite(ys_, errc::non_finite_value, "observation");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(deltas_[i])) throw Error(errc::non_finite_value, "delta is not finite", i);
        if (deltas_[i] <= 0) throw Error(errc::non_positive_delta, "delta must be positive", i);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i - 1] < xs_[i])) {
            throw Error(errc::non_increasing_x, "sample sites must be strictly increasing", i);
        }
    }
}

DataSeries DataSeries::from_rows(std::vector<double> xs,
                                 const std::vector<std::vector<double>>& rows,
                                 std::vector<double> deltas) {
    const std::size_t n = xs.size();
    if (rows.size() != n) {
        throw Error(errc::invalid_argument, "row count does not match site count");
    }
    const std::size_t dims = n == 0 ? 0 : rows.front().size();
    std::vector<double> ys(n * dims);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != dims) {
            throw Error(errc::invalid_argument, "rows have inconsistent dimensions", i);
        }
        for (std::size_t d = 0; d < dims; ++d) ys[d * n + i] = rows[i][d];
    }
    return DataSeries(std::move(xs), std::move(ys), dims, std::move(deltas));
}

DataSeries DataSeries::subset(std::span<const std::size_t> indices) const {
    const std::size_t m = indices.size();
    std::vector<double> xs(m), deltas(m), ys(m * dims_);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = indices[j];
        if (i >= size()) throw Error(errc::invalid_argument, "subset index out of range", j);
        if (j > 0 && indices[j - 1] >= i) {
            throw Error(errc::invalid_argument, "subset indices must be strictly increasing", j);
        }
        xs[j] = xs_[i];
        deltas[j] = deltas_[i];
        for (std::size_t d = 0; d < dims_; ++d) ys[d * m + j] = y(i, d);
    }
    return DataSeries(std::move(xs), std::move(ys), dims_, std::move(deltas));
}

Gamma::Gamma(double value) : value_(value), infinite_(false) {
    if (!std::isfinite(value) || value <= 0) {
        throw Error(errc::invalid_gamma, "gamma must be positive and finite (or Gamma::infinite())");
    }
}

double Gamma::value() const {
    if (infinite_) throw Error(errc::invalid_argument, "gamma is infinite");
    return value_;
}

Hyperparams::Hyperparams(double p, Gamma gamma) : p_(p), gamma_(gamma) {
    if (!std::isfinite(p) || p <= 0 || p >= 1) {
        throw Error(errc::invalid_p, "p must lie strictly between 0 and 1");
    }
}

DiscontinuitySet DiscontinuitySet::from_gaps(const DataSeries& series,
                                             std::vector<std::size_t> gaps) {
    const std::size_t n = series.size();
    const std::size_t bound = (n + 1) / 2 - 1;  // ceil(n/2) - 1
    if (gaps.size() > bound) {
        throw Error(errc::invalid_argument,
                    "too many discontinuities: an optimal set has at most ceil(N/2)-1");
    }
    std::vector<double> locations(gaps.size());
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        const std::size_t g = gaps[k];
        if (g < 1 || g >= n) {
            throw Error(errc::invalid_argument, "gap index out of range", k);
        }
        if (k > 0 && gaps[k - 1] >= g) {
            throw Error(errc::invalid_argument, "gap indices must be strictly increasing", k);
        }
        locations[k] = (series.x(g - 1) + series.x(g)) / 2.0;
    }
    return DiscontinuitySet(std::move(gaps), std::move(locations));
}

std::vector<std::pair<std::size_t, std::size_t>> DiscontinuitySet::segment_ranges(
    std::size_t n) const {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(gaps_.size() + 1);
    std::size_t left = 0;
    for (std::size_t g : gaps_) {
        ranges.emplace_back(left, g - 1);
        left = g;
    }
    ranges.emplace_back(left, n - 1);
    return ranges;
}

SegmentSpline::SegmentSpline(std::vector<double> knots, std::vector<double> values,
                             std::vector<double> derivs, std::size_t dims,
                             Interval domain)
    : knots_(std::move(knots)), values_(std::move(values)), derivs_(std::move(derivs)),
      dims_(dims), domain_(domain) {
    const std::size_t m = knots_.size();
    if (m == 0) throw Error(errc::empty_input, "segment spline needs at least one knot");
    if (dims_ == 0) throw Error(errc::invalid_argument, "segment spline needs at least one dimension");
    if (values_.size() != m * dims_ || derivs_.size() != m * dims_) {
        throw Error(errc::invalid_argument, "control point count does not match knots times dimensions");
    }
    if (!(domain_.a <= domain_.b)) {
        throw Error(errc::invalid_argument, "segment domain is inverted");
    }
    check_finite(knots_, errc::non_finite_value, "knot");
    check_finite(values_, errc::non_finite_value, "control value");
    check_finite(derivs_, errc::non_finite_value, "control derivative");
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && !(knots_[i - 1] < knots_[i])) {
            throw Error(errc::non_increasing_x, "knots must be strictly increasing", i);
        }
        if (!domain_.contains(knots_[i])) {
            throw Error(errc::out_of_domain, "knot outside the segment domain", i);
        }
    }
}

CssdSolution::CssdSolution(Hyperparams params, DiscontinuitySet discontinuities,
                           std::vector<SegmentSpline> segments,
                           std::vector<double> segment_energies, double objective)
    : params_(params), discontinuities_(std::move(discontinuities)),
      segments_(std::move(segments)), segment_energies_(std::move(segment_energies)),
      objective_(objective) {
    const std::size_t k = discontinuities_.count();
    if (segments_.size() != k + 1) {
        throw Error(errc::invalid_argument, "segment count must be one more than the jump count");
    }
    if (segment_energies_.size() != segments_.size()) {
        throw Error(errc::invalid_argument, "one energy per segment required");
    }
    if (params_.gamma().is_infinite() && k != 0) {
        throw Error(errc::invalid_argument, "infinite gamma admits no discontinuities");
    }
    // Segment domains tile the data extent with boundaries exactly at the
    // discontinuity locations.
    for (std::size_t j = 0; j + 1 < segments_.size(); ++j) {
        if (segments_[j].domain().b != discontinuities_.locations()[j] ||
            segments_[j + 1].domain().a != discontinuities_.locations()[j]) {
            throw Error(errc::invalid_argument, "segment domains must meet at the jump locations");
        }
    }
    double energy_sum = 0;
    for (double e : segment_energies_) energy_sum += e;
    const double expected = params_.gamma().is_infinite()
                                ? energy_sum
                                : energy_sum + params_.gamma().value() * static_cast<double>(k);
    const double scale = std::max({std::abs(expected), std::abs(objective_), 1e-300});
    if (std::abs(objective_ - expected) > 1e-10 * scale) {
        throw Error(errc::invalid_argument,
                    "objective does not match segment energies plus jump penalty");
    }
}

std::vector<double> CssdSolution::evaluate(double t) const {
    std::vector<double> out(dims());
    const auto locations = discontinuities_.locations();
    // Exact hit on a jump location: mean of the one-sided limits.
    for (std::size_t j = 0; j < locations.size(); ++j) {
        if (t == locations[j]) {
            std::vector<double> right(dims());
            segments_[j].evaluate_unchecked(t, out);
            segments_[j + 1].evaluate_unchecked(t, right);
            for (std::size_t d = 0; d < dims(); ++d) out[d] = 0.5 * (out[d] + right[d]);
            return out;
        }
    }
    std::size_t j = 0;
    while (j < locations.size() && t > locations[j]) ++j;
    segments_[j].evaluate_unchecked(t, out);
    return out;
}

}  // namespace cssd
