#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cssd/error.hpp"

namespace cssd {

/// Sorted sample sites with vector-valued observations and per-site
/// uncertainty estimates. Immutable after construction; construction
/// rejects unsorted or non-finite input.
///
/// Observations are stored component-major: component(d) is a contiguous
/// view of all N values of dimension d, so a single factorization of the
/// site-dependent system serves all D right-hand sides.
class DataSeries {
public:
    /// `ys_by_component` holds dims*N values, component-major
    /// (value of site i in dimension d at position d*N + i).
    DataSeries(std::vector<double> xs, std::vector<double> ys_by_component,
               std::size_t dims, std::vector<double> deltas);

    /// Convenience constructor from per-site rows (each row = one site's
    /// D observations).
    static DataSeries from_rows(std::vector<double> xs,
                                const std::vector<std::vector<double>>& rows,
                                std::vector<double> deltas);

    std::size_t size() const noexcept { return xs_.size(); }
    std::size_t dims() const noexcept { return dims_; }

    double x(std::size_t i) const { return xs_[i]; }
    double y(std::size_t i, std::size_t d) const { return ys_[d * size() + i]; }
    double delta(std::size_t i) const { return deltas_[i]; }

    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> deltas() const noexcept { return deltas_; }
    std::span<const double> component(std::size_t d) const {
        return std::span<const double>(ys_).subspan(d * size(), size());
    }
    /// Pointer to y(i, 0); consecutive dimensions of site i are strided
    /// by size().
    const double* y_site(std::size_t i) const { return ys_.data() + i; }
    std::ptrdiff_t component_stride() const noexcept {
        return static_cast<std::ptrdiff_t>(size());
    }

    /// Sub-series keeping the sites listed in `indices` (must be sorted,
    /// strictly increasing, in range).
    DataSeries subset(std::span<const std::size_t> indices) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;  // component-major, dims_ * N
    std::size_t dims_;
    std::vector<double> deltas_;
};

/// Jump penalty: a positive weight or the distinguished infinite state in
/// which the model reduces to the classical smoothing spline and the
/// solver skips the jump branch entirely.
class Gamma {
public:
    static Gamma infinite() noexcept { return Gamma(); }
    explicit Gamma(double value);

    bool is_infinite() const noexcept { return infinite_; }
    /// Finite penalty value; must not be called on the infinite state.
    double value() const;

    friend bool operator==(const Gamma& a, const Gamma& b) noexcept {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

private:
    Gamma() : value_(0), infinite_(true) {}
    double value_;
    bool infinite_;
};

class Hyperparams {
public:
    Hyperparams(double p, Gamma gamma);

    double p() const noexcept { return p_; }
    const Gamma& gamma() const noexcept { return gamma_; }

private:
    double p_;
    Gamma gamma_;
};

/// Optimal jump positions. A gap index g in {1, ..., N-1} identifies the
/// open interval between sites x_g and x_{g+1} in 1-based site numbering
/// (array positions g-1 and g); the stored location is the midpoint of
/// that gap and is derived display data, not the identity.
class DiscontinuitySet {
public:
    static DiscontinuitySet none() { return DiscontinuitySet({}, {}); }
    /// Validates gap indices against the series and derives midpoints.
    static DiscontinuitySet from_gaps(const DataSeries& series,
                                      std::vector<std::size_t> gaps);

    std::size_t count() const noexcept { return gaps_.size(); }
    bool empty() const noexcept { return gaps_.empty(); }
    std::span<const std::size_t> gaps() const noexcept { return gaps_; }
    std::span<const double> locations() const noexcept { return locations_; }

    /// 0-based inclusive site ranges [l, r] of the partition segments
    /// induced on a series of n sites.
    std::vector<std::pair<std::size_t, std::size_t>> segment_ranges(std::size_t n) const;

    friend bool operator==(const DiscontinuitySet& a, const DiscontinuitySet& b) {
        return a.gaps_ == b.gaps_;
    }

private:
    DiscontinuitySet(std::vector<std::size_t> gaps, std::vector<double> locations)
        : gaps_(std::move(gaps)), locations_(std::move(locations)) {}
    std::vector<std::size_t> gaps_;
    std::vector<double> locations_;
};

/// One cubic polynomial piece in local coordinates t = x - x0,
/// valid on [x0, x1]; coeffs holds c0..c3 for each dimension
/// (dimension d at positions 4d .. 4d+3).
struct CubicPiece {
    double x0;
    double x1;
    std::vector<double> coeffs;
};

/// Hermite control points (per-knot values and first derivatives) of one
/// continuous cubic piece of a solution, together with the segment's
/// extent. Evaluation is the Hermite cubic between adjacent knots and the
/// linear extension beyond the extremal knots.
class SegmentSpline {
public:
    struct Interval {
        double a;
        double b;
        bool contains(double t) const noexcept { return t >= a && t <= b; }
    };

    /// `values` and `derivs` are knot-major (knot i, dimension d at
    /// position i*dims + d).
    SegmentSpline(std::vector<double> knots, std::vector<double> values,
                  std::vector<double> derivs, std::size_t dims, Interval domain);

    std::size_t knot_count() const noexcept { return knots_.size(); }
    std::size_t dims() const noexcept { return dims_; }
    std::span<const double> knots() const noexcept { return knots_; }
    Interval domain() const noexcept { return domain_; }

    double value(std::size_t knot, std::size_t d) const { return values_[knot * dims_ + d]; }
    double deriv(std::size_t knot, std::size_t d) const { return derivs_[knot * dims_ + d]; }

    /// Evaluate at t inside the segment domain; throws out_of_domain
    /// otherwise. Exact stored values are returned when t hits a knot.
    std::vector<double> evaluate(double t) const;
    void evaluate(double t, std::span<double> out) const;

    /// Evaluation without the domain check; the linear extension applies
    /// for any t beyond the extremal knots.
    void evaluate_unchecked(double t, std::span<double> out) const;

    /// Local-coordinate cubic coefficients per inter-knot interval.
    /// A single-knot segment yields one linear record.
    std::vector<CubicPiece> pieces() const;

private:
    std::vector<double> knots_;
    std::vector<double> values_;  // knot-major
    std::vector<double> derivs_;  // knot-major
    std::size_t dims_;
    Interval domain_;
};

/// A full solution: jump set, one fitted spline per induced segment, the
/// per-segment energies and the objective value they sum to.
class CssdSolution {
public:
    CssdSolution(Hyperparams params, DiscontinuitySet discontinuities,
                 std::vector<SegmentSpline> segments,
                 std::vector<double> segment_energies, double objective);

    const Hyperparams& params() const noexcept { return params_; }
    const DiscontinuitySet& discontinuities() const noexcept { return discontinuities_; }
    const std::vector<SegmentSpline>& segments() const noexcept { return segments_; }
    std::span<const double> segment_energies() const noexcept { return segment_energies_; }
    double objective() const noexcept { return objective_; }
    std::size_t dims() const { return segments_.front().dims(); }

    /// Piecewise evaluation over the whole data extent with the reporting
    /// conventions: at a discontinuity location the mean of the left and
    /// right limits, outside the extent the linear extension of the
    /// nearest boundary segment.
    std::vector<double> evaluate(double t) const;

private:
    Hyperparams params_;
    DiscontinuitySet discontinuities_;
    std::vector<SegmentSpline> segments_;
    std::vector<double> segment_energies_;
    double objective_;
};

}  // namespace cssd
