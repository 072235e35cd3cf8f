#include "cssd/segment_fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cssd/energy.hpp"

namespace cssd {

namespace {

struct HermiteCoeffs {
    double c2;
    double c3;
};

// Local cubic coefficients above the shared c0 = f0, c1 = df0.
HermiteCoeffs hermite_tail(double gap, double f0, double df0, double f1, double df1) {
    HermiteCoeffs c;
    c.c2 = -(df1 + 2.0 * df0) / gap + 3.0 * (f1 - f0) / (gap * gap);
    c.c3 = (df1 + df0) / (gap * gap) + 2.0 * (f0 - f1) / (gap * gap * gap);
    return c;
}

double safe_div(double num, double den) {
    if (den == 0) {
        throw Error(errc::numerical_failure, "singular factor in segment reconstruction");
    }
    return num / den;
}

}  // namespace

SegmentSpline fit_segment(const DataSeries& series, std::size_t l, std::size_t r,
                          double p, SegmentSpline::Interval domain) {
    const std::size_t n = series.size();
    if (l > r || r >= n) throw Error(errc::invalid_argument, "invalid segment range");
    const std::size_t m = r - l + 1;
    const std::size_t dims = series.dims();

    std::vector<double> knots(m);
    for (std::size_t i = 0; i < m; ++i) knots[i] = series.x(l + i);

    std::vector<double> values(m * dims), derivs(m * dims, 0.0);
    if (m == 1) {
        for (std::size_t d = 0; d < dims; ++d) values[d] = series.y(l, d);
        return SegmentSpline(std::move(knots), std::move(values), std::move(derivs),
                             dims, domain);
    }

    // Re-run the incremental reduction over the segment, this time keeping
    // every finished row pair so the Hermite unknowns can be recovered by
    // back-substitution against the banded factor.
    EnergyState state(series.x(l), series.y_site(l), series.component_stride(), dims,
                      series.delta(l), p);
    std::vector<detail::CompletedBlock> blocks(m - 1);
    for (std::size_t k = 1; k < m; ++k) {
        state.push(series.x(l + k), series.y_site(l + k), series.component_stride(),
                   series.delta(l + k), &blocks[k - 1]);
    }

    const auto& tail = state.trailing_block();
    const auto tail_rhs = state.trailing_rhs();
    std::vector<double> u(2 * m);
    for (std::size_t d = 0; d < dims; ++d) {
        u[2 * m - 1] = safe_div(tail_rhs[dims + d], tail[2]);
        u[2 * m - 2] = safe_div(tail_rhs[d] - tail[1] * u[2 * m - 1], tail[0]);
        for (std::size_t k = m - 1; k >= 1; --k) {
            const detail::CompletedBlock& blk = blocks[k - 1];
            const std::size_t base = 2 * k - 2;
            u[base + 1] = safe_div(blk.rhs1[d] - blk.row1[1] * u[base + 2] -
                                       blk.row1[2] * u[base + 3],
                                   blk.row1[0]);
            u[base] = safe_div(blk.rhs0[d] - blk.row0[1] * u[base + 1] -
                                   blk.row0[2] * u[base + 2] - blk.row0[3] * u[base + 3],
                               blk.row0[0]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            values[i * dims + d] = u[2 * i];
            derivs[i * dims + d] = u[2 * i + 1];
        }
    }
    return SegmentSpline(std::move(knots), std::move(values), std::move(derivs), dims,
                         domain);
}

void SegmentSpline::evaluate_unchecked(double t, std::span<double> out) const {
    const std::size_t m = knots_.size();
    if (t <= knots_.front()) {
        const double h = t - knots_.front();
        for (std::size_t d = 0; d < dims_; ++d) out[d] = value(0, d) + h * deriv(0, d);
        return;
    }
    if (t >= knots_.back()) {
        const double h = t - knots_.back();
        for (std::size_t d = 0; d < dims_; ++d) {
            out[d] = value(m - 1, d) + h * deriv(m - 1, d);
        }
        return;
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double gap = knots_[i + 1] - knots_[i];
    const double h = t - knots_[i];
    for (std::size_t d = 0; d < dims_; ++d) {
        const double f0 = value(i, d), df0 = deriv(i, d);
        const double f1 = value(i + 1, d), df1 = deriv(i + 1, d);
        const auto c = hermite_tail(gap, f0, df0, f1, df1);
        out[d] = f0 + h * (df0 + h * (c.c2 + h * c.c3));
    }
}

void SegmentSpline::evaluate(double t, std::span<double> out) const {
    if (!domain_.contains(t)) {
        throw Error(errc::out_of_domain, "evaluation point outside the segment domain");
    }
    evaluate_unchecked(t, out);
}

std::vector<double> SegmentSpline::evaluate(double t) const {
    std::vector<double> out(dims_);
    evaluate(t, out);
    return out;
}

std::vector<CubicPiece> SegmentSpline::pieces() const {
    const std::size_t m = knots_.size();
    std::vector<CubicPiece> out;
    if (m == 1) {
        CubicPiece piece;
        piece.x0 = piece.x1 = knots_[0];
        piece.coeffs.assign(4 * dims_, 0.0);
        for (std::size_t d = 0; d < dims_; ++d) {
            piece.coeffs[4 * d] = value(0, d);
            piece.coeffs[4 * d + 1] = deriv(0, d);
        }
        out.push_back(std::move(piece));
        return out;
    }
    out.reserve(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        CubicPiece piece;
        piece.x0 = knots_[i];
        piece.x1 = knots_[i + 1];
        piece.coeffs.assign(4 * dims_, 0.0);
        const double gap = knots_[i + 1] - knots_[i];
        for (std::size_t d = 0; d < dims_; ++d) {
            const auto c = hermite_tail(gap, value(i, d), deriv(i, d), value(i + 1, d),
                                        deriv(i + 1, d));
            piece.coeffs[4 * d] = value(i, d);
            piece.coeffs[4 * d + 1] = deriv(i, d);
            piece.coeffs[4 * d + 2] = c.c2;
            piece.coeffs[4 * d + 3] = c.c3;
        }
        out.push_back(std::move(piece));
    }
    return out;
}

double spline_functional(const DataSeries& series, std::size_t l, std::size_t r,
                         const SegmentSpline& spline, double p) {
    if (l > r || r >= series.size()) {
        throw Error(errc::invalid_argument, "invalid segment range");
    }
    const std::size_t dims = series.dims();
    std::vector<double> fx(dims);
    double data_term = 0;
    for (std::size_t i = l; i <= r; ++i) {
        spline.evaluate_unchecked(series.x(i), fx);
        for (std::size_t d = 0; d < dims; ++d) {
            const double res = (series.y(i, d) - fx[d]) / series.delta(i);
            data_term += res * res;
        }
    }
    double rough = 0;
    const auto knots = spline.knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double gap = knots[i + 1] - knots[i];
        for (std::size_t d = 0; d < dims; ++d) {
            rough += roughness_energy(gap, spline.value(i, d), spline.deriv(i, d),
                                      spline.value(i + 1, d), spline.deriv(i + 1, d));
        }
    }
    return p * data_term + (1.0 - p) * rough;
}

}  // namespace cssd
