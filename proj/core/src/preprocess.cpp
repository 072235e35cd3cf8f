#include "cssd/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cssd {

namespace {

struct Merged {
    std::vector<double> xs;
    std::vector<double> ys;  // component-major
    std::vector<double> deltas;
};

// Inverse-variance merge of the sorted (non-decreasing) columns. Groups
// of exactly equal x collapse to a single site with
//   y = sum(y_i / delta_i^2) / sum(1 / delta_i^2)   componentwise,
//   delta = (sum 1 / delta_i^2)^(-1/2),
// which keeps the weighted least-squares data term of the group intact.
Merged merge_sorted(const std::vector<double>& xs, const std::vector<double>& ys,
                    std::size_t dims, const std::vector<double>& deltas) {
    const std::size_t n = xs.size();
    Merged out;
    out.xs.reserve(n);
    out.deltas.reserve(n);
    std::vector<std::vector<double>> comps(dims);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && xs[j] == xs[i]) ++j;
        if (j == i + 1) {
            out.xs.push_back(xs[i]);
            out.deltas.push_back(deltas[i]);
            for (std::size_t d = 0; d < dims; ++d) comps[d].push_back(ys[d * n + i]);
        } else {
            double weight = 0;
            for (std::size_t k = i; k < j; ++k) weight += 1.0 / (deltas[k] * deltas[k]);
            out.xs.push_back(xs[i]);
            out.deltas.push_back(1.0 / std::sqrt(weight));
            for (std::size_t d = 0; d < dims; ++d) {
                double acc = 0;
                for (std::size_t k = i; k < j; ++k) {
                    acc += ys[d * n + k] / (deltas[k] * deltas[k]);
                }
                comps[d].push_back(acc / weight);
            }
        }
        i = j;
    }
    const std::size_t m = out.xs.size();
    out.ys.resize(m * dims);
    for (std::size_t d = 0; d < dims; ++d) {
        std::copy(comps[d].begin(), comps[d].end(), out.ys.begin() + static_cast<std::ptrdiff_t>(d * m));
    }
    return out;
}

}  // namespace

DataSeries validate_and_sort(std::vector<RawPoint> raw) {
    if (raw.empty()) throw Error(errc::empty_input, "no input points");
    const std::size_t dims = raw.front().y.size();
    if (dims == 0) throw Error(errc::invalid_argument, "points need at least one observation");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const RawPoint& pt = raw[i];
        if (!std::isfinite(pt.x)) throw Error(errc::non_finite_value, "x is not finite", i);
        if (pt.y.size() != dims) {
            throw Error(errc::invalid_argument, "points have inconsistent dimensions", i);
        }
        for (double v : pt.y) {
            if (!std::isfinite(v)) throw Error(errc::non_finite_value, "y is not finite", i);
        }
        if (pt.delta) {
            if (!std::isfinite(*pt.delta)) throw Error(errc::non_finite_value, "delta is not finite", i);
            if (*pt.delta <= 0) throw Error(errc::non_positive_delta, "delta must be positive", i);
        }
    }
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&raw](std::size_t a, std::size_t b) { return raw[a].x < raw[b].x; });

    const std::size_t n = raw.size();
    std::vector<double> xs(n), deltas(n), ys(n * dims);
    for (std::size_t j = 0; j < n; ++j) {
        const RawPoint& pt = raw[order[j]];
        xs[j] = pt.x;
        deltas[j] = pt.delta.value_or(1.0);
        for (std::size_t d = 0; d < dims; ++d) ys[d * n + j] = pt.y[d];
    }
    return merge_coincident(xs, ys, dims, deltas);
}

DataSeries merge_coincident(const std::vector<double>& xs,
                            const std::vector<double>& ys_by_component,
                            std::size_t dims, const std::vector<double>& deltas) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] < xs[i - 1]) {
            throw Error(errc::non_increasing_x, "input to merge must be sorted", i);
        }
    }
    Merged merged = merge_sorted(xs, ys_by_component, dims, deltas);
    return DataSeries(std::move(merged.xs), std::move(merged.ys), dims,
                      std::move(merged.deltas));
}

double mesh_ratio(const DataSeries& series) {
    if (series.size() < 2) {
        throw Error(errc::too_few_points, "mesh ratio needs at least two sites");
    }
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = 0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double d = series.x(i) - series.x(i - 1);
        min_gap = std::min(min_gap, d);
        max_gap = std::max(max_gap, d);
    }
    return max_gap / min_gap;
}

DataSeries bin_to_mesh_ratio(const DataSeries& series, double threshold) {
    if (!(threshold >= 1)) {
        throw Error(errc::invalid_argument, "mesh-ratio threshold must be at least 1");
    }
    const std::size_t dims = series.dims();
    std::vector<double> xs(series.xs().begin(), series.xs().end());
    std::vector<double> deltas(series.deltas().begin(), series.deltas().end());
    std::vector<std::vector<double>> rows(series.size(), std::vector<double>(dims));
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t d = 0; d < dims; ++d) rows[i][d] = series.y(i, d);
    }
    auto ratio = [&xs]() {
        double min_gap = std::numeric_limits<double>::infinity();
        double max_gap = 0;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
            max_gap = std::max(max_gap, xs[i] - xs[i - 1]);
        }
        return max_gap / min_gap;
    };
    while (xs.size() >= 2 && ratio() > threshold) {
        std::size_t best = 1;
        for (std::size_t i = 2; i < xs.size(); ++i) {
            if (xs[i] - xs[i - 1] < xs[best] - xs[best - 1]) best = i;
        }
        const std::size_t a = best - 1, b = best;
        const double wa = 1.0 / (deltas[a] * deltas[a]);
        const double wb = 1.0 / (deltas[b] * deltas[b]);
        const double w = wa + wb;
        xs[a] = (wa * xs[a] + wb * xs[b]) / w;
        for (std::size_t d = 0; d < dims; ++d) {
            rows[a][d] = (wa * rows[a][d] + wb * rows[b][d]) / w;
        }
        deltas[a] = 1.0 / std::sqrt(w);
        xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(b));
        deltas.erase(deltas.begin() + static_cast<std::ptrdiff_t>(b));
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(b));
    }
    return DataSeries::from_rows(std::move(xs), rows, std::move(deltas));
}

}  // namespace cssd
