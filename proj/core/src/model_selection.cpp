#include "cssd/model_selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "cssd/solver.hpp"

namespace cssd {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Search box for the unit coordinates; the open square keeps the inverse
// transforms finite.
constexpr double kUnitLo = 1e-6;
constexpr double kUnitHi = 1.0 - 1e-6;

// Half-width of the logit window mapped onto the unit interval for p;
// covers p from about 1.1e-7 to 1 - 1.1e-7.
constexpr double kLogitRange = 16.0;

std::size_t thread_cap() {
    if (const char* env = std::getenv("CSSD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

double fold_error_sum(const DataSeries& series, const std::vector<std::size_t>& fold,
                      const std::vector<std::size_t>& training,
                      const Hyperparams& params) {
    if (training.empty()) {
        throw Error(errc::degenerate_fold, "a fold holds out every point");
    }
    const DataSeries sub = series.subset(training);
    const CssdSolution model = solve_cssd(sub, params);
    double acc = 0;
    for (std::size_t i : fold) {
        const std::vector<double> pred = model.evaluate(series.x(i));
        for (std::size_t d = 0; d < series.dims(); ++d) {
            const double res = (pred[d] - series.y(i, d)) / series.delta(i);
            acc += res * res;
        }
    }
    return acc;
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw Error(errc::bad_fold_count, "fold count must lie in [2, n]");
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    // Fisher-Yates with an explicit index draw; std::shuffle's draw
    // sequence is implementation-defined and would break seed stability.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

double cv_score(const DataSeries& series,
                const std::vector<std::vector<std::size_t>>& folds,
                const Hyperparams& params) {
    const std::size_t n = series.size();
    std::vector<bool> held(n, false);
    for (const auto& fold : folds) {
        for (std::size_t i : fold) {
            if (i >= n) throw Error(errc::invalid_argument, "fold index out of range", i);
            if (held[i]) throw Error(errc::invalid_argument, "site appears in two folds", i);
            held[i] = true;
        }
    }

    std::vector<std::vector<std::size_t>> training(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<bool> out(n, false);
        for (std::size_t i : folds[f]) out[i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!out[i]) training[f].push_back(i);
        }
    }

    std::vector<double> partial(folds.size(), 0.0);
    const std::size_t workers = std::min(folds.size(), thread_cap());
    if (workers <= 1) {
        for (std::size_t f = 0; f < folds.size(); ++f) {
            partial[f] = fold_error_sum(series, folds[f], training[f], params);
        }
    } else {
        std::vector<std::exception_ptr> errors(folds.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t f = next.fetch_add(1); f < folds.size();
                     f = next.fetch_add(1)) {
                    try {
                        partial[f] = fold_error_sum(series, folds[f], training[f], params);
                    } catch (...) {
                        errors[f] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    // Fixed reduction order keeps the score bit-stable no matter how the
    // folds were scheduled.
    double total = 0;
    for (double v : partial) total += v;
    return total / static_cast<double>(n);
}

double gamma_to_unit(double gamma) {
    if (!(gamma > 0) || !std::isfinite(gamma)) {
        throw Error(errc::invalid_gamma, "gamma must be positive and finite");
    }
    // Reciprocal branch above 1 avoids evaluating atan near its limit.
    if (gamma <= 1) return std::atan(gamma) / kHalfPi;
    return 1.0 - std::atan(1.0 / gamma) / kHalfPi;
}

double unit_to_gamma(double t) {
    if (!(t > 0) || !(t < 1)) {
        throw Error(errc::invalid_argument, "unit coordinate must lie strictly inside (0, 1)");
    }
    if (t <= 0.5) return std::tan(kHalfPi * t);
    return 1.0 / std::tan(kHalfPi * (1.0 - t));
}

double p_to_unit(double p) {
    if (!(p > 0) || !(p < 1)) throw Error(errc::invalid_p, "p must lie strictly between 0 and 1");
    const double logit = std::log(p) - std::log1p(-p);
    return std::clamp(0.5 + logit / (2.0 * kLogitRange), kUnitLo, kUnitHi);
}

double unit_to_p(double u) {
    if (!(u > 0) || !(u < 1)) {
        throw Error(errc::invalid_argument, "unit coordinate must lie strictly inside (0, 1)");
    }
    const double logit = (u - 0.5) * 2.0 * kLogitRange;
    return 1.0 / (1.0 + std::exp(-logit));
}

namespace {

struct SearchState {
    const DataSeries* series;
    const std::vector<std::vector<std::size_t>>* folds;
    std::size_t budget;
    std::size_t evaluations = 0;
    std::map<std::pair<double, double>, double> cache;  // (p, gamma or inf) -> score
    std::optional<Hyperparams> best_params;
    double best_score = std::numeric_limits<double>::infinity();

    // Scores a candidate, spending budget only on uncached points.
    // Returns nothing once the budget is exhausted.
    std::optional<double> score(const Hyperparams& hp) {
        const double gkey = hp.gamma().is_infinite()
                                ? std::numeric_limits<double>::infinity()
                                : hp.gamma().value();
        const auto key = std::make_pair(hp.p(), gkey);
        if (const auto it = cache.find(key); it != cache.end()) return it->second;
        if (evaluations >= budget) return std::nullopt;
        ++evaluations;
        const double s = cv_score(*series, *folds, hp);
        cache.emplace(key, s);
        if (s < best_score) {
            best_score = s;
            best_params = hp;
        }
        return s;
    }
};

// Nelder-Mead on the unit square (or unit interval) in the transformed
// coordinates. Plain reflect/expand/contract/shrink; stops on budget,
// simplex collapse, or iteration cap.
void nelder_mead(const std::vector<double>& origin,
                 const std::function<std::optional<double>(const std::vector<double>&)>& f) {
    const std::size_t dim = origin.size();
    std::vector<std::vector<double>> simplex;
    std::vector<double> scores;
    auto clamp_point = [](std::vector<double> pt) {
        for (double& v : pt) v = std::clamp(v, kUnitLo, kUnitHi);
        return pt;
    };
    auto try_add = [&](std::vector<double> pt) {
        pt = clamp_point(std::move(pt));
        const auto s = f(pt);
        if (!s) return false;
        simplex.push_back(std::move(pt));
        scores.push_back(*s);
        return true;
    };
    if (!try_add(origin)) return;
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> pt = origin;
        pt[d] += pt[d] > 0.5 ? -0.08 : 0.08;
        if (!try_add(pt)) return;
    }

    constexpr int kMaxIter = 200;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double spread = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            spread = std::max(spread, std::abs(simplex[worst][d] - simplex[best][d]));
        }
        if (spread < 1e-4) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
        }
        for (double& v : centroid) v /= static_cast<double>(simplex.size() - 1);

        auto blend = [&](double coef) {
            std::vector<double> pt(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                pt[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
            }
            return clamp_point(std::move(pt));
        };

        const auto reflected = blend(-1.0);
        const auto fr = f(reflected);
        if (!fr) return;
        if (*fr < scores[best]) {
            const auto expanded = blend(-2.0);
            const auto fe = f(expanded);
            if (!fe) return;
            if (*fe < *fr) {
                simplex[worst] = expanded;
                scores[worst] = *fe;
            } else {
                simplex[worst] = reflected;
                scores[worst] = *fr;
            }
            continue;
        }
        if (*fr < scores[second_worst]) {
            simplex[worst] = reflected;
            scores[worst] = *fr;
            continue;
        }
        const auto contracted = blend(0.5);
        const auto fc = f(contracted);
        if (!fc) return;
        if (*fc < scores[worst]) {
            simplex[worst] = contracted;
            scores[worst] = *fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < dim; ++d) {
                simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
            }
            const auto fs = f(simplex[i]);
            if (!fs) return;
            scores[i] = *fs;
        }
    }
}

}  // namespace

SelectionResult select_params(const DataSeries& series, std::size_t k,
                              std::uint64_t seed, const Hyperparams& start,
                              std::size_t budget) {
    if (budget < 1) {
        throw Error(errc::invalid_argument, "evaluation budget must be at least 1");
    }
    const auto folds = kfold_split(series.size(), k, seed);

    SearchState state;
    state.series = &series;
    state.folds = &folds;
    state.budget = budget;

    // The start is always scored, so the result can never be worse.
    state.score(start);

    // Coarse stage: the classical-spline candidate, a log grid over the
    // jump penalty at the starting p, then a p sweep at the best penalty
    // found so far.
    state.score(Hyperparams(start.p(), Gamma::infinite()));
    for (double g : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
        state.score(Hyperparams(start.p(), Gamma(g)));
    }
    const Gamma coarse_gamma = state.best_params ? state.best_params->gamma()
                                                 : start.gamma();
    for (double p : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
        state.score(Hyperparams(p, coarse_gamma));
    }

    // Local refinement around the incumbent.
    const Hyperparams incumbent = state.best_params.value_or(start);
    if (incumbent.gamma().is_infinite()) {
        nelder_mead({p_to_unit(incumbent.p())},
                    [&](const std::vector<double>& pt) {
                        return state.score(Hyperparams(unit_to_p(pt[0]), Gamma::infinite()));
                    });
    } else {
        nelder_mead({p_to_unit(incumbent.p()), gamma_to_unit(incumbent.gamma().value())},
                    [&](const std::vector<double>& pt) {
                        return state.score(Hyperparams(unit_to_p(pt[0]),
                                                       Gamma(unit_to_gamma(pt[1]))));
                    });
    }

    return SelectionResult{state.best_params.value_or(start), state.best_score,
                           state.evaluations};
}

}  // namespace cssd
