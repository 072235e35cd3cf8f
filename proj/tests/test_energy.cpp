#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace cssd;
using testsupport::rel_or_abs_err;

namespace {

double utu_entry(const RoughnessFactor& u, int i, int j) {
    return u.row0[static_cast<std::size_t>(i)] * u.row0[static_cast<std::size_t>(j)] +
           u.row1[static_cast<std::size_t>(i)] * u.row1[static_cast<std::size_t>(j)];
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("roughness factor reproduces the closed-form matrix at unit gap") {
    const double b1[4][4] = {{12, 6, -12, 6}, {6, 4, -6, 2}, {-12, -6, 12, -6}, {6, 2, -6, 4}};
    auto u = local_roughness_factor(1.0);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(utu_entry(u, i, j) == doctest::Approx(b1[i][j]).epsilon(1e-14));
        }
    }
}

TEST_CASE("factor matches the quadratic form over a wide gap range") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 300; ++iter) {
        const double d = testsupport::log_uniform(rng, 1e-3, 1e3);
        auto u = local_roughness_factor(d);
        auto b = roughness_form(d);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const double scale = std::abs(b[i][j]) > 0 ? std::abs(b[i][j]) : 12.0 / (d * d * d);
                CHECK(std::abs(utu_entry(u, i, j) - b[i][j]) <= 1e-13 * scale);
            }
        }
        // the two-dimensional null space: constants and straight lines
        for (auto v : {std::array<double, 4>{1, 0, 1, 0}, std::array<double, 4>{0, 1, d, 1}}) {
            for (const auto& row : {u.row0, u.row1}) {
                double dot = 0;
                for (int k = 0; k < 4; ++k) dot += row[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
                CHECK(std::abs(dot) <= 1e-12 / std::sqrt(d));
            }
        }
        // positive semidefiniteness: v^T B v = ||Uv||^2 >= 0
        std::array<double, 4> v{};
        for (auto& c : v) c = 2 * testsupport::u01(rng) - 1;
        CHECK(roughness_energy(d, v[0], v[1], v[2], v[3]) >= -1e-12);
    }
    CHECK_THROWS_AS(local_roughness_factor(0.0), Error);
    CHECK_THROWS_AS(local_roughness_factor(-1.0), Error);
}

TEST_CASE("roughness energy integrates a known quadratic exactly") {
    // f(x) = x^2 on [0, 1]: f'' = 2, integral of (f'')^2 is 4
    CHECK(roughness_energy(1.0, 0, 0, 1, 2) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("engine init and the first push stay at zero energy") {
    const double y0[] = {1.5};
    EnergyState state(0.0, std::span<const double>(y0, 1), 2.0, 0.5);
    CHECK(state.energies()[0] == 0.0);
    // the absorbed data row is alpha = sqrt(p)/delta
    CHECK(state.trailing_block()[0] == doctest::Approx(std::sqrt(0.5) / 2.0).epsilon(1e-15));

    const double y1[] = {-0.75};
    state.push(1.0, std::span<const double>(y1, 1), 1.0);
    CHECK(state.count() == 2);
    CHECK(state.energies()[0] == 0.0);
}

TEST_CASE("collinear points carry zero energy") {
    DataSeries s({0, 0.7, 2}, {1, 1 + 0.7 * 3, 1 + 2 * 3}, 1, {1, 1, 1});
    PrefixEnergyStream stream(s, 0, StreamDirection::forward, 0.35);
    stream.advance();
    stream.advance();
    CHECK(std::abs(stream.energies()[0]) <= 1e-24);
}

TEST_CASE("push matches the dense oracle on a hand instance") {
    DataSeries s({0, 1, 2}, {0, 1, 0}, 1, {1, 1, 1});
    PrefixEnergyStream stream(s, 0, StreamDirection::forward, 0.5);
    stream.advance();
    stream.advance();
    const double dense = oracle::dense_energy(s, 0, 2, 0.5)[0];
    CHECK(rel_or_abs_err(stream.energies()[0], dense) <= 1e-10);
    CHECK(dense > 0);
}

TEST_CASE("re-running the engine over the same prefix is bitwise identical") {
    std::mt19937_64 rng(17);
    auto s = testsupport::random_series(rng, 12, 2);
    PrefixEnergyStream incremental(s, 0, StreamDirection::forward, 0.8);
    for (std::size_t r = 1; r < s.size(); ++r) {
        incremental.advance();
        PrefixEnergyStream fresh(s, 0, StreamDirection::forward, 0.8);
        while (fresh.right() < r) fresh.advance();
        for (std::size_t d = 0; d < s.dims(); ++d) {
            CHECK(fresh.energies()[d] == incremental.energies()[d]);
        }
    }
}

TEST_CASE("functional push leaves the source state untouched") {
    const double y0[] = {0.5}, y1[] = {1.0};
    auto state = engine_init(0.0, std::span<const double>(y0, 1), 1.0, 0.5);
    auto next = engine_push(state, 1.0, std::span<const double>(y1, 1), 1.0);
    CHECK(state.count() == 1);
    CHECK(next.count() == 2);
    CHECK(state.last_x() == 0.0);
    CHECK(next.last_x() == 1.0);
}

TEST_CASE("push rejects bad input") {
    const double y[] = {0.0};
    EnergyState state(0.0, std::span<const double>(y, 1), 1.0, 0.5);
    CHECK_THROWS_AS(state.push(0.0, std::span<const double>(y, 1), 1.0), Error);
    CHECK_THROWS_AS(state.push(-1.0, std::span<const double>(y, 1), 1.0), Error);
    CHECK_THROWS_AS(state.push(1.0, std::span<const double>(y, 1), 0.0), Error);
    CHECK_THROWS_AS(EnergyState(0.0, std::span<const double>(y, 1), 1.0, 0.0), Error);
    CHECK_THROWS_AS(EnergyState(0.0, std::span<const double>(y, 1), 1.0, 1.0), Error);
}

TEST_CASE("forward streams start with two zero energies") {
    std::mt19937_64 rng(19);
    auto s = testsupport::random_series(rng, 6, 1);
    PrefixEnergyStream stream(s, 0, StreamDirection::forward, 0.5);
    CHECK(stream.energies()[0] == 0.0);
    stream.advance();
    CHECK(stream.energies()[0] == 0.0);
    stream.advance();
    CHECK(stream.energies()[0] > 0.0);
}

TEST_CASE("reverse stream equals the forward stream on mirrored data") {
    std::mt19937_64 rng(23);
    auto s = testsupport::random_series(rng, 15, 1);
    const std::size_t n = s.size();
    std::vector<double> mx(n), my(n), md(n);
    for (std::size_t i = 0; i < n; ++i) {
        mx[i] = -s.x(n - 1 - i);
        my[i] = s.y(n - 1 - i, 0);
        md[i] = s.delta(n - 1 - i);
    }
    DataSeries mirrored(mx, my, 1, md);
    PrefixEnergyStream rev(s, n - 1, StreamDirection::reverse, 0.7);
    PrefixEnergyStream fwd(mirrored, 0, StreamDirection::forward, 0.7);
    CHECK(rev.energies()[0] == fwd.energies()[0]);
    while (rev.has_next()) {
        rev.advance();
        fwd.advance();
        CHECK(rev.energies()[0] == fwd.energies()[0]);
    }
}

TEST_CASE("streams match the dense oracle on random instances") {
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 20; ++iter) {
        const std::size_t n = 3 + rng() % 18;
        const std::size_t dims = 1 + rng() % 2;
        auto s = testsupport::random_series(rng, n, dims);
        const double p = 0.05 + 0.9 * testsupport::u01(rng);
        PrefixEnergyStream fwd(s, 0, StreamDirection::forward, p);
        for (std::size_t r = 1; r < n; ++r) {
            fwd.advance();
            auto dense = oracle::dense_energy(s, 0, r, p);
            for (std::size_t d = 0; d < dims; ++d) {
                CHECK(rel_or_abs_err(fwd.energies()[d], dense[d]) <= 1e-8);
            }
        }
        PrefixEnergyStream rev(s, n - 1, StreamDirection::reverse, p);
        while (rev.has_next()) {
            rev.advance();
            auto dense = oracle::dense_energy(s, rev.left(), n - 1, p);
            for (std::size_t d = 0; d < dims; ++d) {
                CHECK(rel_or_abs_err(rev.energies()[d], dense[d]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("energies are monotone along both stream directions") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        auto s = testsupport::random_series(rng, 25, 1);
        for (auto dir : {StreamDirection::forward, StreamDirection::reverse}) {
            PrefixEnergyStream stream(s, dir == StreamDirection::forward ? 0 : s.size() - 1,
                                      dir, 0.9);
            double prev = 0;
            while (stream.has_next()) {
                stream.advance();
                const double e = stream.energies()[0];
                // compensated accumulation may wobble by an ulp at read time
                CHECK(e >= prev * (1.0 - 1e-13) - 1e-300);
                prev = e;
            }
        }
    }
}

TEST_CASE("accuracy degrades gracefully up to the mesh-ratio warning threshold") {
    std::mt19937_64 rng(97);
    for (auto [ratio, bound] : {std::pair{1e4, 1e-7}, std::pair{1e6, 1e-4}}) {
        double worst = 0;
        for (int inst = 0; inst < 8; ++inst) {
            const std::size_t n = 8 + rng() % 8;
            std::vector<double> xs(n), ys(n), deltas(n, 1.0);
            double x = 0;
            for (std::size_t i = 0; i < n; ++i) {
                x += std::exp(-std::log(ratio) * testsupport::u01(rng));
                xs[i] = x;
                ys[i] = 2 * testsupport::u01(rng) - 1;
            }
            DataSeries s(xs, ys, 1, deltas);
            const double p = 0.3 + 0.6 * testsupport::u01(rng);
            PrefixEnergyStream stream(s, 0, StreamDirection::forward, p);
            for (std::size_t r = 1; r < n; ++r) {
                stream.advance();
                const double dense = oracle::dense_energy(s, 0, r, p)[0];
                worst = std::max(worst, rel_or_abs_err(stream.energies()[0], dense));
            }
        }
        CHECK(worst <= bound);
    }
}

TEST_CASE("only gap widths enter: exact shift invariance") {
    // sites on a dyadic grid, shifted by whole numbers: both the shifted
    // sites and their differences are exact, so energies must be bitwise
    // identical
    std::mt19937_64 rng(37);
    const std::size_t n = 14;
    std::vector<double> xs(n), ys(n), deltas(n, 1.0);
    double x = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x += static_cast<double>(1 + rng() % 64) / 64.0;
        xs[i] = x;
        ys[i] = 2 * testsupport::u01(rng) - 1;
    }
    DataSeries a(xs, ys, 1, deltas);
    for (double shift : {1.0, 17.0, 512.0}) {
        std::vector<double> shifted(xs);
        for (auto& v : shifted) v += shift;
        DataSeries b(shifted, ys, 1, deltas);
        PrefixEnergyStream sa(a, 0, StreamDirection::forward, 0.6);
        PrefixEnergyStream sb(b, 0, StreamDirection::forward, 0.6);
        while (sa.has_next()) {
            sa.advance();
            sb.advance();
            CHECK(sa.energies()[0] == sb.energies()[0]);
        }
    }
}

TEST_CASE("adding a constant to one component leaves its energies unchanged") {
    std::mt19937_64 rng(41);
    auto s = testsupport::random_series(rng, 20, 1);
    std::vector<double> shifted(s.component(0).begin(), s.component(0).end());
    for (auto& v : shifted) v += 3.25;
    DataSeries t(std::vector<double>(s.xs().begin(), s.xs().end()), shifted, 1,
                 std::vector<double>(s.deltas().begin(), s.deltas().end()));
    PrefixEnergyStream sa(s, 0, StreamDirection::forward, 0.5);
    PrefixEnergyStream sb(t, 0, StreamDirection::forward, 0.5);
    while (sa.has_next()) {
        sa.advance();
        sb.advance();
        CHECK(rel_or_abs_err(sb.energies()[0], sa.energies()[0], 1e-12) <= 1e-9);
    }
}

TEST_CASE("vector energies equal independent per-component runs") {
    std::mt19937_64 rng(43);
    const std::size_t dims = 3;
    auto s = testsupport::random_series(rng, 16, dims);
    std::vector<PrefixEnergyStream> scalar_streams;
    std::vector<DataSeries> singles;
    singles.reserve(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        singles.emplace_back(std::vector<double>(s.xs().begin(), s.xs().end()),
                             std::vector<double>(s.component(d).begin(), s.component(d).end()),
                             1, std::vector<double>(s.deltas().begin(), s.deltas().end()));
    }
    for (std::size_t d = 0; d < dims; ++d) {
        scalar_streams.emplace_back(singles[d], 0, StreamDirection::forward, 0.75);
    }
    PrefixEnergyStream vec(s, 0, StreamDirection::forward, 0.75);
    while (vec.has_next()) {
        vec.advance();
        for (std::size_t d = 0; d < dims; ++d) {
            scalar_streams[d].advance();
            CHECK(vec.energies()[d] == scalar_streams[d].energies()[0]);
        }
    }
}

}  // TEST_SUITE
