#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace cssd;

TEST_SUITE("types") {

TEST_CASE("data series rejects invalid input before numerics") {
    CHECK_THROWS_AS(DataSeries({}, {}, 1, {}), Error);
    // unsorted / duplicate sites
    CHECK_THROWS_AS(DataSeries({1, 1}, {0, 0}, 1, {1, 1}), Error);
    CHECK_THROWS_AS(DataSeries({2, 1}, {0, 0}, 1, {1, 1}), Error);
    // non-finite entries
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DataSeries({0, nan}, {0, 0}, 1, {1, 1}), Error);
    CHECK_THROWS_AS(DataSeries({0, 1}, {0, inf}, 1, {1, 1}), Error);
    CHECK_THROWS_AS(DataSeries({0, 1}, {0, 0}, 1, {1, nan}), Error);
    // non-positive delta, with index reporting
    try {
        DataSeries({0, 1}, {0, 0}, 1, {1, 0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_positive_delta);
        CHECK(e.index() == std::size_t{1});
    }
    // shape mismatches
    CHECK_THROWS_AS(DataSeries({0, 1}, {0, 0, 0}, 1, {1, 1}), Error);
    CHECK_THROWS_AS(DataSeries({0, 1}, {0, 0}, 1, {1}), Error);
    CHECK_THROWS_AS(DataSeries({0, 1}, {}, 0, {1, 1}), Error);
}

TEST_CASE("data series component-major storage") {
    // two sites, two dimensions
    DataSeries s({0, 1}, {10, 11, 20, 21}, 2, {1, 1});
    CHECK(s.y(0, 0) == 10);
    CHECK(s.y(1, 0) == 11);
    CHECK(s.y(0, 1) == 20);
    CHECK(s.y(1, 1) == 21);
    auto c1 = s.component(1);
    CHECK(c1[0] == 20);
    CHECK(c1[1] == 21);

    auto sub = s.subset(std::vector<std::size_t>{1});
    CHECK(sub.size() == 1);
    CHECK(sub.y(0, 1) == 21);
}

TEST_CASE("gamma is positive-finite or the explicit infinite state") {
    CHECK_THROWS_AS(Gamma(0.0), Error);
    CHECK_THROWS_AS(Gamma(-1.0), Error);
    CHECK_THROWS_AS(Gamma(std::numeric_limits<double>::infinity()), Error);
    CHECK_THROWS_AS(Gamma(std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK(Gamma::infinite().is_infinite());
    CHECK_THROWS_AS(Gamma::infinite().value(), Error);
    CHECK(Gamma(2.0).value() == 2.0);
}

TEST_CASE("hyperparams require p strictly inside (0, 1)") {
    CHECK_THROWS_AS(Hyperparams(0.0, Gamma(1.0)), Error);
    CHECK_THROWS_AS(Hyperparams(1.0, Gamma(1.0)), Error);
    CHECK_THROWS_AS(Hyperparams(-0.5, Gamma(1.0)), Error);
    CHECK(Hyperparams(1e-6, Gamma::infinite()).p() == 1e-6);
}

TEST_CASE("discontinuity set invariants") {
    DataSeries s({0, 1, 2, 3, 4}, {0, 0, 0, 0, 0}, 1, {1, 1, 1, 1, 1});
    auto set = DiscontinuitySet::from_gaps(s, {1, 3});
    CHECK(set.count() == 2);
    // locations are exactly the gap midpoints
    CHECK(set.locations()[0] == (s.x(0) + s.x(1)) / 2.0);
    CHECK(set.locations()[1] == (s.x(2) + s.x(3)) / 2.0);

    CHECK_THROWS_AS(DiscontinuitySet::from_gaps(s, {0}), Error);      // below range
    CHECK_THROWS_AS(DiscontinuitySet::from_gaps(s, {5}), Error);      // above range
    CHECK_THROWS_AS(DiscontinuitySet::from_gaps(s, {2, 2}), Error);   // duplicate
    CHECK_THROWS_AS(DiscontinuitySet::from_gaps(s, {3, 1}), Error);   // unsorted
    // ceil(5/2) - 1 = 2 is the most an optimal set can hold
    CHECK_THROWS_AS(DiscontinuitySet::from_gaps(s, {1, 2, 3}), Error);
}

TEST_CASE("partition round-trip is the identity") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t n = 2 + rng() % 30;
        auto series = testsupport::random_series(rng, n, 1);
        const std::size_t bound = (n + 1) / 2 - 1;
        std::vector<std::size_t> gaps;
        for (std::size_t g = 1; g < n && gaps.size() < bound; ++g) {
            if (rng() % 3 == 0) gaps.push_back(g);
        }
        auto set = DiscontinuitySet::from_gaps(series, gaps);
        auto ranges = set.segment_ranges(n);
        REQUIRE(ranges.size() == gaps.size() + 1);
        CHECK(ranges.front().first == 0);
        CHECK(ranges.back().second == n - 1);
        // recover gap indices from segment boundaries
        std::vector<std::size_t> recovered;
        for (std::size_t j = 1; j < ranges.size(); ++j) {
            CHECK(ranges[j].first == ranges[j - 1].second + 1);
            recovered.push_back(ranges[j].first);
        }
        CHECK(recovered == gaps);
    }
}

TEST_CASE("segment spline structural checks") {
    CHECK_THROWS_AS(SegmentSpline({1, 0}, {0, 0}, {0, 0}, 1, {0, 2}), Error);
    CHECK_THROWS_AS(SegmentSpline({0, 3}, {0, 0}, {0, 0}, 1, {0, 2}), Error);
    CHECK_THROWS_AS(SegmentSpline({0, 1}, {0}, {0, 0}, 1, {0, 2}), Error);
    // Hermite data that is not a natural spline is still representable
    // (it only loses the smoothness guarantees of a fitted segment).
    SegmentSpline bent({0, 1}, {0, 0}, {1, -1}, 1, {0, 1});
    CHECK(bent.knot_count() == 2);
}

TEST_CASE("solution construction cross-checks the objective") {
    DataSeries s({0, 1, 2}, {0, 1, 0}, 1, {1, 1, 1});
    auto sol = solve_cssd(s, Hyperparams(0.5, Gamma(0.01)));
    CHECK(sol.segments().size() == sol.discontinuities().count() + 1);

    // same parts, corrupted objective
    std::vector<SegmentSpline> segs(sol.segments().begin(), sol.segments().end());
    std::vector<double> energies(sol.segment_energies().begin(), sol.segment_energies().end());
    CHECK_THROWS_AS(CssdSolution(sol.params(), sol.discontinuities(), segs, energies,
                                 sol.objective() + 1.0),
                    Error);
    // infinite gamma admits no jumps
    CHECK_THROWS_AS(CssdSolution(Hyperparams(0.5, Gamma::infinite()),
                                 sol.discontinuities(), segs, energies, sol.objective()),
                    Error);
}

}  // TEST_SUITE
