#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rpl/dimension.hpp"
#include "rpl/fractal.hpp"
#include "rpl/rng.hpp"

using namespace rpl;

namespace {
const PlaneHeight kRef(1.0 / std::sqrt(2.0));
}

TEST_CASE("box count basics") {
    CHECK(box_count({{0.3, 0.7}}, 0.125) == 1);
    CHECK(box_count({{0.3, 0.7}}, 0.015625) == 1);
    // separated by more than delta*sqrt(2) in both coordinates
    CHECK(box_count({{0.0, 0.0}, {0.5, 0.5}}, 0.25) == 2);
    CHECK(box_count({}, 0.25) == 0);
    CHECK_THROWS_AS(box_count({{0.0, 0.0}}, 0.0), ValidationError);
}

TEST_CASE("box count on a full lattice") {
    for (int k : {2, 3, 4}) {
        const long n = 1L << k;
        const double delta = 1.0 / static_cast<double>(n);
        std::vector<ProjectedPoint> pts;
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                pts.push_back({static_cast<double>(i) * delta,
                               static_cast<double>(j) * delta});
        CHECK(box_count(pts, delta) == static_cast<std::size_t>(n * n));
    }
}

TEST_CASE("box count respects the half-open boundary") {
    // a point exactly on a box edge belongs to the box on its right
    CHECK(box_count({{0.25, 0.0}, {0.249999, 0.0}}, 0.25) == 2);
    CHECK(box_count({{-0.25, 0.0}, {0.0, 0.0}}, 0.25) == 2);
    CHECK(box_count({{-1e-18, 0.0}, {0.0, 0.0}}, 0.25) == 2);
}

TEST_CASE("box series validation") {
    BoxCountSeries series;
    series.scales = {0.03125, 0.0625, 0.125, 0.25};
    series.counts = {100, 40, 12, 4};
    CHECK_NOTHROW(series.validate());
    BoxCountSeries bad = series;
    bad.counts[3] = 50;  // counts must not increase with the scale
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = series;
    bad.scales[0] = 0.03;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = series;
    bad.counts[0] = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("slope estimation on exact power laws") {
    BoxCountSeries flat;
    flat.scales = {0.015625, 0.03125, 0.0625, 0.125, 0.25};
    flat.counts = {1, 1, 1, 1, 1};
    CHECK(estimate_dim(flat) == 0.0);

    BoxCountSeries square;
    square.scales = flat.scales;
    for (double d : square.scales)
        square.counts.push_back(static_cast<std::size_t>(std::llround(1.0 / (d * d))));
    CHECK(estimate_dim(square) == doctest::Approx(2.0).epsilon(1e-12));

    BoxCountSeries narrow;
    narrow.scales = {0.125, 0.25};
    narrow.counts = {2, 1};
    CHECK_THROWS_AS(estimate_dim(narrow), ValidationError);
}

TEST_CASE("middle-half cantor dust has dimension about one") {
    // two ratio-1/4 factors on [0,1], embedded with independent axes; kept raw
    // so the cell boundaries stay aligned with the dyadic boxes
    std::vector<double> axis = {0.5};
    for (int d = 0; d < 8; ++d) {
        std::vector<double> next;
        for (double u : axis) next.push_back(0.25 * u);
        for (double u : axis) next.push_back(0.25 * u + 0.75);
        axis = std::move(next);
    }
    std::vector<ProjectedPoint> pts;
    pts.reserve(axis.size() * axis.size());
    for (double x : axis)
        for (double y : axis) pts.push_back({x, y});
    BoxCountSeries series;
    for (double d = 1.0 / 1024.0; d <= 0.125 * 1.0001; d *= 2.0) {
        series.scales.push_back(d);
        series.counts.push_back(box_count(pts, d));
    }
    CHECK(estimate_dim(series) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bound curves at the pinned values") {
    const BoundCurves at_half = theoretical_bounds(1.5);
    CHECK(at_half.tangency == doctest::Approx(1.5));

    const BoundCurves at_three = theoretical_bounds(3.0);
    CHECK(at_three.tangency == doctest::Approx(2.0));
    CHECK(at_three.restriction == doctest::Approx(2.0));

    const BoundCurves crossover = theoretical_bounds(2.25);
    CHECK(crossover.tangency == doctest::Approx(1.75));
    CHECK(crossover.restriction == doctest::Approx(1.75));

    CHECK(theoretical_bounds(1.0).potential == doctest::Approx(1.0));
    CHECK(theoretical_bounds(0.5).potential == doctest::Approx(0.5));
    CHECK(theoretical_bounds(0.5).restriction == doctest::Approx(0.5));

    CHECK_THROWS_AS(theoretical_bounds(-0.1), ValidationError);
    CHECK_THROWS_AS(theoretical_bounds(3.1), ValidationError);
}

TEST_CASE("bound dominance on a dense grid") {
    for (int i = 0; i <= 1000; ++i) {
        const double s = 3.0 * static_cast<double>(i) / 1000.0;
        const BoundCurves b = theoretical_bounds(s);
        if (s <= 1.5) CHECK(b.tangency == doctest::Approx(s));
        if (s >= 1.0 && s <= 2.25) CHECK(b.tangency >= b.restriction - 1e-12);
        // the restriction curve only beats the trivial floor from 4/3 on
        if (s >= 4.0 / 3.0 && s <= 2.25) CHECK(b.restriction >= b.potential - 1e-12);
        CHECK(b.tangency >= b.potential - 1e-12);
    }
}

TEST_CASE("sweep of a single atom is flat zero") {
    const DiscreteMeasure mu = generate_cantor_product(0.0, 0.0, 0.0, 1, 0);
    const SweepReport report = sweep(mu, kRef, 64, 1.0 / 256.0, 0.125, 0.0, 2);
    for (double d : report.dims) CHECK(d == 0.0);
    CHECK(report.median() == 0.0);
    CHECK(report.bounds.tangency == 0.0);
}

TEST_CASE("sweep validates its scale window") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 0);
    CHECK_THROWS_AS(sweep(mu, kRef, 64, mu.generation_scale, 0.125, 1.5),
                    ValidationError);
    CHECK_THROWS_AS(sweep(mu, kRef, 64, 1.0 / 256.0, 0.5, 1.5), ValidationError);
    CHECK_THROWS_AS(sweep(mu, kRef, 32, 1.0 / 256.0, 0.125, 1.5), ValidationError);
    CHECK_THROWS_AS(sweep(mu, kRef, 64, 0.01, 0.125, 1.5), ValidationError);
}

TEST_CASE("sweep is reproducible across worker counts") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 0);
    const SweepReport r1 = sweep(mu, kRef, 64, 1.0 / 128.0, 0.125, 1.5, 1);
    const SweepReport r4 = sweep(mu, kRef, 64, 1.0 / 128.0, 0.125, 1.5, 4);
    REQUIRE(r1.dims.size() == r4.dims.size());
    for (std::size_t i = 0; i < r1.dims.size(); ++i) CHECK(r1.dims[i] == r4.dims[i]);
    CHECK(r1.median() == r4.median());
}

TEST_CASE("sweep dims vary slowly along the angle grid") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 5, 0);
    const SweepReport report = sweep(mu, kRef, 64, 1.0 / 256.0, 0.125, 1.5, 2);
    for (std::size_t i = 0; i < report.dims.size(); ++i) {
        const double next = report.dims[(i + 1) % report.dims.size()];
        CHECK(std::abs(report.dims[i] - next) <= 0.5);
    }
}

TEST_CASE("projection does not raise the estimated dimension") {
    const int depth = 5;
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, depth, 0);
    const double side = mu.generation_scale / std::sqrt(3.0);
    const double dim3 = oracles::aligned_box_dim_3d(mu.points, 4.0 * side, 4.0,
                                                     depth - 1, 0.5 * side);
    const SweepReport report = sweep(mu, kRef, 64, 1.0 / 256.0, 0.125, 1.5, 2);
    for (double d : report.dims) CHECK(d <= dim3 + 0.1);
}

TEST_CASE("sweep percentiles are consistent with the dims array") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 0);
    const SweepReport report = sweep(mu, kRef, 128, 1.0 / 128.0, 0.125, 1.5, 2);
    std::vector<double> sorted = report.dims;
    std::sort(sorted.begin(), sorted.end());
    CHECK(report.percentiles.p05 >= sorted.front());
    CHECK(report.percentiles.p95 <= sorted.back());
    CHECK(report.percentiles.p10 <= report.percentiles.p50);
    CHECK(report.percentiles.p50 <= report.percentiles.p90);
    CHECK(report.fraction_at_least(sorted.front()) == 1.0);
    for (double d : report.dims) {
        CHECK(d >= 0.0);
        CHECK(d <= 2.0);
    }
}
