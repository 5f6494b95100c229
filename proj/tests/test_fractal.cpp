#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rpl/fractal.hpp"

using namespace rpl;

TEST_CASE("degenerate cantor product is a single atom in the region") {
    const DiscreteMeasure mu = generate_cantor_product(0.0, 0.0, 0.0, 3, 42);
    REQUIRE(mu.size() == 1);
    CHECK(mu.weights[0] == 1.0);
    CHECK(mu.points[0].in_standard_region());
    CHECK(mu.generation_scale == 0.0);
}

TEST_CASE("cantor product sizes, weights and membership") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 1);
    REQUIRE(mu.size() == 4096);  // 8^4
    for (double w : mu.weights) CHECK(w == 1.0 / 4096.0);
    for (const Point3& p : mu.points) CHECK(p.in_standard_region());
    CHECK(mu.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mu.generation_scale > 0.0);
}

TEST_CASE("cantor product rejects bad exponents and depth") {
    CHECK_THROWS_AS(generate_cantor_product(1.1, 0.5, 0.5, 3, 0), ValidationError);
    CHECK_THROWS_AS(generate_cantor_product(-0.1, 0.5, 0.5, 3, 0), ValidationError);
    CHECK_THROWS_AS(generate_cantor_product(0.5, 0.5, 0.5, 0, 0), ValidationError);
}

TEST_CASE("cantor generation is deterministic") {
    const DiscreteMeasure a = generate_cantor_product(0.7, 0.4, 0.9, 5, 9);
    const DiscreteMeasure b = generate_cantor_product(0.7, 0.4, 0.9, 5, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i] == b.points[i]);
        CHECK(a.weights[i] == b.weights[i]);
    }
    CHECK(a.generation_scale == b.generation_scale);
}

TEST_CASE("cantor product box dimension matches the nominal exponent sum") {
    const int depth = 5;
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, depth, 2);
    // ladder matched to the construction: boxes of one level-j cell width hold
    // exactly one cell each, so counts divide by 8 per level
    const double side = mu.generation_scale / std::sqrt(3.0);
    std::vector<std::size_t> counts;
    const double dim = oracles::aligned_box_dim_3d(mu.points, 4.0 * side, 4.0,
                                                    depth - 1, 0.5 * side, &counts);
    for (int j = 1; j < depth; ++j)
        CHECK(counts[j - 1] == (std::size_t{1} << (3 * (depth - j))));
    CHECK(dim == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("single-map ifs collapses to one point") {
    IfsSpec spec;
    spec.maps = {{0.5, {0.1, 0.2, 0.3}}};
    spec.depth = 6;
    const DiscreteMeasure mu = generate_ifs(spec, 3);
    REQUIRE(mu.size() == 1);
    CHECK(mu.weights[0] == 1.0);
    CHECK(mu.points[0].in_standard_region());
}

TEST_CASE("planar four-map ifs fills a two-dimensional cloud") {
    IfsSpec spec;
    spec.maps = {{0.5, {0.0, 0.0, 0.0}},
                 {0.5, {0.5, 0.0, 0.0}},
                 {0.5, {0.0, 0.5, 0.0}},
                 {0.5, {0.5, 0.5, 0.0}}};
    spec.depth = 7;
    const DiscreteMeasure mu = generate_ifs(spec, 4);
    REQUIRE(mu.size() == 16384);
    // depth-7 cloud is a 128x128 lattice in a plane slice; count on a ladder
    // aligned to the lattice spacing
    const double spacing = 0.25 / 127.0;
    const double dim =
        oracles::aligned_box_dim_3d(mu.points, 2.0 * spacing, 2.0, 6, 0.5 * spacing);
    CHECK(dim == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("ifs generation is deterministic and validated") {
    IfsSpec spec;
    spec.maps = {{0.4, {0.0, 0.0, 0.0}}, {0.4, {0.6, 0.3, 0.2}}, {0.4, {0.1, 0.6, 0.5}}};
    spec.depth = 6;
    const DiscreteMeasure a = generate_ifs(spec, 5);
    const DiscreteMeasure b = generate_ifs(spec, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);

    IfsSpec bad = spec;
    bad.maps[0].ratio = 1.0;
    CHECK_THROWS_AS(generate_ifs(bad, 5), ValidationError);
    bad = spec;
    bad.depth = 0;
    CHECK_THROWS_AS(generate_ifs(bad, 5), ValidationError);
}

TEST_CASE("per-axis ifs builds the product cloud") {
    IfsSpec spec;
    spec.maps = {{0.25, {0.0, 0.0, 0.0}}, {0.25, {0.75, 0.75, 0.75}}};
    spec.depth = 2;
    spec.per_axis = true;
    const DiscreteMeasure mu = generate_ifs(spec, 6);
    CHECK(mu.size() == 64);  // (2^2)^3
    for (const Point3& p : mu.points) CHECK(p.in_standard_region());
}

TEST_CASE("plane slice is a lattice at the region mid-height") {
    const DiscreteMeasure mu = generate_plane_slice(64, 7);
    REQUIRE(mu.size() == 64 * 64);
    for (const Point3& p : mu.points) {
        CHECK(p.r == doctest::Approx(0.75));
        CHECK(p.in_standard_region());
    }
    CHECK(mu.generation_scale > 0.0);
    CHECK_THROWS_AS(generate_plane_slice(1, 7), ValidationError);
}

TEST_CASE("frostman constant of a single atom") {
    const DiscreteMeasure mu = generate_cantor_product(0.0, 0.0, 0.0, 1, 0);
    const std::vector<double> radii = {0.015625, 0.125, 0.5};
    const FrostmanReport report =
        estimate_frostman(mu, 1.0, radii, SamplingPolicy{});
    CHECK(report.c_f == doctest::Approx(1.0 / 0.015625));
    CHECK(report.witness_radius == 0.015625);
}

TEST_CASE("frostman scan rejects bad radii and exponents") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 3, 0);
    CHECK_THROWS_AS(estimate_frostman(mu, 1.5, {mu.generation_scale / 2.0},
                                      SamplingPolicy{}),
                    ValidationError);
    CHECK_THROWS_AS(estimate_frostman(mu, 0.0, {0.125}, SamplingPolicy{}),
                    ValidationError);
    CHECK_THROWS_AS(estimate_frostman(mu, 3.5, {0.125}, SamplingPolicy{}),
                    ValidationError);
    CHECK_THROWS_AS(estimate_frostman(mu, 1.5, {}, SamplingPolicy{}), ValidationError);
    CHECK_THROWS_AS(estimate_frostman(mu, 1.5, {2.0}, SamplingPolicy{}), ValidationError);
}

TEST_CASE("frostman constant is stable across dyadic radii for the cantor product") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 0);
    std::vector<double> radii;
    for (double r = 0.5; r >= mu.generation_scale; r *= 0.5) radii.push_back(r);

    // per-radius maxima of the scanned ratio stay within a factor 4
    double lo = 1e300, hi = 0.0;
    for (double r : radii) {
        const FrostmanReport rep = estimate_frostman(mu, 1.5, {r}, SamplingPolicy{});
        lo = std::min(lo, rep.c_f);
        hi = std::max(hi, rep.c_f);
    }
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("frostman constant growth across depths stays bounded") {
    const FrostmanReport d3 = estimate_frostman(
        generate_cantor_product(0.5, 0.5, 0.5, 3, 0), 1.5, {0.125, 0.25, 0.5},
        SamplingPolicy{});
    SamplingPolicy subsample;  // the depth-6 cloud is too large for all centers
    subsample.mode = SamplingPolicy::Mode::RandomSubsample;
    subsample.sample_size = 512;
    subsample.seed = 99;
    const FrostmanReport d6 = estimate_frostman(
        generate_cantor_product(0.5, 0.5, 0.5, 6, 0), 1.5, {0.125, 0.25, 0.5},
        subsample, 2);
    CHECK(d6.c_f <= 2.0 * d3.c_f);
}

TEST_CASE("frostman ratio obeys the exponent monotonicity identity") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 3, 0);
    const double r = 0.125;
    const FrostmanReport at_s = estimate_frostman(mu, 1.0, {r}, SamplingPolicy{});
    const FrostmanReport at_s2 = estimate_frostman(mu, 1.7, {r}, SamplingPolicy{});
    CHECK(at_s2.c_f >= at_s.c_f / std::pow(r, 0.7) * (1.0 - 1e-12));
}

TEST_CASE("frostman subsample policy is deterministic in the seed") {
    const DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 4, 0);
    SamplingPolicy policy;
    policy.mode = SamplingPolicy::Mode::RandomSubsample;
    policy.sample_size = 64;
    policy.seed = 77;
    const FrostmanReport a = estimate_frostman(mu, 1.5, {0.125}, policy);
    const FrostmanReport b = estimate_frostman(mu, 1.5, {0.125}, policy);
    CHECK(a.c_f == b.c_f);
    CHECK(a.c_f <= estimate_frostman(mu, 1.5, {0.125}, SamplingPolicy{}).c_f);
}

TEST_CASE("measure validation catches broken invariants") {
    DiscreteMeasure mu = generate_cantor_product(0.5, 0.5, 0.5, 2, 0);
    DiscreteMeasure bad = mu;
    bad.weights[0] += 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = mu;
    bad.points[0] = Point3(0.4, 0.0, 0.75);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = mu;
    bad.weights.pop_back();
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = DiscreteMeasure{};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
