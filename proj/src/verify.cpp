#include "rpl/verify.hpp"

#include <algorithm>
#include <cmath>

#include "rpl/io.hpp"

namespace rpl {

ProjectedPoint project_reference(PlaneHeight t, Angle theta, const Vec3& z) {
    return project(t, theta, z);
}

ProjectedPoint project_faulty(PlaneHeight t, Angle theta, const Vec3& z) {
    const double tv = t.value();
    const double c = std::sqrt(1.0 - tv * tv);
    const double ct = std::cos(theta.radians());
    const double st = std::sin(theta.radians());
    const Vec3 e1{-st, ct, 0.0};
    const Vec3 e2{tv * ct, -tv * st, -c};  // sign error in the second component
    return {z.dot(e1), z.dot(e2)};
}

Point3 random_region_point(Rng& rng) {
    const double rho = StandardRegion::x_radius * std::sqrt(rng.next_double());
    const Vec2 dir = rng.unit_vec2();
    return {dir * rho, rng.uniform(StandardRegion::r_min, StandardRegion::r_max)};
}

NearTangentPair random_near_tangent_pair(Rng& rng, double ratio_lo, double ratio_hi) {
    const Point3 a = random_region_point(rng);
    const double dist = std::exp(rng.uniform(std::log(1e-3), std::log(0.5)));
    const double ratio = std::exp(rng.uniform(std::log(ratio_lo), std::log(ratio_hi)));
    const double delta = dist * ratio;

    // split dist^2 between the center offset p and radius offset q so that
    // p - q = +-level with level < sqrt(2)*delta (the non-empty threshold)
    const double cap = 0.9 * std::min(std::sqrt(2.0) * delta, dist);
    const double bias = rng.next_double();
    const double level = (rng.next_double() < 0.5 ? 1.0 : -1.0) * cap * bias * bias;
    const double p = 0.5 * (level + std::sqrt(2.0 * dist * dist - level * level));
    const double q = p - level;

    const Vec2 dir = rng.unit_vec2();
    const double rsign = rng.next_double() < 0.5 ? 1.0 : -1.0;
    NearTangentPair pair;
    pair.a = a;
    pair.b = Point3{a.x + dir * p, a.r + rsign * q};
    pair.delta = delta;
    pair.dist = dist;
    return pair;
}

ConjugationStats conjugation_residual(long samples_per_height, std::uint64_t seed,
                                      const Projector& projector) {
    ConjugationStats stats;
    stats.heights_tested = {0.1, -0.1, 0.5, -0.5, 0.9, -0.9, 1.0 / std::sqrt(2.0)};
    Rng rng(seed);
    const PlaneHeight reference(1.0 / std::sqrt(2.0));
    for (double tv : stats.heights_tested) {
        const PlaneHeight t(tv);
        const ReductionMaps maps = reduction_maps(t);
        for (long i = 0; i < samples_per_height; ++i) {
            const Angle theta(rng.uniform(0.0, kTwoPi));
            const Vec3 z{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(-1.0, 1.0)};
            const ProjectedPoint direct = projector(t, theta, z);
            const ProjectedPoint via =
                project_reference(reference, theta, maps.global.apply(z));
            const Vec2 mapped = maps.plane(theta).apply(via.vec2());
            const double res =
                std::sqrt((mapped.x - direct.u) * (mapped.x - direct.u) +
                          (mapped.y - direct.v) * (mapped.y - direct.v));
            stats.max_residual = std::max(stats.max_residual, res);
        }
    }
    return stats;
}

ImplicationStats tangency_implication(long samples, std::uint64_t seed,
                                      const Projector& projector) {
    ImplicationStats stats;
    stats.samples = samples;
    Rng rng(seed);
    const PlaneHeight t(1.0 / std::sqrt(2.0));
    for (long i = 0; i < samples; ++i) {
        const Point3 a = random_region_point(rng);
        const Point3 b = random_region_point(rng);
        if (a == b) continue;
        const Angle theta(rng.uniform(0.0, kTwoPi));
        const ProjectedPoint pa = projector(t, theta, a.vec3());
        const ProjectedPoint pb = projector(t, theta, b.vec3());
        // delta chosen so the hypothesis |pa - pb| <= delta holds, tightest at
        // equality one sample in four
        const double gap = pa.distance(pb);
        const double delta =
            i % 4 == 0 ? gap : gap * (1.0 + rng.next_double());
        if (delta == 0.0) continue;
        const double level = tangency_level(a, b);
        if (level > 2.0 * delta) ++stats.violations;
        stats.max_ratio = std::max(stats.max_ratio, level / (2.0 * delta));
    }
    return stats;
}

WindowStats window_calibration(long pairs, std::uint64_t seed) {
    WindowStats stats;
    stats.pairs = pairs;
    Rng rng(seed);
    const PlaneHeight t(1.0 / std::sqrt(2.0));
    for (long i = 0; i < pairs; ++i) {
        const NearTangentPair pair = random_near_tangent_pair(rng, 1e-3, 0.5);
        // about 8 grid samples across the narrowest expected arc width delta/dist
        const double want = 16.0 * std::acos(-1.0) / (pair.delta / pair.dist);
        const long resolution =
            std::clamp(static_cast<long>(std::ceil(want)), 1001L, 200001L);
        const AngleWindowScan scan =
            angle_window_scan(t, pair.a, pair.b, pair.delta, resolution);
        if (scan.components > 1) ++stats.multi_component;
        if (scan.window.empty) continue;
        const double c =
            scan.window.length() * std::max(1.0, pair.dist / pair.delta);
        stats.calibrated_c = std::max(stats.calibrated_c, c);
    }
    return stats;
}

VerifyResult run_verify(const VerifyOptions& options) {
    const Projector projector =
        options.inject_fault ? Projector(project_faulty) : Projector(project_reference);
    VerifyResult result;

    {
        const ConjugationStats stats =
            conjugation_residual(options.conjugation_samples, options.seed, projector);
        VerifyCheck check;
        check.name = "conjugation identity";
        check.pass = stats.max_residual <= kConjugationTolerance;
        check.detail = "max residual " + format_double(stats.max_residual) +
                       " (tolerance 1e-12, " +
                       std::to_string(options.conjugation_samples) +
                       " samples per height)";
        result.checks.push_back(check);
    }
    {
        const ImplicationStats stats =
            tangency_implication(options.implication_samples, options.seed + 1, projector);
        VerifyCheck check;
        check.name = "tangency implication";
        check.pass = stats.violations == 0;
        check.detail = std::to_string(stats.violations) + " violations in " +
                       std::to_string(stats.samples) + " tuples (max level/2delta " +
                       format_double(stats.max_ratio) + ")";
        result.checks.push_back(check);
    }
    {
        const WindowStats stats = window_calibration(options.window_pairs, options.seed + 2);
        VerifyCheck check;
        check.name = "sublevel window";
        check.pass = stats.multi_component == 0 &&
                     stats.calibrated_c <= kWindowConstantBudget &&
                     stats.calibrated_c > 0.0;
        check.detail = "calibrated C = " + format_double(stats.calibrated_c) +
                       " (budget 32), multi-arc sets " +
                       std::to_string(stats.multi_component) + "/" +
                       std::to_string(stats.pairs);
        result.calibrated_c = stats.calibrated_c;
        result.checks.push_back(check);
    }

    for (const VerifyCheck& check : result.checks)
        if (!check.pass) result.all_pass = false;
    return result;
}

} // namespace rpl
