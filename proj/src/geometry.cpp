#include "rpl/geometry.hpp"

#include <vector>

namespace rpl {

Vec3 projection_direction(PlaneHeight t, Angle theta) {
    const double tv = t.value();
    const double c = std::sqrt(1.0 - tv * tv);
    return {c * std::cos(theta.radians()), c * std::sin(theta.radians()), tv};
}

PlaneBasis plane_basis(PlaneHeight t, Angle theta) {
    const double tv = t.value();
    const double c = std::sqrt(1.0 - tv * tv);
    const double ct = std::cos(theta.radians());
    const double st = std::sin(theta.radians());
    return {Vec3{-st, ct, 0.0}, Vec3{tv * ct, tv * st, -c}};
}

ProjectedPoint project(PlaneHeight t, Angle theta, const Vec3& z) {
    const PlaneBasis b = plane_basis(t, theta);
    return {z.dot(b.e1), z.dot(b.e2)};
}

double tangency_level(const Point3& a, const Point3& b) {
    return std::abs((a.x - b.x).norm() - std::abs(a.r - b.r));
}

AngleWindowScan angle_window_scan(PlaneHeight t, const Point3& a, const Point3& b,
                                  double delta, long resolution) {
    if (a == b)
        throw ValidationError("angle_window: coincident points have no defined direction");
    if (!(delta > 0.0)) throw ValidationError("angle_window: delta must be positive");
    if (resolution < 1000) throw ValidationError("angle_window: resolution must be >= 1000");

    const Vec3 w = a.vec3() - b.vec3();
    const double step = kTwoPi / static_cast<double>(resolution);
    const double delta2 = delta * delta;

    // |project(theta, a) - project(theta, b)| = |project(theta, w)| by linearity.
    std::vector<long> hits;
    for (long k = 0; k < resolution; ++k) {
        const ProjectedPoint p = project(t, Angle(static_cast<double>(k) * step), w);
        if (p.u * p.u + p.v * p.v <= delta2) hits.push_back(k);
    }

    AngleWindowScan scan;
    scan.hit_count = static_cast<long>(hits.size());
    if (hits.empty()) {
        scan.window = AngleWindow::none();
        scan.components = 0;
        return scan;
    }
    if (scan.hit_count == resolution) {
        scan.window = AngleWindow{Angle(0.0), kTwoPi / 2.0, false};
        scan.components = 1;
        return scan;
    }

    // Components and the largest circular gap between consecutive hits; the
    // smallest covering arc is the complement of that gap.
    long max_gap = hits.front() + resolution - hits.back();
    long gap_end = 0;  // index into hits of the hit that follows the largest gap
    int components = max_gap > 1 ? 1 : 0;
    for (std::size_t i = 1; i < hits.size(); ++i) {
        const long gap = hits[i] - hits[i - 1];
        if (gap > 1) ++components;
        if (gap > max_gap) {
            max_gap = gap;
            gap_end = static_cast<long>(i);
        }
    }
    if (components == 0) components = 1;  // single run wrapping nowhere

    const long first = hits[static_cast<std::size_t>(gap_end)];
    const long span = resolution - max_gap;  // forward index distance first -> last
    const double length = static_cast<double>(span) * step;
    scan.window.empty = false;
    scan.window.half_width = 0.5 * length;
    scan.window.center = Angle(static_cast<double>(first) * step + 0.5 * length);
    scan.components = components;
    return scan;
}

AngleWindow angle_window(PlaneHeight t, const Point3& a, const Point3& b,
                         double delta, long resolution) {
    return angle_window_scan(t, a, b, delta, resolution).window;
}

ReductionMaps reduction_maps(PlaneHeight t) {
    const double tv = t.value();
    ReductionMaps maps;
    maps.global = Mat3::diagonal(1.0, 1.0, std::sqrt(1.0 - tv * tv) / tv);
    maps.plane_scale = tv * std::sqrt(2.0);
    return maps;
}

Vec2 tangency_direction(const Point3& a, const Point3& b) {
    if (a.x == b.x)
        throw DegenerateConfiguration("tangency_direction: coincident centers");
    if (a.r == b.r)
        throw DegenerateConfiguration("tangency_direction: equal radii");
    const Vec2 d = b.x - a.x;
    const double sign = a.r > b.r ? 1.0 : -1.0;
    return d * (sign / d.norm());
}

} // namespace rpl
