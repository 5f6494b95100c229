#pragma once

#include <cmath>

#include "rpl/errors.hpp"
#include "rpl/vec.hpp"

namespace rpl {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// A point z = (x, r) in R^2 x R, read as the planar circle S(x, r) with
// center x and radius r.
struct Point3 {
    Vec2 x;
    double r = 0.0;

    constexpr Point3() = default;
    constexpr Point3(Vec2 x_, double r_) : x(x_), r(r_) {}
    constexpr Point3(double x1, double x2, double r_) : x(x1, x2), r(r_) {}

    constexpr Vec3 vec3() const { return {x.x, x.y, r}; }
    constexpr bool operator==(const Point3& o) const = default;

    bool finite() const {
        return std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(r);
    }

    // Standard region: r in [1/2, 1] and |x| <= 1/4, boundaries closed.
    bool in_standard_region() const {
        return finite() && r >= 0.5 && r <= 1.0 && x.norm2() <= 0.0625;
    }
};

// Geometry of the standard region (a disk-cylinder).
struct StandardRegion {
    static constexpr double x_radius = 0.25;
    static constexpr double r_min = 0.5;
    static constexpr double r_max = 1.0;
    // max distance between two points of the region
    static double diameter() { return std::sqrt(0.5 * 0.5 + 0.5 * 0.5); }
};

// Height t of the horizontal plane {(x, y, r) : r = t} carrying the circle of
// projection directions; t = 0 (the degenerate subspace case) is excluded.
class PlaneHeight {
public:
    explicit PlaneHeight(double t) : t_(t) {
        if (!(std::abs(t) < 1.0) || t == 0.0)
            throw ValidationError("plane height must satisfy 0 < |t| < 1");
    }
    double value() const { return t_; }

private:
    double t_;
};

// Angle in [0, 2*pi), compared modulo 2*pi.
class Angle {
public:
    Angle() : theta_(0.0) {}
    explicit Angle(double radians) {
        if (!std::isfinite(radians)) throw ValidationError("angle must be finite");
        theta_ = std::fmod(radians, kTwoPi);
        if (theta_ < 0.0) theta_ += kTwoPi;
        if (theta_ >= kTwoPi) theta_ = 0.0;  // fmod rounding at the seam
    }
    double radians() const { return theta_; }

    // distance on the circle, in [0, pi]
    static double distance(Angle a, Angle b) {
        double d = std::abs(a.radians() - b.radians());
        return d > kTwoPi - d ? kTwoPi - d : d;
    }

private:
    double theta_;
};

// Coordinates in the orthonormal frame (e1, e2) of the projection plane.
struct ProjectedPoint {
    double u = 0.0;
    double v = 0.0;

    constexpr Vec2 vec2() const { return {u, v}; }
    double distance(const ProjectedPoint& o) const {
        const double du = u - o.u, dv = v - o.v;
        return std::sqrt(du * du + dv * dv);
    }
};

struct PlaneBasis {
    Vec3 e1;
    Vec3 e2;
};

// One arc of directions, possibly wrapping through 0.
struct AngleWindow {
    Angle center;
    double half_width = 0.0;
    bool empty = true;

    double length() const { return empty ? 0.0 : 2.0 * half_width; }
    bool contains(Angle a) const {
        return !empty && Angle::distance(a, center) <= half_width + 1e-15;
    }
    static AngleWindow none() { return {}; }
};

// Result of sampling the sublevel set E_delta(z, z') on a uniform grid.
struct AngleWindowScan {
    AngleWindow window;
    int components = 0;   // maximal runs of consecutive sampled hits
    long hit_count = 0;
};

// The conjugation pair (B_t, A_theta^t) relating the t-family of projections
// to the reference family at t = 1/sqrt(2).
struct ReductionMaps {
    Mat3 global;              // acts on R^3 before the reference projection
    double plane_scale;       // second-axis scale t*sqrt(2) of the plane map

    Mat2 plane(Angle) const {  // constant in theta in the paired bases
        return Mat2{1.0, 0.0, 0.0, plane_scale};
    }
};

// Unit direction (sqrt(1-t^2) cos(theta), sqrt(1-t^2) sin(theta), t) on the
// circle of directions at height t.
Vec3 projection_direction(PlaneHeight t, Angle theta);

// Orthonormal basis of the plane orthogonal to projection_direction(t, theta):
// e1 = (-sin, cos, 0), e2 = (t cos, t sin, -sqrt(1-t^2)). e1 does not depend
// on t.
PlaneBasis plane_basis(PlaneHeight t, Angle theta);

// Orthogonal projection of z onto the plane, in (e1, e2) coordinates.
ProjectedPoint project(PlaneHeight t, Angle theta, const Vec3& z);
inline ProjectedPoint project(PlaneHeight t, Angle theta, const Point3& z) {
    return project(t, theta, z.vec3());
}

// Tangency functional ||x - x'| - |r - r'||; zero exactly when the circles
// S(x, r) and S(x', r') are internally tangent.
double tangency_level(const Point3& a, const Point3& b);

// Samples theta on a uniform grid of `resolution` points and returns the
// smallest single arc containing the sampled sublevel set
// {theta : |project(t, theta, a) - project(t, theta, b)| <= delta}.
AngleWindowScan angle_window_scan(PlaneHeight t, const Point3& a, const Point3& b,
                                  double delta, long resolution);
AngleWindow angle_window(PlaneHeight t, const Point3& a, const Point3& b,
                         double delta, long resolution);

// B_t = diag(1, 1, sqrt(1-t^2)/t) together with the plane map diag(1, t*sqrt(2));
// project(t, theta, z) == plane(theta) * project(1/sqrt(2), theta, B_t z).
ReductionMaps reduction_maps(PlaneHeight t);

// Unit vector sgn(r - r') (x' - x)/|x' - x|; the circles are approximately
// tangent at x + r * e. Undefined (throws) when x = x' or r = r'.
Vec2 tangency_direction(const Point3& a, const Point3& b);

} // namespace rpl
