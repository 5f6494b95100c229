#include "rpl/fractal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "rpl/parallel.hpp"
#include "rpl/rng.hpp"

namespace rpl {

namespace {

constexpr std::size_t kMaxPoints = std::size_t{1} << 24;

// Renormalization target: the centered box of half the region's size,
// x in [-1/8, 1/8]^2, r in [5/8, 7/8]. It sits strictly inside the region
// (the corner has |x| = sqrt(2)/8 < 1/4).
constexpr double kTargetLo[3] = {-0.125, -0.125, 0.625};
constexpr double kTargetHi[3] = {0.125, 0.125, 0.875};

double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

struct AxisBounds {
    double lo[3];
    double hi[3];
};

AxisBounds bounds_of(const std::vector<Vec3>& pts) {
    AxisBounds b;
    for (int a = 0; a < 3; ++a) {
        b.lo[a] = std::numeric_limits<double>::infinity();
        b.hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (const Vec3& p : pts) {
        const double c[3] = {p.x, p.y, p.z};
        for (int a = 0; a < 3; ++a) {
            b.lo[a] = std::min(b.lo[a], c[a]);
            b.hi[a] = std::max(b.hi[a], c[a]);
        }
    }
    return b;
}

// Canonical renormalization: per-axis affine map of the cloud's bounding box
// onto the target box; a degenerate axis is placed at the target center.
// Returns the per-axis scale factors (0 for degenerate axes).
std::array<double, 3> renormalize(std::vector<Vec3>& pts) {
    if (pts.empty()) throw ValidationError("renormalize: empty cloud");
    const AxisBounds b = bounds_of(pts);
    std::array<double, 3> scale{};
    double shift[3];
    for (int a = 0; a < 3; ++a) {
        if (!std::isfinite(b.lo[a]) || !std::isfinite(b.hi[a]))
            throw ValidationError("renormalize: cloud does not fit the standard region");
        const double extent = b.hi[a] - b.lo[a];
        if (extent > 0.0) {
            scale[a] = (kTargetHi[a] - kTargetLo[a]) / extent;
            shift[a] = kTargetLo[a] - b.lo[a] * scale[a];
        } else {
            scale[a] = 0.0;
            shift[a] = 0.5 * (kTargetLo[a] + kTargetHi[a]);
        }
    }
    for (Vec3& p : pts) {
        p = {p.x * scale[0] + shift[0], p.y * scale[1] + shift[1],
             p.z * scale[2] + shift[2]};
    }
    return scale;
}

DiscreteMeasure make_measure(std::vector<Vec3> pts, double generation_scale,
                             std::uint64_t seed) {
    DiscreteMeasure mu;
    mu.points.reserve(pts.size());
    for (const Vec3& p : pts) mu.points.emplace_back(Vec2{p.x, p.y}, p.z);
    mu.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    mu.generation_scale = generation_scale;
    mu.seed = seed;
    mu.validate();
    return mu;
}

// Depth-level cell centers of the 1D two-branch system u -> ratio*u,
// u -> ratio*u + (1 - ratio) on [0, 1]; lexicographic in the branch string.
std::vector<double> cantor_axis(double s, int depth) {
    if (s == 0.0) return {0.5};
    const double ratio = std::exp2(-1.0 / s);
    std::vector<double> level = {0.5};
    for (int d = 0; d < depth; ++d) {
        std::vector<double> next;
        next.reserve(level.size() * 2);
        for (double u : level) next.push_back(ratio * u);
        for (double u : level) next.push_back(ratio * u + (1.0 - ratio));
        level = std::move(next);
    }
    return level;
}

} // namespace

double DiscreteMeasure::total_weight() const { return kahan_sum(weights); }

void DiscreteMeasure::validate() const {
    if (points.empty()) throw ValidationError("measure: no support points");
    if (points.size() != weights.size())
        throw ValidationError("measure: points/weights size mismatch");
    for (const Point3& p : points)
        if (!p.in_standard_region())
            throw ValidationError("measure: support point outside the standard region");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError("measure: negative or non-finite weight");
    if (std::abs(total_weight() - 1.0) > 1e-9)
        throw ValidationError("measure: weights do not sum to 1");
    if (!(generation_scale >= 0.0) || !std::isfinite(generation_scale))
        throw ValidationError("measure: bad generation scale");
}

void IfsSpec::validate() const {
    if (maps.empty()) throw ValidationError("ifs: no maps");
    if (depth < 1) throw ValidationError("ifs: depth must be >= 1");
    for (const IfsMap& m : maps) {
        if (!(m.ratio > 0.0) || !(m.ratio < 1.0))
            throw ValidationError("ifs: contraction ratio must lie in (0, 1)");
        if (!std::isfinite(m.translation.x) || !std::isfinite(m.translation.y) ||
            !std::isfinite(m.translation.z))
            throw ValidationError("ifs: non-finite translation");
    }
}

DiscreteMeasure generate_cantor_product(double sx, double sy, double sr, int depth,
                                        std::uint64_t seed) {
    const double exps[3] = {sx, sy, sr};
    for (double s : exps)
        if (!(s >= 0.0) || !(s <= 1.0))
            throw ValidationError(
                "cantor: factor exponent outside [0, 1] (two-branch ratio would overlap)");
    if (depth < 1) throw ValidationError("cantor: depth must be >= 1");

    const std::vector<double> ax = cantor_axis(sx, depth);
    const std::vector<double> ay = cantor_axis(sy, depth);
    const std::vector<double> ar = cantor_axis(sr, depth);
    const std::size_t n = ax.size() * ay.size() * ar.size();
    if (n > kMaxPoints) throw ValidationError("cantor: configuration exceeds the point budget");

    std::vector<Vec3> pts;
    pts.reserve(n);
    for (double px : ax)
        for (double py : ay)
            for (double pr : ar) pts.emplace_back(px, py, pr);

    const std::array<double, 3> scale = renormalize(pts);

    // cell diameter after renormalization
    double diag2 = 0.0;
    const double cell[3] = {sx > 0.0 ? std::pow(std::exp2(-1.0 / sx), depth) : 0.0,
                            sy > 0.0 ? std::pow(std::exp2(-1.0 / sy), depth) : 0.0,
                            sr > 0.0 ? std::pow(std::exp2(-1.0 / sr), depth) : 0.0};
    for (int a = 0; a < 3; ++a) diag2 += cell[a] * scale[a] * cell[a] * scale[a];

    return make_measure(std::move(pts), std::sqrt(diag2), seed);
}

DiscreteMeasure generate_ifs(const IfsSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t k = spec.maps.size();
    double pts_per_axis = 1.0;
    for (int d = 0; d < spec.depth; ++d) pts_per_axis *= static_cast<double>(k);
    const double total = spec.per_axis ? pts_per_axis * pts_per_axis * pts_per_axis
                                       : pts_per_axis;
    if (total > static_cast<double>(kMaxPoints))
        throw ValidationError("ifs: configuration exceeds the point budget");

    std::vector<Vec3> pts;
    if (spec.per_axis) {
        std::vector<double> axis[3];
        for (int a = 0; a < 3; ++a) {
            std::vector<double> level = {0.0};
            for (int d = 0; d < spec.depth; ++d) {
                std::vector<double> next;
                next.reserve(level.size() * k);
                for (const IfsMap& m : spec.maps) {
                    const double tr = a == 0 ? m.translation.x
                                   : a == 1 ? m.translation.y
                                            : m.translation.z;
                    for (double u : level) next.push_back(m.ratio * u + tr);
                }
                level = std::move(next);
            }
            axis[a] = std::move(level);
        }
        pts.reserve(static_cast<std::size_t>(total));
        for (double px : axis[0])
            for (double py : axis[1])
                for (double pr : axis[2]) pts.emplace_back(px, py, pr);
    } else {
        std::vector<Vec3> level = {Vec3{0.0, 0.0, 0.0}};
        for (int d = 0; d < spec.depth; ++d) {
            std::vector<Vec3> next;
            next.reserve(level.size() * k);
            for (const IfsMap& m : spec.maps)
                for (const Vec3& p : level) next.push_back(p * m.ratio + m.translation);
            level = std::move(next);
        }
        pts = std::move(level);
    }

    renormalize(pts);

    double max_ratio = 0.0;
    for (const IfsMap& m : spec.maps) max_ratio = std::max(max_ratio, m.ratio);
    const AxisBounds b = bounds_of(pts);
    double diag2 = 0.0;
    for (int a = 0; a < 3; ++a) diag2 += (b.hi[a] - b.lo[a]) * (b.hi[a] - b.lo[a]);
    const double generation_scale = std::pow(max_ratio, spec.depth) * std::sqrt(diag2);

    return make_measure(std::move(pts), generation_scale, seed);
}

DiscreteMeasure generate_plane_slice(int points_per_axis, std::uint64_t seed) {
    if (points_per_axis < 2) throw ValidationError("plane: points_per_axis must be >= 2");
    const std::size_t n = static_cast<std::size_t>(points_per_axis);
    if (n * n > kMaxPoints) throw ValidationError("plane: configuration exceeds the point budget");

    // Raw slice: lattice over the region's x-footprint at a fixed height; the
    // height axis is degenerate, so renormalization centers it.
    std::vector<Vec3> pts;
    pts.reserve(n * n);
    const double step = 0.5 / static_cast<double>(points_per_axis - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            pts.emplace_back(-0.25 + static_cast<double>(i) * step,
                             -0.25 + static_cast<double>(j) * step, 0.0);

    const std::array<double, 3> scale = renormalize(pts);
    const double spacing = step * scale[0];
    return make_measure(std::move(pts), spacing * std::sqrt(2.0), seed);
}

FrostmanReport estimate_frostman(const DiscreteMeasure& mu, double s,
                                 const std::vector<double>& radii,
                                 const SamplingPolicy& policy, unsigned threads) {
    mu.validate();
    if (!(s > 0.0) || !(s <= 3.0)) throw ValidationError("frostman: s must lie in (0, 3]");
    if (radii.empty()) throw ValidationError("frostman: no radii");
    for (double r : radii) {
        if (!(r > 0.0) || r > 1.0) throw ValidationError("frostman: radius outside (0, 1]");
        if (r < mu.generation_scale)
            throw ValidationError("frostman: radius below the generation scale");
    }

    std::vector<std::size_t> centers;
    if (policy.mode == SamplingPolicy::Mode::AllSupportPoints) {
        centers.resize(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) centers[i] = i;
    } else {
        if (policy.sample_size == 0)
            throw ValidationError("frostman: subsample size must be positive");
        Rng rng(policy.seed);
        centers.reserve(policy.sample_size);
        for (std::size_t i = 0; i < policy.sample_size; ++i)
            centers.push_back(static_cast<std::size_t>(rng.next_below(mu.size())));
    }

    std::vector<double> sorted_radii = radii;
    std::sort(sorted_radii.begin(), sorted_radii.end());

    struct Best {
        double ratio = -1.0;
        std::size_t center = 0;
        double radius = 0.0;
    };
    std::vector<Best> best(centers.size());

    parallel_for(centers.size(), threads, [&](std::size_t ci) {
        const Vec3 c = mu.points[centers[ci]].vec3();
        Best b;
        for (double r : sorted_radii) {
            // mass of the closed ball B(c, r)
            const double r2 = r * r;
            double mass = 0.0;
            for (std::size_t j = 0; j < mu.size(); ++j)
                if ((mu.points[j].vec3() - c).norm2() <= r2) mass += mu.weights[j];
            const double ratio = mass / std::pow(r, s);
            if (ratio > b.ratio) b = {ratio, centers[ci], r};
        }
        best[ci] = b;
    });

    FrostmanReport report;
    report.s = s;
    report.radii_tested = sorted_radii;
    for (const Best& b : best) {
        if (b.ratio > report.c_f) {
            report.c_f = b.ratio;
            report.witness_center = mu.points[b.center];
            report.witness_radius = b.radius;
        }
    }
    return report;
}

} // namespace rpl
