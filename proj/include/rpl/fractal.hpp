#pragma once

#include <cstdint>
#include <vector>

#include "rpl/geometry.hpp"

namespace rpl {

// Weighted point cloud approximating a probability measure on the standard
// region at a working scale.
struct DiscreteMeasure {
    std::vector<Point3> points;
    std::vector<double> weights;
    double generation_scale = 0.0;  // finest construction scale (cell diameter)
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
    double total_weight() const;  // compensated sum
    void validate() const;        // throws ValidationError on broken invariants
};

struct IfsMap {
    double ratio = 0.5;   // contraction ratio, in (0, 1)
    Vec3 translation;
};

// Iterated function system of similarities z -> ratio*z + translation. With
// per_axis set, each axis runs the 1D system (ratio, translation[axis])
// independently and the depth-level cloud is the product of the three axis
// clouds.
struct IfsSpec {
    std::vector<IfsMap> maps;
    int depth = 1;
    bool per_axis = false;

    void validate() const;
};

struct FrostmanReport {
    double s = 0.0;
    double c_f = 0.0;                 // max over scanned (z, r) of mass(B(z,r)) / r^s
    std::vector<double> radii_tested;
    Point3 witness_center;
    double witness_radius = 0.0;
};

struct SamplingPolicy {
    enum class Mode { AllSupportPoints, RandomSubsample };
    Mode mode = Mode::AllSupportPoints;
    std::size_t sample_size = 0;      // for RandomSubsample
    std::uint64_t seed = 0;
};

// Product of three linear Cantor sets with prescribed similarity dimensions
// sx, sy, sr in [0, 1] (two branches of ratio 2^(-1/s); a single point for
// s = 0), renormalized into the standard region. Uniform weights on the
// depth-level cells.
DiscreteMeasure generate_cantor_product(double sx, double sy, double sr, int depth,
                                        std::uint64_t seed);

// Depth-level image cloud of an IFS, renormalized into the standard region.
DiscreteMeasure generate_ifs(const IfsSpec& spec, std::uint64_t seed);

// Square lattice sample of a horizontal plane slice, renormalized into the
// standard region (points_per_axis^2 points at the region's mid-height).
DiscreteMeasure generate_plane_slice(int points_per_axis, std::uint64_t seed);

// Scans mass(B(z, r)) / r^s over the sampled centers and the given radii and
// reports the maximum with its witness.
FrostmanReport estimate_frostman(const DiscreteMeasure& mu, double s,
                                 const std::vector<double>& radii,
                                 const SamplingPolicy& policy,
                                 unsigned threads = 1);

} // namespace rpl
