#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rpl/fractal.hpp"
#include "rpl/geometry.hpp"

namespace rpl {

// Uniform 3D grid over the support of a measure. Cells are anchored at the
// origin; a ball query of radius <= cell_size is answered from the 3x3x3
// neighborhood of the center's cell. Queries return candidate (or exact)
// point indices in ascending order so that downstream mass sums fold in the
// same order as a brute-force loop.
class SpatialIndex {
public:
    SpatialIndex(const DiscreteMeasure& mu, double cell_size);

    double cell_size() const { return cell_size_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point3>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    double generation_scale() const { return generation_scale_; }
    double total_indexed_weight() const;

    // indices of support points with |p - center| <= radius
    std::vector<std::size_t> ball(const Vec3& center, double radius) const;
    // indices with |p - center| in [lo, hi)
    std::vector<std::size_t> annulus(const Vec3& center, double lo, double hi) const;
    // candidate indices for the tube {p : |project(p) - project(z)| <= delta};
    // pruned by cell boxes against the tube axis, exact tests are the caller's
    std::vector<std::size_t> tube_candidates(PlaneHeight t, Angle theta, const Vec3& z,
                                             double delta) const;

    std::size_t occupied_cells() const { return cells_.size(); }

private:
    std::int64_t key_of(const Vec3& p) const;
    void collect_cells_near(const Vec3& center, double radius,
                            std::vector<std::size_t>& out) const;

    double cell_size_;
    double generation_scale_;
    std::int64_t cell_lo_[3] = {0, 0, 0};  // occupied cell bounds per axis
    std::int64_t cell_hi_[3] = {0, 0, 0};
    std::vector<Point3> points_;
    std::vector<double> weights_;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

// Mass of the 2*delta-tube around the projection line through z:
// mu{z' : |project(t, theta, z) - project(t, theta, z')| <= delta}.
double tube_mass(const SpatialIndex& index, PlaneHeight t, Angle theta,
                 const Point3& z, double delta);

struct DistanceBand {
    enum class Kind { Annulus, Ball, TangencyOnly };
    Kind kind = Kind::TangencyOnly;
    double tau = 0.0;  // dyadic, in [delta, 1]; ignored for TangencyOnly

    static DistanceBand annulus(double tau) { return {Kind::Annulus, tau}; }
    static DistanceBand ball(double tau) { return {Kind::Ball, tau}; }
    static DistanceBand tangency_only() { return {Kind::TangencyOnly, 0.0}; }
};

// Tube mass restricted to near-tangent points {z' : Delta(z, z') <= 2*delta}
// intersected with the band: |z - z'| in [tau, 2*tau) (Annulus) or
// |z - z'| <= 2*tau (Ball); TangencyOnly applies the tangency restriction
// alone.
double tube_mass_restricted(const SpatialIndex& index, PlaneHeight t, Angle theta,
                            const Point3& z, double delta, const DistanceBand& band);

struct ExperimentConfig {
    double s = 0.0;            // Frostman exponent of the set under test
    double kappa = 0.0;        // surplus exponent, > max{0, 2s/3 - 1}
    double eta = 0.0;          // smallness exponent, > 0
    double delta = 0.0;        // scale, >= 4 * generation scale
    long theta_samples = 0;    // 0 -> default ceil(64 / delta)
    std::vector<double> t_bands;  // dyadic distance bands over [delta, 1]

    long effective_theta_samples() const;
    // throws ValidationError; needs the measure's generation scale
    void validate(double generation_scale) const;
    static std::vector<double> dyadic_bands(double delta);
};

struct HighMultiplicityReport {
    ExperimentConfig config;
    // per support point: fraction of sampled angles with
    // tube mass >= delta^(s - kappa)
    std::vector<double> h;
    double z_mass = 0.0;  // measure of {z : h(z) >= delta^eta / (2*pi)}
    double threshold_mass = 0.0;      // delta^(s - kappa)
    double threshold_fraction = 0.0;  // delta^eta / (2*pi)
};

// For every support point and every sampled angle, thresholds the tube mass
// at delta^(s - kappa); h aggregates the hit fraction per point and z_mass
// the measure of points whose hit fraction reaches delta^eta / (2*pi).
// Ties count as inside. Bit-identical for any worker count.
HighMultiplicityReport high_multiplicity_scan(const SpatialIndex& index, PlaneHeight t,
                                              const ExperimentConfig& config,
                                              unsigned threads = 1);

bool is_dyadic(double x);  // exactly a power of two

} // namespace rpl
