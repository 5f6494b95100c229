#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rpl/geometry.hpp"
#include "rpl/rng.hpp"

namespace rpl {

using Projector = std::function<ProjectedPoint(PlaneHeight, Angle, const Vec3&)>;

// The stock projector, and one with a sign error injected into the basis
// (second component of e2 flipped) for exercising the failure path.
ProjectedPoint project_reference(PlaneHeight t, Angle theta, const Vec3& z);
ProjectedPoint project_faulty(PlaneHeight t, Angle theta, const Vec3& z);

// Near-tangent pair generator shared by the invariant suites: |a - b| = dist,
// tangency level Delta(a, b) < sqrt(2)*delta, so the direction sublevel set is
// a non-empty single arc whenever delta < dist/sqrt(2).
struct NearTangentPair {
    Point3 a;
    Point3 b;
    double delta = 0.0;
    double dist = 0.0;
};
NearTangentPair random_near_tangent_pair(Rng& rng, double ratio_lo, double ratio_hi);

// uniform point of the standard region
Point3 random_region_point(Rng& rng);

struct ConjugationStats {
    double max_residual = 0.0;
    std::vector<double> heights_tested;
};
// max over samples of |plane_map(project_ref(B_t z)) - project_t(z)| for every
// height in the stock test set {+-0.1, +-0.5, +-0.9, 1/sqrt(2)}.
ConjugationStats conjugation_residual(long samples_per_height, std::uint64_t seed,
                                      const Projector& projector);

struct ImplicationStats {
    long samples = 0;
    long violations = 0;
    double max_ratio = 0.0;  // max of Delta(z, z') / (2*delta)
};
// |project(z) - project(z')| <= delta must force Delta(z, z') <= 2*delta
// (t = 1/sqrt(2) family).
ImplicationStats tangency_implication(long samples, std::uint64_t seed,
                                      const Projector& projector);

struct WindowStats {
    long pairs = 0;
    long multi_component = 0;   // sampled sublevel sets with more than one arc
    double calibrated_c = 0.0;  // max of length * max{1, dist/delta}
};
WindowStats window_calibration(long pairs, std::uint64_t seed);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    long conjugation_samples = 100000;  // per height
    long implication_samples = 100000;
    long window_pairs = 10000;
    std::uint64_t seed = 1;
    bool inject_fault = false;
};

struct VerifyResult {
    std::vector<VerifyCheck> checks;
    bool all_pass = true;
    double calibrated_c = 0.0;
};

VerifyResult run_verify(const VerifyOptions& options);

inline constexpr double kConjugationTolerance = 1e-12;
inline constexpr double kWindowConstantBudget = 32.0;

} // namespace rpl
