#pragma once

#include <vector>

#include "rpl/fractal.hpp"
#include "rpl/geometry.hpp"

namespace rpl {

// Number of occupied half-open grid boxes [i*delta, (i+1)*delta) x
// [j*delta, (j+1)*delta), grid anchored at the origin.
std::size_t box_count(const std::vector<ProjectedPoint>& points, double delta);

struct BoxCountSeries {
    std::vector<double> scales;       // dyadic, strictly increasing
    std::vector<std::size_t> counts;  // non-increasing along scales

    void validate() const;
};

// Least-squares slope of log N against log(1/delta), clamped to [0, 2].
// Requires >= 4 scales spanning a factor >= 8.
double estimate_dim(const BoxCountSeries& series);

struct BoundCurves {
    double tangency = 0.0;     // min{s, 1 + s/3}
    double restriction = 0.0;  // 3s/4 on [1, 2], min{s - 1/2, 2} on [2, 3],
                               // trivial floor min{s, 1} below 1
    double potential = 0.0;    // min{s, 1}
};

// Lower-bound curves for the dimension of the projected set as a function of
// the set dimension s in [0, 3].
BoundCurves theoretical_bounds(double s);

struct SweepPercentiles {
    double p05 = 0.0, p10 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p90 = 0.0,
           p95 = 0.0;
};

struct SweepReport {
    double t = 0.0;
    std::vector<double> thetas;
    std::vector<double> dims;      // per-theta slope estimates, in [0, 2]
    double s_nominal = 0.0;
    BoundCurves bounds;
    SweepPercentiles percentiles;
    double scale_min = 0.0;
    double scale_max = 0.0;

    double median() const { return percentiles.p50; }
    double fraction_at_least(double threshold) const;
};

// Projects the support for theta_count uniformly spaced angles, box-counts
// over the dyadic ladder [scale_min, scale_max] and fits the per-angle slope.
// scale range must lie within [4 * generation scale, 1/4]; theta_count >= 64.
SweepReport sweep(const DiscreteMeasure& mu, PlaneHeight t, long theta_count,
                  double scale_min, double scale_max, double s_nominal,
                  unsigned threads = 1);

} // namespace rpl
