#include "rpl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rpl/multiplicity.hpp"
#include "rpl/parallel.hpp"

namespace rpl {

namespace {

std::int64_t box_key(const ProjectedPoint& p, double delta) {
    const auto i = static_cast<std::int64_t>(std::floor(p.u / delta)) + (1LL << 31);
    const auto j = static_cast<std::int64_t>(std::floor(p.v / delta)) + (1LL << 31);
    return (i << 32) | j;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace

std::size_t box_count(const std::vector<ProjectedPoint>& points, double delta) {
    if (!(delta > 0.0)) throw ValidationError("box_count: delta must be positive");
    if (points.empty()) return 0;
    std::vector<std::int64_t> keys;
    keys.reserve(points.size());
    for (const ProjectedPoint& p : points) keys.push_back(box_key(p, delta));
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(
        std::unique(keys.begin(), keys.end()) - keys.begin());
}

void BoxCountSeries::validate() const {
    if (scales.empty() || scales.size() != counts.size())
        throw ValidationError("box series: size mismatch or empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!is_dyadic(scales[i])) throw ValidationError("box series: non-dyadic scale");
        if (counts[i] < 1) throw ValidationError("box series: count below 1");
        if (i > 0) {
            if (scales[i] <= scales[i - 1])
                throw ValidationError("box series: scales not increasing");
            if (counts[i] > counts[i - 1])
                throw ValidationError("box series: counts increase with scale");
        }
    }
}

double estimate_dim(const BoxCountSeries& series) {
    series.validate();
    if (series.scales.size() < 4)
        throw ValidationError("estimate_dim: need at least 4 scales");
    if (series.scales.back() / series.scales.front() < 8.0)
        throw ValidationError("estimate_dim: scales must span a factor >= 8");
    std::vector<double> x, y;
    x.reserve(series.scales.size());
    y.reserve(series.scales.size());
    for (std::size_t i = 0; i < series.scales.size(); ++i) {
        x.push_back(std::log(1.0 / series.scales[i]));
        y.push_back(std::log(static_cast<double>(series.counts[i])));
    }
    return std::clamp(ols_slope(x, y), 0.0, 2.0);
}

BoundCurves theoretical_bounds(double s) {
    if (!(s >= 0.0) || !(s <= 3.0))
        throw ValidationError("bounds: s must lie in [0, 3]");
    BoundCurves b;
    b.tangency = std::min(s, 1.0 + s / 3.0);
    b.potential = std::min(s, 1.0);
    if (s < 1.0)
        b.restriction = std::min(s, 1.0);
    else if (s <= 2.0)
        b.restriction = 0.75 * s;
    else
        b.restriction = std::min(s - 0.5, 2.0);
    return b;
}

double SweepReport::fraction_at_least(double threshold) const {
    if (dims.empty()) return 0.0;
    std::size_t hits = 0;
    for (double d : dims)
        if (d >= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(dims.size());
}

SweepReport sweep(const DiscreteMeasure& mu, PlaneHeight t, long theta_count,
                  double scale_min, double scale_max, double s_nominal,
                  unsigned threads) {
    mu.validate();
    if (theta_count < 64) throw ValidationError("sweep: need at least 64 angles");
    if (!is_dyadic(scale_min) || !is_dyadic(scale_max) || scale_min > scale_max)
        throw ValidationError("sweep: scale range must be dyadic and ordered");
    if (scale_min < 4.0 * mu.generation_scale)
        throw ValidationError("sweep: finest scale below 4 * generation scale");
    if (scale_max > 0.25)
        throw ValidationError("sweep: coarsest scale above 1/4");

    std::vector<double> scales;
    for (double d = scale_min; d <= scale_max * 1.0000001; d *= 2.0) scales.push_back(d);

    SweepReport report;
    report.t = t.value();
    report.s_nominal = s_nominal;
    report.bounds = theoretical_bounds(s_nominal);
    report.scale_min = scale_min;
    report.scale_max = scale_max;
    report.thetas.resize(static_cast<std::size_t>(theta_count));
    report.dims.resize(static_cast<std::size_t>(theta_count));

    parallel_for(
        static_cast<std::size_t>(theta_count), threads,
        [&](std::size_t k) {
            const Angle theta(kTwoPi * static_cast<double>(k) /
                              static_cast<double>(theta_count));
            std::vector<ProjectedPoint> proj(mu.size());
            for (std::size_t i = 0; i < mu.size(); ++i)
                proj[i] = project(t, theta, mu.points[i]);
            BoxCountSeries series;
            series.scales = scales;
            series.counts.resize(scales.size());
            for (std::size_t si = 0; si < scales.size(); ++si)
                series.counts[si] = box_count(proj, scales[si]);
            report.thetas[k] = theta.radians();
            report.dims[k] = estimate_dim(series);
        },
        1);

    std::vector<double> sorted = report.dims;
    std::sort(sorted.begin(), sorted.end());
    report.percentiles.p05 = percentile(sorted, 5.0);
    report.percentiles.p10 = percentile(sorted, 10.0);
    report.percentiles.p25 = percentile(sorted, 25.0);
    report.percentiles.p50 = percentile(sorted, 50.0);
    report.percentiles.p75 = percentile(sorted, 75.0);
    report.percentiles.p90 = percentile(sorted, 90.0);
    report.percentiles.p95 = percentile(sorted, 95.0);
    return report;
}

} // namespace rpl
