#include "rpl/tangency.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace rpl {

TangencyCount count_tangent_pairs(const SpatialIndex& index, double delta, double tau,
                                  unsigned threads) {
    if (!(delta > 0.0)) throw ValidationError("tangency: delta must be positive");
    if (!is_dyadic(tau)) throw ValidationError("tangency: tau must be dyadic");
    if (tau < delta || tau > 1.0)
        throw ValidationError("tangency: tau outside [delta, 1]");

    const std::size_t n = index.size();
    // fixed chunking so the per-chunk partials do not depend on the thread count
    constexpr std::size_t kChunk = 256;
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> chunk_pairs(nchunks, 0);
    std::vector<double> chunk_mass(nchunks, 0.0);

    auto do_chunk = [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(begin + kChunk, n);
        std::uint64_t pairs = 0;
        double mass = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const Point3& zi = index.points()[i];
            for (std::size_t j : index.annulus(zi.vec3(), tau, 2.0 * tau)) {
                if (j <= i) continue;  // count each unordered pair once
                if (tangency_level(zi, index.points()[j]) > 2.0 * delta) continue;
                ++pairs;
                mass += index.weights()[i] * index.weights()[j];
            }
        }
        chunk_pairs[c] = pairs;
        chunk_mass[c] = mass;
    };

    if (threads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) do_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= nchunks) return;
                do_chunk(c);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    TangencyCount out;
    out.delta = delta;
    out.tau = tau;
    for (std::size_t c = 0; c < nchunks; ++c) {  // ordered reduction
        out.pair_count += chunk_pairs[c];
        out.weighted_mass += chunk_mass[c];
    }
    return out;
}

ThreeCirclesProbe three_circles_probe(const Point3& z1, const Point3& z2,
                                      const Point3& z3, double delta, double tau,
                                      double eta, double grid_step, unsigned threads) {
    if (!(delta > 0.0)) throw ValidationError("probe: delta must be positive");
    if (!(tau > 0.0)) throw ValidationError("probe: tau must be positive");
    if (!(eta > 0.0)) throw ValidationError("probe: eta must be positive");
    if (!(grid_step > 0.0) || grid_step > delta / 4.0)
        throw ValidationError("probe: grid step must be positive and <= delta/4");
    const Point3 anchors[3] = {z1, z2, z3};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (anchors[a] == anchors[b])
                throw ValidationError("probe: anchors must be pairwise distinct");

    const double sep = std::pow(delta, eta);
    const double tau2 = tau * tau;

    const auto steps = [&](double lo, double hi) {
        return static_cast<long>(std::floor((hi - lo) / grid_step)) + 1;
    };
    const long nr = steps(StandardRegion::r_min, StandardRegion::r_max);
    const long nx = steps(-StandardRegion::x_radius, StandardRegion::x_radius);

    // r-slabs scanned in parallel; hits concatenated in slab order
    std::vector<std::vector<Point3>> slab_hits(static_cast<std::size_t>(nr));
    std::atomic<bool> degenerate{false};

    auto do_slab = [&](std::size_t ri) {
        const double r = StandardRegion::r_min + static_cast<double>(ri) * grid_step;
        // per-anchor annulus bounds for |x - x_j| at this height
        double lo2[3], hi2[3], dr[3];
        for (int a = 0; a < 3; ++a) {
            dr[a] = r - anchors[a].r;
            const double mid = std::abs(dr[a]);
            const double lo = std::max(0.0, mid - 2.0 * delta);
            const double hi = mid + 2.0 * delta;
            lo2[a] = lo * lo;
            hi2[a] = hi * hi;
        }
        std::vector<Point3>& hits = slab_hits[ri];
        for (long ix = 0; ix < nx; ++ix) {
            const double x1 = -StandardRegion::x_radius + static_cast<double>(ix) * grid_step;
            for (long iy = 0; iy < nx; ++iy) {
                const double x2 = -StandardRegion::x_radius + static_cast<double>(iy) * grid_step;
                if (x1 * x1 + x2 * x2 > StandardRegion::x_radius * StandardRegion::x_radius)
                    continue;
                bool ok = true;
                for (int a = 0; a < 3; ++a) {
                    const double dx = x1 - anchors[a].x.x;
                    const double dy = x2 - anchors[a].x.y;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < lo2[a] || d2 > hi2[a] || d2 + dr[a] * dr[a] < tau2) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                const Point3 z{Vec2{x1, x2}, r};
                Vec2 e[3];
                for (int a = 0; a < 3; ++a) {
                    if (z.x == anchors[a].x || z.r == anchors[a].r) {
                        degenerate.store(true);
                        return;
                    }
                    e[a] = tangency_direction(z, anchors[a]);
                }
                double min_sep = std::numeric_limits<double>::infinity();
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        min_sep = std::min(min_sep, (e[a] - e[b]).norm());
                if (min_sep >= sep) hits.push_back(z);
            }
        }
    };

    if (threads <= 1) {
        for (long ri = 0; ri < nr; ++ri) do_slab(static_cast<std::size_t>(ri));
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (;;) {
                const long ri = next.fetch_add(1);
                if (ri >= nr || degenerate.load()) return;
                do_slab(static_cast<std::size_t>(ri));
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (degenerate.load())
        throw DegenerateConfiguration("probe: tangency direction undefined on a hit");

    ThreeCirclesProbe probe;
    probe.anchors[0] = z1;
    probe.anchors[1] = z2;
    probe.anchors[2] = z3;
    probe.delta = delta;
    probe.tau = tau;
    probe.eta = eta;
    probe.grid_step = grid_step;
    for (auto& hits : slab_hits)
        probe.hits.insert(probe.hits.end(), hits.begin(), hits.end());

    const double diameter = 8.0 * std::pow(delta, 1.0 - 2.0 * eta);
    for (const Point3& h : probe.hits) {
        bool covered = false;
        for (const CoverBall& ball : probe.cover) {
            if ((h.vec3() - ball.center.vec3()).norm() <= 0.5 * ball.diameter) {
                covered = true;
                break;
            }
        }
        if (!covered) probe.cover.push_back({h, diameter});
    }
    return probe;
}

} // namespace rpl
