#include "rpl/multiplicity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace rpl {

namespace {

constexpr std::int64_t kCellOffset = 1 << 20;

} // namespace

bool is_dyadic(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
    int exp = 0;
    return std::frexp(x, &exp) == 0.5;
}

SpatialIndex::SpatialIndex(const DiscreteMeasure& mu, double cell_size)
    : cell_size_(cell_size), generation_scale_(mu.generation_scale) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw ValidationError("index: cell size must be positive");
    mu.validate();
    points_ = mu.points;
    weights_ = mu.weights;
    for (int a = 0; a < 3; ++a) {
        cell_lo_[a] = std::numeric_limits<std::int64_t>::max();
        cell_hi_[a] = std::numeric_limits<std::int64_t>::min();
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Vec3 p = points_[i].vec3();
        const std::int64_t c[3] = {
            static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_size_))};
        for (int a = 0; a < 3; ++a) {
            cell_lo_[a] = std::min(cell_lo_[a], c[a]);
            cell_hi_[a] = std::max(cell_hi_[a], c[a]);
        }
        cells_[key_of(p)].push_back(static_cast<std::uint32_t>(i));
    }
}

std::int64_t SpatialIndex::key_of(const Vec3& p) const {
    const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell_size_)) + kCellOffset;
    const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell_size_)) + kCellOffset;
    const auto cz = static_cast<std::int64_t>(std::floor(p.z / cell_size_)) + kCellOffset;
    return (cx << 42) | (cy << 21) | cz;
}

double SpatialIndex::total_indexed_weight() const {
    double sum = 0.0, comp = 0.0;
    for (const auto& [key, cell] : cells_)
        for (std::uint32_t i : cell) {
            const double y = weights_[i] - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    return sum;
}

void SpatialIndex::collect_cells_near(const Vec3& center, double radius,
                                      std::vector<std::size_t>& out) const {
    const double c[3] = {center.x, center.y, center.z};
    std::int64_t lo[3], hi[3];
    double span = 1.0;
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(cell_lo_[a],
                         static_cast<std::int64_t>(std::floor((c[a] - radius) / cell_size_)));
        hi[a] = std::min(cell_hi_[a],
                         static_cast<std::int64_t>(std::floor((c[a] + radius) / cell_size_)));
        if (hi[a] < lo[a]) return;
        span *= static_cast<double>(hi[a] - lo[a] + 1);
    }
    if (span > static_cast<double>(cells_.size())) {
        // query range covers most of the grid; walking the occupied cells is cheaper
        for (const auto& [key, cell] : cells_) {
            const std::int64_t cx = (key >> 42) - kCellOffset;
            const std::int64_t cy = ((key >> 21) & ((1 << 21) - 1)) - kCellOffset;
            const std::int64_t cz = (key & ((1 << 21) - 1)) - kCellOffset;
            if (cx < lo[0] || cx > hi[0] || cy < lo[1] || cy > hi[1] || cz < lo[2] ||
                cz > hi[2])
                continue;
            for (std::uint32_t i : cell) out.push_back(i);
        }
        return;
    }
    for (std::int64_t cx = lo[0]; cx <= hi[0]; ++cx)
        for (std::int64_t cy = lo[1]; cy <= hi[1]; ++cy)
            for (std::int64_t cz = lo[2]; cz <= hi[2]; ++cz) {
                const std::int64_t key = ((cx + kCellOffset) << 42) |
                                         ((cy + kCellOffset) << 21) | (cz + kCellOffset);
                const auto it = cells_.find(key);
                if (it == cells_.end()) continue;
                for (std::uint32_t i : it->second) out.push_back(i);
            }
}

std::vector<std::size_t> SpatialIndex::ball(const Vec3& center, double radius) const {
    if (!(radius >= 0.0)) throw ValidationError("index: negative ball radius");
    std::vector<std::size_t> candidates;
    collect_cells_near(center, radius, candidates);
    std::vector<std::size_t> out;
    out.reserve(candidates.size());
    const double r2 = radius * radius;
    for (std::size_t i : candidates)
        if ((points_[i].vec3() - center).norm2() <= r2) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> SpatialIndex::annulus(const Vec3& center, double lo,
                                               double hi) const {
    if (!(lo >= 0.0) || !(hi >= lo)) throw ValidationError("index: bad annulus bounds");
    std::vector<std::size_t> candidates;
    collect_cells_near(center, hi, candidates);
    std::vector<std::size_t> out;
    const double lo2 = lo * lo, hi2 = hi * hi;
    for (std::size_t i : candidates) {
        const double d2 = (points_[i].vec3() - center).norm2();
        if (d2 >= lo2 && d2 < hi2) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> SpatialIndex::tube_candidates(PlaneHeight t, Angle theta,
                                                       const Vec3& z, double delta) const {
    const Vec3 dir = projection_direction(t, theta);
    const double half_diag = 0.5 * std::sqrt(3.0) * cell_size_;
    const double prune = delta + half_diag;
    const double prune2 = prune * prune;

    // Walk the occupied cells; keep those whose center is within
    // delta + half-diagonal of the tube axis {z + s*dir}.
    std::vector<std::size_t> out;
    for (const auto& [key, cell] : cells_) {
        const std::int64_t cx = (key >> 42) - kCellOffset;
        const std::int64_t cy = ((key >> 21) & ((1 << 21) - 1)) - kCellOffset;
        const std::int64_t cz = (key & ((1 << 21) - 1)) - kCellOffset;
        const Vec3 center{(static_cast<double>(cx) + 0.5) * cell_size_,
                          (static_cast<double>(cy) + 0.5) * cell_size_,
                          (static_cast<double>(cz) + 0.5) * cell_size_};
        const Vec3 w = center - z;
        const double along = w.dot(dir);
        if (w.norm2() - along * along > prune2) continue;
        for (std::uint32_t i : cell) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double tube_mass(const SpatialIndex& index, PlaneHeight t, Angle theta,
                 const Point3& z, double delta) {
    if (!(delta > 0.0)) throw ValidationError("tube_mass: delta must be positive");
    const ProjectedPoint pz = project(t, theta, z);
    const double delta2 = delta * delta;
    double mass = 0.0;
    for (std::size_t i : index.tube_candidates(t, theta, z.vec3(), delta)) {
        const ProjectedPoint pi = project(t, theta, index.points()[i]);
        const double du = pi.u - pz.u, dv = pi.v - pz.v;
        if (du * du + dv * dv <= delta2) mass += index.weights()[i];
    }
    return mass;
}

double tube_mass_restricted(const SpatialIndex& index, PlaneHeight t, Angle theta,
                            const Point3& z, double delta, const DistanceBand& band) {
    if (!(delta > 0.0)) throw ValidationError("tube_mass: delta must be positive");
    if (band.kind != DistanceBand::Kind::TangencyOnly) {
        if (!is_dyadic(band.tau))
            throw ValidationError("tube_mass_restricted: band tau must be dyadic");
        if (band.tau < delta || band.tau > 1.0)
            throw ValidationError("tube_mass_restricted: band tau outside [delta, 1]");
    }
    const ProjectedPoint pz = project(t, theta, z);
    const double delta2 = delta * delta;
    double mass = 0.0;
    for (std::size_t i : index.tube_candidates(t, theta, z.vec3(), delta)) {
        const Point3& p = index.points()[i];
        const ProjectedPoint pi = project(t, theta, p);
        const double du = pi.u - pz.u, dv = pi.v - pz.v;
        if (du * du + dv * dv > delta2) continue;
        if (tangency_level(z, p) > 2.0 * delta) continue;
        if (band.kind == DistanceBand::Kind::Annulus) {
            const double d = (p.vec3() - z.vec3()).norm();
            if (d < band.tau || d >= 2.0 * band.tau) continue;
        } else if (band.kind == DistanceBand::Kind::Ball) {
            if ((p.vec3() - z.vec3()).norm() > 2.0 * band.tau) continue;
        }
        mass += index.weights()[i];
    }
    return mass;
}

long ExperimentConfig::effective_theta_samples() const {
    if (theta_samples > 0) return theta_samples;
    return static_cast<long>(std::ceil(64.0 / delta));
}

std::vector<double> ExperimentConfig::dyadic_bands(double delta) {
    std::vector<double> bands;
    for (double tau = 1.0; tau >= delta; tau *= 0.5) bands.push_back(tau);
    std::reverse(bands.begin(), bands.end());
    return bands;
}

void ExperimentConfig::validate(double generation_scale) const {
    if (!(s > 0.0) || !(s <= 3.0)) throw ValidationError("config: s must lie in (0, 3]");
    if (!(kappa > std::max(0.0, 2.0 * s / 3.0 - 1.0)))
        throw ValidationError("config: kappa must exceed max{0, 2s/3 - 1}");
    if (!(eta > 0.0)) throw ValidationError("config: eta must be positive");
    if (!(delta > 0.0)) throw ValidationError("config: delta must be positive");
    if (delta < 4.0 * generation_scale)
        throw ValidationError("config: delta must be >= 4 * generation scale");
    for (double tau : t_bands) {
        if (!is_dyadic(tau)) throw ValidationError("config: non-dyadic distance band");
        if (tau < delta || tau > 1.0)
            throw ValidationError("config: distance band outside [delta, 1]");
    }
}

HighMultiplicityReport high_multiplicity_scan(const SpatialIndex& index, PlaneHeight t,
                                              const ExperimentConfig& config,
                                              unsigned threads) {
    config.validate(index.generation_scale());
    const std::size_t n = index.size();
    const long m = config.effective_theta_samples();
    const double delta = config.delta;
    const double threshold_mass = std::pow(delta, config.s - config.kappa);

    // Hits are accumulated as integers per (point, angle chunk); integer sums
    // are order-independent, so the result cannot depend on the worker count.
    const unsigned workers = threads == 0 ? 1 : threads;
    std::vector<std::vector<std::uint32_t>> partial(workers,
                                                    std::vector<std::uint32_t>(n, 0));

    // All generated measures carry one repeated weight. Folding k copies of an
    // equal value is order-independent, so precomputing the fold per count
    // reproduces the sorted per-candidate sum exactly while the hot loop only
    // counts.
    bool equal_weights = true;
    for (std::size_t i = 1; i < n && equal_weights; ++i)
        equal_weights = index.weights()[i] == index.weights()[0];
    std::vector<double> fold_table;
    if (equal_weights) {
        fold_table.resize(n + 1);
        fold_table[0] = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            fold_table[k] = fold_table[k - 1] + index.weights()[0];
    }

    struct Scratch {
        std::vector<double> u, v;
        std::vector<std::uint32_t> cell_start, cell_points, order;
        std::vector<std::size_t> cand;
    };

    auto run_theta = [&](std::size_t k, std::vector<std::uint32_t>& counts,
                         Scratch& sc) {
        const Angle theta(kTwoPi * static_cast<double>(k) / static_cast<double>(m));
        const PlaneBasis basis = plane_basis(t, theta);

        sc.u.resize(n);
        sc.v.resize(n);
        double umin = 0.0, umax = 0.0, vmin = 0.0, vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 p = index.points()[i].vec3();
            sc.u[i] = p.dot(basis.e1);
            sc.v[i] = p.dot(basis.e2);
            if (i == 0) {
                umin = umax = sc.u[0];
                vmin = vmax = sc.v[0];
            } else {
                umin = std::min(umin, sc.u[i]);
                umax = std::max(umax, sc.u[i]);
                vmin = std::min(vmin, sc.v[i]);
                vmax = std::max(vmax, sc.v[i]);
            }
        }

        // counting-sort grid with cell size delta over the projected cloud
        const auto gw = static_cast<std::size_t>((umax - umin) / delta) + 1;
        const auto gh = static_cast<std::size_t>((vmax - vmin) / delta) + 1;
        const std::size_t ncells = gw * gh;
        const auto cell_of = [&](std::size_t i) {
            auto cu = static_cast<std::size_t>((sc.u[i] - umin) / delta);
            auto cv = static_cast<std::size_t>((sc.v[i] - vmin) / delta);
            if (cu >= gw) cu = gw - 1;
            if (cv >= gh) cv = gh - 1;
            return cu * gh + cv;
        };
        sc.cell_start.assign(ncells + 1, 0);
        for (std::size_t i = 0; i < n; ++i) ++sc.cell_start[cell_of(i) + 1];
        for (std::size_t c = 0; c < ncells; ++c) sc.cell_start[c + 1] += sc.cell_start[c];
        sc.cell_points.resize(n);
        sc.order.assign(ncells, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = cell_of(i);
            sc.cell_points[sc.cell_start[c] + sc.order[c]++] = static_cast<std::uint32_t>(i);
        }

        const double delta2 = delta * delta;
        for (std::size_t i = 0; i < n; ++i) {
            const double ui = sc.u[i], vi = sc.v[i];
            const auto cu = static_cast<long>((ui - umin) / delta);
            const auto cv = static_cast<long>((vi - vmin) / delta);
            double mass = 0.0;
            std::size_t in_disk = 0;
            sc.cand.clear();
            for (long du = -1; du <= 1; ++du) {
                const long gu = cu + du;
                if (gu < 0 || gu >= static_cast<long>(gw)) continue;
                for (long dv = -1; dv <= 1; ++dv) {
                    const long gv = cv + dv;
                    if (gv < 0 || gv >= static_cast<long>(gh)) continue;
                    const std::size_t c = static_cast<std::size_t>(gu) * gh +
                                          static_cast<std::size_t>(gv);
                    if (equal_weights) {
                        for (std::uint32_t s0 = sc.cell_start[c];
                             s0 < sc.cell_start[c + 1]; ++s0) {
                            const std::uint32_t j = sc.cell_points[s0];
                            const double dx = sc.u[j] - ui, dy = sc.v[j] - vi;
                            in_disk += dx * dx + dy * dy <= delta2 ? 1 : 0;
                        }
                    } else {
                        for (std::uint32_t s0 = sc.cell_start[c];
                             s0 < sc.cell_start[c + 1]; ++s0) {
                            const std::uint32_t j = sc.cell_points[s0];
                            const double dx = sc.u[j] - ui, dy = sc.v[j] - vi;
                            if (dx * dx + dy * dy <= delta2) sc.cand.push_back(j);
                        }
                    }
                }
            }
            if (equal_weights) {
                mass = fold_table[in_disk];
            } else {
                // fold in ascending index order, matching tube_mass exactly
                std::sort(sc.cand.begin(), sc.cand.end());
                for (std::size_t j : sc.cand) mass += index.weights()[j];
            }
            if (mass >= threshold_mass) ++counts[i];
        }
    };

    if (workers <= 1) {
        Scratch sc;
        for (long k = 0; k < m; ++k)
            run_theta(static_cast<std::size_t>(k), partial[0], sc);
    } else {
        std::atomic<long> next{0};
        auto worker = [&](unsigned id) {
            Scratch sc;
            for (;;) {
                const long k = next.fetch_add(1);
                if (k >= m) return;
                run_theta(static_cast<std::size_t>(k), partial[id], sc);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }

    std::vector<std::uint32_t> counts(n, 0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < n; ++i) counts[i] += p[i];

    HighMultiplicityReport report;
    report.config = config;
    report.threshold_mass = threshold_mass;
    report.threshold_fraction = std::pow(delta, config.eta) / kTwoPi;
    report.h.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        report.h[i] = static_cast<double>(counts[i]) / static_cast<double>(m);
    double z_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (report.h[i] >= report.threshold_fraction) z_mass += index.weights()[i];
    // the fold can drift a few ulp above the total mass
    report.z_mass = std::min(z_mass, 1.0);
    return report;
}

} // namespace rpl
