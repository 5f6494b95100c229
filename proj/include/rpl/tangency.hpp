#pragma once

#include <vector>

#include "rpl/multiplicity.hpp"

namespace rpl {

struct TangencyCount {
    double delta = 0.0;
    double tau = 0.0;               // dyadic band start
    std::uint64_t pair_count = 0;   // unordered pairs
    double weighted_mass = 0.0;     // sum of w * w' over counted pairs
};

// Counts unordered support-point pairs with Delta(z, z') <= 2*delta and
// |z - z'| in [tau, 2*tau). Deterministic for any worker count.
TangencyCount count_tangent_pairs(const SpatialIndex& index, double delta, double tau,
                                  unsigned threads = 1);

struct CoverBall {
    Point3 center;
    double diameter = 0.0;
};

struct ThreeCirclesProbe {
    Point3 anchors[3];
    double delta = 0.0;
    double tau = 0.0;
    double eta = 0.0;
    double grid_step = 0.0;
    std::vector<Point3> hits;
    std::vector<CoverBall> cover;   // greedy cover, balls of diameter 8*delta^(1-2*eta)
};

// Grid-searches the standard region for points z with Delta(z, z_j) <= 2*delta
// and |z - z_j| >= tau for all three anchors, and pairwise tangency-direction
// separation min |e(z, z_i) - e(z, z_j)| >= delta^eta; covers the hit set
// greedily with balls of diameter 8*delta^(1-2*eta).
ThreeCirclesProbe three_circles_probe(const Point3& z1, const Point3& z2,
                                      const Point3& z3, double delta, double tau,
                                      double eta, double grid_step,
                                      unsigned threads = 1);

} // namespace rpl
