#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contentlab/metric.hpp"
#include "contentlab/tree.hpp"

namespace contentlab {

/// Factorization f = h o g through a metric tree by L-Lipschitz legs:
/// g maps the lattice into the tree's vertices, h places each vertex in a
/// SupCloud (one point per vertex, same order).
struct TreeFactorization {
    GridMap g;   // target must be a TreeSpace
    SupCloud h;  // h(vertex i) = h.points[i]
    double L = 1.0;
};

struct LegReport {
    double g_lip = 0.0;  // max ratio on the lattice (Euclidean domain metric)
    double h_lip = 0.0;  // max ratio over tree vertex pairs
    bool ok = false;
    std::string violation;  // names a witness pair when a leg fails
};
LegReport check_legs(const TreeFactorization& tf, double tol = 1e-9);

/// h o g as a GridMap into the h cloud. Throws (naming a witness pair) if a
/// leg exceeds L; the composition carries declared_lip = L*L.
GridMap compose_factorization(const TreeFactorization& tf);

struct FactorCheckReport {
    bool pass = false;
    double sup_deviation = 0.0;
    LegReport legs;
};

/// Verifies that f agrees with h o g within tol (lattice sup) and that both
/// legs are L-Lipschitz.
FactorCheckReport factor_check(const GridMap& f, const TreeFactorization& tf, double tol);

struct ZooParams {
    int n = 1;
    int m = 1;
    int K = 3;
    double alpha = 0.5;                 // scaled_projection
    int legs = 4;                       // star_tree
    std::vector<double> point;          // distance_to_point (empty = center)
    std::string base = "projection";    // perturbed
    double amplitude = 0.0;             // perturbed
    std::uint64_t seed = 1;
};

struct ZooEntry {
    std::string name;
    GridMap map;
    std::optional<TreeFactorization> factorization;
};

/// Deterministic example maps:
///   projection            first n coordinates, into a sup cloud
///   constant              single-point image
///   scaled_projection     alpha * x_1 (n = 1)
///   fold                  (|x-1/2|, y) on the square
///   distance_to_point     x -> |x - p|_2, ships a path-tree factorization
///   segment_tree          x -> x_1, ships a path-tree factorization
///   star_tree             distance-to-cell-boundary map onto a star tree,
///                         ships its factorization (legs in {3,4})
///   perturbed             seeded coordinate noise on a base map's cloud
///   random_lipschitz      seeded 1-Lipschitz map via McShane extension
ZooEntry zoo(const std::string& name, const ZooParams& params);

/// Names accepted by zoo(), in a fixed order.
std::vector<std::string> zoo_names();

/// Seeded random 1-Lipschitz map: per-coordinate McShane extension of random
/// anchor values. Exactly 1-Lipschitz for the Euclidean domain metric.
GridMap random_lipschitz_map(int n, int m, int K, int coords, int anchors,
                             std::uint64_t seed);

}  // namespace contentlab
