#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contentlab/dyadic.hpp"
#include "contentlab/tree.hpp"

namespace contentlab {

/// Point cloud in R^N with the sup (max coordinate difference) metric. Stands
/// in for l_infinity with finitely many coordinates.
struct SupCloud {
    std::vector<std::vector<double>> points;  // each of common length N

    std::size_t coord_count() const { return points.empty() ? 0 : points[0].size(); }
};

/// Explicit finite metric: symmetric matrix with zero diagonal satisfying the
/// triangle inequality within 1e-9 (checked by validate()).
struct FiniteMetric {
    std::size_t count = 0;
    std::vector<double> dist;  // row-major count x count

    double at(std::size_t i, std::size_t j) const { return dist[i * count + j]; }
    void validate(double tol = 1e-9) const;
};

/// Tree target: vertices of a metric tree with the path metric (precomputed).
struct TreeSpace {
    std::shared_ptr<const MetricTree> tree;
    std::vector<double> table;  // path metric, row-major

    static TreeSpace from_tree(MetricTree t);
};

/// One of the three target kinds all maps land in.
struct TargetSpace {
    std::variant<SupCloud, FiniteMetric, TreeSpace> space;

    std::size_t point_count() const;
    double distance(std::int32_t a, std::int32_t b) const;
    double diameter() const;

    bool is_sup_cloud() const { return std::holds_alternative<SupCloud>(space); }
    const SupCloud& sup_cloud() const { return std::get<SupCloud>(space); }
};

/// Minimum over pairs of distance(a, b), a in A, b in B. Throws on empty sets.
double set_distance(const TargetSpace& space, std::span<const std::int32_t> A,
                    std::span<const std::int32_t> B);

/// As above but also reports a realizing pair.
struct SetDistanceWitness {
    double value = 0.0;
    std::int32_t a = -1;
    std::int32_t b = -1;
};
SetDistanceWitness set_distance_witness(const TargetSpace& space,
                                        std::span<const std::int32_t> A,
                                        std::span<const std::int32_t> B);

/// Isometric embedding of a finite metric into a SupCloud: point i maps to
/// its distance profile (d(i,0), ..., d(i,p-1)).
SupCloud kuratowski_embed(const FiniteMetric& fm);

/// Uniform lattice of spacing 2^-K on [0,1]^d: (2^K+1)^d points indexed
/// row-major with axis 0 slowest.
struct Lattice {
    int d = 0;
    int K = 0;

    std::int64_t per_axis() const { return (std::int64_t{1} << K) + 1; }
    std::int64_t count() const;
    std::vector<std::int64_t> coords(std::int64_t idx) const;
    std::int64_t index(std::span<const std::int64_t> c) const;
    std::vector<double> point(std::int64_t idx) const;  // real coordinates
    double spacing() const { return 1.0 / static_cast<double>(std::int64_t{1} << K); }

    /// Indices of all lattice points in the closed axis box [lo, hi]
    /// (inclusive, lattice units).
    std::vector<std::int64_t> box_indices(std::span<const std::int64_t> lo,
                                          std::span<const std::int64_t> hi) const;
    /// Indices inside the closed dyadic cube.
    std::vector<std::int64_t> cube_indices(const DyadicCube& q) const;
};

/// Euclidean distance between two lattice points, in real units.
double lattice_euclid(const Lattice& lat, std::int64_t a, std::int64_t b);

/// Map sampled on the lattice of [0,1]^(n+m): each lattice point is assigned
/// an index into the target space.
struct GridMap {
    int n = 0;
    int m = 0;
    int K = 0;
    TargetSpace target;
    std::vector<std::int32_t> values;  // per lattice index
    double declared_lip = 1.0;

    int dim() const { return n + m; }
    Lattice lattice() const { return Lattice{n + m, K}; }
    double dist_values(std::int64_t p, std::int64_t q) const {
        return target.distance(values[p], values[q]);
    }
    void validate() const;  // shape checks, throws on mismatch

    /// Distinct target indices appearing among the given lattice points
    /// (sorted). With no argument, over the whole lattice.
    std::vector<std::int32_t> image_points(std::span<const std::int64_t> lattice_idx) const;
    std::vector<std::int32_t> image_points_all() const;
};

/// Caps the lattice size; reads CONTENTLAB_MAX_POINTS (default 50000).
std::int64_t max_lattice_points();
void enforce_lattice_cap(int d, int K);

enum class LipschitzMode { all_pairs, adjacent };

struct LipschitzReport {
    double ratio = 0.0;         // max observed d(f(x),f(y)) / |x-y|_2
    double verified_bound = 0.0;  // ratio itself (all_pairs) or ratio*sqrt(d)
    LipschitzMode mode = LipschitzMode::all_pairs;
    bool violates_declared = false;
    std::int64_t witness_a = -1;
    std::int64_t witness_b = -1;
};

/// Largest distortion ratio over lattice pairs. all_pairs scans every pair;
/// adjacent scans axis neighbors and reports the bound ratio*sqrt(d), valid
/// for sup-metric style targets where axis increments control all pairs.
/// Never throws: a violation of declared_lip is flagged, not fatal.
LipschitzReport lipschitz_check(const GridMap& f, LipschitzMode mode);

/// Two maps on the same lattice into SupClouds with equal coordinate counts.
struct MapPair {
    const GridMap& f;
    const GridMap& g;

    MapPair(const GridMap& f_, const GridMap& g_);
};

struct MapDistance {
    double value = 0.0;           // sup over lattice of coordinatewise max diff
    double continuum_slack = 0.0; // (lip_f + lip_g) * sqrt(d) * 2^-(K+1)
    std::int64_t witness = -1;
};

/// Sampled sup-distance between the two maps, with the Lipschitz-controlled
/// error bar to the continuum sup reported alongside.
MapDistance map_distance(const MapPair& pair);

/// Point-to-point postcomposition table: old target index -> index into the
/// new target space.
struct PointMap {
    TargetSpace new_target;
    std::vector<std::int32_t> table;
};

/// Verifies phi is 1-Lipschitz on the target point set (tolerance tol, throws
/// naming a violating pair otherwise), then returns phi o f on the same
/// lattice.
GridMap postcompose(const GridMap& f, const PointMap& phi, double tol = 1e-12);

/// Coordinatewise McShane extension: given values g(y) on a subset of lattice
/// points, extends by g(x) = min_y (g(y) + dist(x,y)) per coordinate, which
/// is 1-Lipschitz for the Euclidean domain metric whenever the partial data
/// is. Returns one value per lattice point.
std::vector<double> mcshane_extend(const Lattice& lat,
                                   std::span<const std::int64_t> anchor_idx,
                                   std::span<const double> anchor_values);

}  // namespace contentlab
