#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace contentlab {

/// Finite weighted tree used as a metric space via path-length distance.
struct MetricTree {
    struct Edge {
        std::int32_t u = 0;
        std::int32_t v = 0;
        double length = 0.0;
    };
    std::int32_t vertex_count = 0;
    std::vector<Edge> edges;
    std::vector<std::string> labels;  // optional, size 0 or vertex_count
};

/// Result of structural + four-point validation of a weighted graph claimed
/// to be a metric tree. On four-point failure `witness` names a violating
/// quadruple.
struct TreeValidation {
    bool connected = false;
    bool acyclic = false;
    bool four_point_ok = false;
    std::optional<std::array<std::int32_t, 4>> witness;
    double worst_gap = 0.0;  // largest |two-largest-sums difference| seen

    bool pass() const { return connected && acyclic && four_point_ok; }
};

/// All-pairs path-length distances of a connected weighted graph (row-major
/// vertex_count x vertex_count). Works for non-trees too, so validation can
/// exhibit four-point witnesses on cyclic inputs.
std::vector<double> graph_path_metric(const MetricTree& t);

/// Checks connectivity, acyclicity (|E| = |V|-1 with a single component) and
/// the four-point condition: among the three pairings
///   d(w,x)+d(y,z), d(w,y)+d(x,z), d(w,z)+d(x,y)
/// the two largest must agree (slack `tol`). Exhaustive up to 40 vertices,
/// seeded sampling of 20000 quadruples beyond.
TreeValidation validate_tree(const MetricTree& t, double tol = 1e-9,
                             std::uint64_t sample_seed = 20240601);

/// Convenience builders used by tests and the map zoo.
MetricTree path_tree(const std::vector<double>& edge_lengths);
MetricTree star_tree_graph(int legs, const std::vector<std::vector<double>>& leg_edge_lengths);

/// Total edge length of the tree.
double total_edge_length(const MetricTree& t);

}  // namespace contentlab
