#include "contentlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

namespace contentlab {

namespace {

std::vector<std::vector<std::pair<std::int32_t, double>>> adjacency(const MetricTree& t) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(t.vertex_count);
    for (const auto& e : t.edges) {
        if (e.u < 0 || e.u >= t.vertex_count || e.v < 0 || e.v >= t.vertex_count)
            throw std::invalid_argument("MetricTree: edge endpoint out of range");
        if (!(e.length > 0.0))
            throw std::invalid_argument("MetricTree: edge length must be positive");
        adj[e.u].emplace_back(e.v, e.length);
        adj[e.v].emplace_back(e.u, e.length);
    }
    return adj;
}

// Largest two of three values equal within tol? Returns gap.
double four_point_gap(double s1, double s2, double s3) {
    double a = s1, b = s2, c = s3;
    if (a < b) std::swap(a, b);
    if (a < c) std::swap(a, c);
    if (b < c) std::swap(b, c);
    return a - b;
}

}  // namespace

std::vector<double> graph_path_metric(const MetricTree& t) {
    const std::int32_t nv = t.vertex_count;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(nv) * nv, inf);
    const auto adj = adjacency(t);
    // Dijkstra from each vertex; graphs here are tiny.
    using Item = std::pair<double, std::int32_t>;
    for (std::int32_t s = 0; s < nv; ++s) {
        auto* row = dist.data() + static_cast<std::size_t>(s) * nv;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        row[s] = 0.0;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > row[u]) continue;
            for (auto [v, w] : adj[u]) {
                if (du + w < row[v]) {
                    row[v] = du + w;
                    pq.emplace(row[v], v);
                }
            }
        }
    }
    return dist;
}

TreeValidation validate_tree(const MetricTree& t, double tol, std::uint64_t sample_seed) {
    TreeValidation r;
    const std::int32_t nv = t.vertex_count;
    if (nv <= 0) return r;

    const auto adj = adjacency(t);
    std::vector<char> seen(nv, 0);
    std::vector<std::int32_t> stack{0};
    seen[0] = 1;
    std::int32_t reached = 1;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto [v, w] : adj[u]) {
            (void)w;
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    r.connected = (reached == nv);
    r.acyclic = (static_cast<std::int64_t>(t.edges.size()) == nv - 1) && r.connected;

    if (!r.connected) {
        // Four-point condition is meaningless with infinite distances.
        r.four_point_ok = false;
        return r;
    }

    const auto d = graph_path_metric(t);
    auto D = [&](std::int32_t a, std::int32_t b) {
        return d[static_cast<std::size_t>(a) * nv + b];
    };
    auto check = [&](std::int32_t w, std::int32_t x, std::int32_t y, std::int32_t z) {
        const double gap = four_point_gap(D(w, x) + D(y, z), D(w, y) + D(x, z),
                                          D(w, z) + D(x, y));
        r.worst_gap = std::max(r.worst_gap, gap);
        if (gap > tol && !r.witness) r.witness = {w, x, y, z};
    };

    if (nv <= 40) {
        for (std::int32_t w = 0; w < nv; ++w)
            for (std::int32_t x = w + 1; x < nv; ++x)
                for (std::int32_t y = x + 1; y < nv; ++y)
                    for (std::int32_t z = y + 1; z < nv; ++z) check(w, x, y, z);
    } else {
        std::mt19937_64 rng(sample_seed);
        std::uniform_int_distribution<std::int32_t> pick(0, nv - 1);
        for (int it = 0; it < 20000; ++it) {
            std::int32_t q[4];
            for (auto& v : q) v = pick(rng);
            check(q[0], q[1], q[2], q[3]);
        }
    }
    r.four_point_ok = !r.witness.has_value();
    return r;
}

MetricTree path_tree(const std::vector<double>& edge_lengths) {
    MetricTree t;
    t.vertex_count = static_cast<std::int32_t>(edge_lengths.size()) + 1;
    for (std::size_t i = 0; i < edge_lengths.size(); ++i)
        t.edges.push_back({static_cast<std::int32_t>(i),
                           static_cast<std::int32_t>(i + 1), edge_lengths[i]});
    return t;
}

MetricTree star_tree_graph(int legs, const std::vector<std::vector<double>>& leg_edge_lengths) {
    if (static_cast<int>(leg_edge_lengths.size()) != legs)
        throw std::invalid_argument("star_tree_graph: legs mismatch");
    MetricTree t;
    t.vertex_count = 1;
    for (const auto& leg : leg_edge_lengths) {
        std::int32_t prev = 0;  // root
        for (double len : leg) {
            const std::int32_t nxt = t.vertex_count++;
            t.edges.push_back({prev, nxt, len});
            prev = nxt;
        }
    }
    return t;
}

double total_edge_length(const MetricTree& t) {
    double s = 0.0;
    for (const auto& e : t.edges) s += e.length;
    return s;
}

}  // namespace contentlab
