#include "contentlab/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace contentlab {

namespace {

// Deduplicated scalar image -> (SupCloud of 1-coordinate points, value idx).
struct ScalarImage {
    std::vector<double> distinct;          // ascending
    std::vector<std::int32_t> value_idx;   // per lattice point
};

ScalarImage scalar_image(const Lattice& lat, const std::vector<double>& raw) {
    ScalarImage out;
    out.distinct = raw;
    std::sort(out.distinct.begin(), out.distinct.end());
    out.distinct.erase(std::unique(out.distinct.begin(), out.distinct.end()),
                       out.distinct.end());
    out.value_idx.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto it = std::lower_bound(out.distinct.begin(), out.distinct.end(), raw[i]);
        out.value_idx[i] = static_cast<std::int32_t>(it - out.distinct.begin());
    }
    (void)lat;
    return out;
}

SupCloud cloud_of_scalars(const std::vector<double>& vals) {
    SupCloud sc;
    for (double v : vals) sc.points.push_back({v});
    return sc;
}

// Path tree over ascending scalar values; factorization legs are exact.
TreeFactorization scalar_factorization(int n, int m, int K, const ScalarImage& img,
                                       double declared_lip) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < img.distinct.size(); ++i)
        gaps.push_back(img.distinct[i + 1] - img.distinct[i]);
    MetricTree tree = path_tree(gaps);

    TreeFactorization tf;
    tf.L = std::max(1.0, declared_lip);
    tf.g.n = n;
    tf.g.m = m;
    tf.g.K = K;
    tf.g.declared_lip = declared_lip;
    tf.g.target = TargetSpace{TreeSpace::from_tree(std::move(tree))};
    tf.g.values = img.value_idx;
    tf.h = cloud_of_scalars(img.distinct);
    return tf;
}

GridMap scalar_map(int n, int m, int K, const ScalarImage& img, double declared_lip) {
    GridMap f;
    f.n = n;
    f.m = m;
    f.K = K;
    f.declared_lip = declared_lip;
    f.target = TargetSpace{cloud_of_scalars(img.distinct)};
    f.values = img.value_idx;
    f.validate();
    return f;
}

std::vector<std::vector<double>> star_sites(int legs) {
    if (legs == 3) return {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}};
    if (legs == 4) return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    throw std::invalid_argument("zoo star_tree: legs must be 3 or 4");
}

}  // namespace

LegReport check_legs(const TreeFactorization& tf, double tol) {
    LegReport rep;
    const auto gl = lipschitz_check(tf.g, LipschitzMode::all_pairs);
    rep.g_lip = gl.ratio;
    const auto& ts = std::get<TreeSpace>(tf.g.target.space);
    const std::size_t nv = static_cast<std::size_t>(ts.tree->vertex_count);
    if (tf.h.points.size() != nv) {
        rep.violation = "h point count differs from tree vertex count";
        return rep;
    }
    TargetSpace hcloud{tf.h};
    for (std::size_t u = 0; u < nv; ++u)
        for (std::size_t v = u + 1; v < nv; ++v) {
            const double dt = ts.table[u * nv + v];
            const double dh = hcloud.distance(static_cast<std::int32_t>(u),
                                              static_cast<std::int32_t>(v));
            if (dt > 0.0) rep.h_lip = std::max(rep.h_lip, dh / dt);
            else if (dh > tol) {
                rep.violation = "h separates tree points at distance zero: (" +
                                std::to_string(u) + "," + std::to_string(v) + ")";
                return rep;
            }
        }
    if (rep.g_lip > tf.L + tol) {
        rep.violation = "g exceeds L on lattice pair (" + std::to_string(gl.witness_a) +
                        "," + std::to_string(gl.witness_b) + ")";
        return rep;
    }
    if (rep.h_lip > tf.L + tol) {
        rep.violation = "h exceeds L on the tree metric";
        return rep;
    }
    rep.ok = true;
    return rep;
}

GridMap compose_factorization(const TreeFactorization& tf) {
    const auto legs = check_legs(tf);
    if (!legs.ok)
        throw std::invalid_argument("compose_factorization: " + legs.violation);
    GridMap f;
    f.n = tf.g.n;
    f.m = tf.g.m;
    f.K = tf.g.K;
    f.target = TargetSpace{tf.h};
    f.values = tf.g.values;
    f.declared_lip = tf.L * tf.L;
    f.validate();
    return f;
}

FactorCheckReport factor_check(const GridMap& f, const TreeFactorization& tf, double tol) {
    FactorCheckReport rep;
    rep.legs = check_legs(tf);
    if (!rep.legs.ok) return rep;
    const GridMap composed = compose_factorization(tf);
    const MapPair pair(f, composed);
    rep.sup_deviation = map_distance(pair).value;
    rep.pass = rep.sup_deviation <= tol;
    return rep;
}

GridMap random_lipschitz_map(int n, int m, int K, int coords, int anchors,
                             std::uint64_t seed) {
    const Lattice lat{n + m, K};
    enforce_lattice_cap(n + m, K);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> pick(0, lat.count() - 1);

    std::vector<std::vector<double>> per_coord(coords);
    for (int c = 0; c < coords; ++c) {
        std::vector<std::int64_t> idx(anchors);
        std::vector<double> val(anchors);
        for (int a = 0; a < anchors; ++a) {
            idx[static_cast<std::size_t>(a)] = pick(rng);
            val[static_cast<std::size_t>(a)] = unif(rng);
        }
        per_coord[static_cast<std::size_t>(c)] = mcshane_extend(lat, idx, val);
    }

    // Deduplicate image tuples into a cloud.
    std::map<std::vector<double>, std::int32_t> seen;
    GridMap f;
    SupCloud cloud;
    f.values.resize(static_cast<std::size_t>(lat.count()));
    for (std::int64_t p = 0; p < lat.count(); ++p) {
        std::vector<double> pt(coords);
        for (int c = 0; c < coords; ++c)
            pt[static_cast<std::size_t>(c)] = per_coord[static_cast<std::size_t>(c)][p];
        auto [it, fresh] = seen.try_emplace(pt, static_cast<std::int32_t>(cloud.points.size()));
        if (fresh) cloud.points.push_back(pt);
        f.values[static_cast<std::size_t>(p)] = it->second;
    }
    f.n = n;
    f.m = m;
    f.K = K;
    f.declared_lip = 1.0;
    f.target = TargetSpace{std::move(cloud)};
    f.validate();
    return f;
}

ZooEntry zoo(const std::string& name, const ZooParams& p) {
    const int d = p.n + p.m;
    if (d <= 0) throw std::invalid_argument("zoo: n + m must be positive");
    enforce_lattice_cap(d, p.K);
    const Lattice lat{d, p.K};
    const std::int64_t total = lat.count();
    ZooEntry entry;
    entry.name = name;

    if (name == "projection") {
        if (p.n < 1) throw std::invalid_argument("zoo projection: n >= 1 required");
        // Image = lattice of the first n coordinates.
        std::map<std::vector<double>, std::int32_t> seen;
        SupCloud cloud;
        GridMap f;
        f.values.resize(static_cast<std::size_t>(total));
        for (std::int64_t q = 0; q < total; ++q) {
            const auto pt = lat.point(q);
            std::vector<double> head(pt.begin(), pt.begin() + p.n);
            auto [it, fresh] =
                seen.try_emplace(head, static_cast<std::int32_t>(cloud.points.size()));
            if (fresh) cloud.points.push_back(head);
            f.values[static_cast<std::size_t>(q)] = it->second;
        }
        f.n = p.n;
        f.m = p.m;
        f.K = p.K;
        f.declared_lip = 1.0;
        f.target = TargetSpace{std::move(cloud)};
        f.validate();
        entry.map = std::move(f);
        return entry;
    }

    if (name == "constant") {
        GridMap f;
        f.n = p.n;
        f.m = p.m;
        f.K = p.K;
        f.declared_lip = 1.0;
        f.target = TargetSpace{SupCloud{{{0.0}}}};
        f.values.assign(static_cast<std::size_t>(total), 0);
        f.validate();
        entry.map = std::move(f);
        return entry;
    }

    if (name == "scaled_projection") {
        if (p.n != 1) throw std::invalid_argument("zoo scaled_projection: n = 1 required");
        if (!(p.alpha > 0.0))
            throw std::invalid_argument("zoo scaled_projection: alpha must be positive");
        std::vector<double> raw(static_cast<std::size_t>(total));
        for (std::int64_t q = 0; q < total; ++q)
            raw[static_cast<std::size_t>(q)] = p.alpha * lat.point(q)[0];
        const auto img = scalar_image(lat, raw);
        entry.map = scalar_map(p.n, p.m, p.K, img, p.alpha);
        return entry;
    }

    if (name == "fold") {
        if (d != 2) throw std::invalid_argument("zoo fold: n + m = 2 required");
        std::map<std::vector<double>, std::int32_t> seen;
        SupCloud cloud;
        GridMap f;
        f.values.resize(static_cast<std::size_t>(total));
        for (std::int64_t q = 0; q < total; ++q) {
            const auto pt = lat.point(q);
            const std::vector<double> v{std::abs(pt[0] - 0.5), pt[1]};
            auto [it, fresh] =
                seen.try_emplace(v, static_cast<std::int32_t>(cloud.points.size()));
            if (fresh) cloud.points.push_back(v);
            f.values[static_cast<std::size_t>(q)] = it->second;
        }
        f.n = p.n;
        f.m = p.m;
        f.K = p.K;
        f.declared_lip = 1.0;
        f.target = TargetSpace{std::move(cloud)};
        f.validate();
        entry.map = std::move(f);
        return entry;
    }

    if (name == "distance_to_point" || name == "segment_tree") {
        std::vector<double> raw(static_cast<std::size_t>(total));
        if (name == "segment_tree") {
            for (std::int64_t q = 0; q < total; ++q)
                raw[static_cast<std::size_t>(q)] = lat.point(q)[0];
        } else {
            std::vector<double> center = p.point;
            if (center.empty()) center.assign(static_cast<std::size_t>(d), 0.5);
            if (static_cast<int>(center.size()) != d)
                throw std::invalid_argument("zoo distance_to_point: point dimension mismatch");
            for (std::int64_t q = 0; q < total; ++q) {
                const auto pt = lat.point(q);
                double s = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double di = pt[static_cast<std::size_t>(i)] -
                                      center[static_cast<std::size_t>(i)];
                    s += di * di;
                }
                raw[static_cast<std::size_t>(q)] = std::sqrt(s);
            }
        }
        const auto img = scalar_image(lat, raw);
        entry.map = scalar_map(p.n, p.m, p.K, img, 1.0);
        entry.factorization = scalar_factorization(p.n, p.m, p.K, img, 1.0);
        return entry;
    }

    if (name == "star_tree") {
        if (d != 2) throw std::invalid_argument("zoo star_tree: n + m = 2 required");
        const auto sites = star_sites(p.legs);
        const int legs = static_cast<int>(sites.size());
        // Leg index and height phi_i(x) = min_{j != i} (d_j - d_i)/2 of the
        // nearest site; zero on cell boundaries, 1-Lipschitz across cells.
        std::vector<int> leg_of(static_cast<std::size_t>(total));
        std::vector<double> height(static_cast<std::size_t>(total));
        for (std::int64_t q = 0; q < total; ++q) {
            const auto pt = lat.point(q);
            std::vector<double> dist(sites.size());
            for (std::size_t s = 0; s < sites.size(); ++s)
                dist[s] = std::hypot(pt[0] - sites[s][0], pt[1] - sites[s][1]);
            int best = 0;
            for (int s = 1; s < legs; ++s)
                if (dist[static_cast<std::size_t>(s)] < dist[static_cast<std::size_t>(best)])
                    best = s;
            double phi = std::numeric_limits<double>::infinity();
            for (int s = 0; s < legs; ++s)
                if (s != best)
                    phi = std::min(phi, 0.5 * (dist[static_cast<std::size_t>(s)] -
                                               dist[static_cast<std::size_t>(best)]));
            leg_of[static_cast<std::size_t>(q)] = best;
            height[static_cast<std::size_t>(q)] = std::max(0.0, phi);
        }
        // Subdivide each leg at its occurring heights; root carries height 0.
        std::vector<std::vector<double>> leg_vals(static_cast<std::size_t>(legs));
        for (std::int64_t q = 0; q < total; ++q)
            if (height[static_cast<std::size_t>(q)] > 0.0)
                leg_vals[static_cast<std::size_t>(leg_of[static_cast<std::size_t>(q)])]
                    .push_back(height[static_cast<std::size_t>(q)]);
        std::vector<std::vector<double>> leg_edges(static_cast<std::size_t>(legs));
        std::vector<std::vector<double>> leg_heights(static_cast<std::size_t>(legs));
        for (int s = 0; s < legs; ++s) {
            auto& vals = leg_vals[static_cast<std::size_t>(s)];
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            double prev = 0.0;
            for (double v : vals) {
                leg_edges[static_cast<std::size_t>(s)].push_back(v - prev);
                prev = v;
            }
            leg_heights[static_cast<std::size_t>(s)] = vals;
        }
        MetricTree tree = star_tree_graph(legs, leg_edges);
        // Vertex of (leg, height): root = 0, then legs in order.
        std::vector<std::int32_t> leg_base(static_cast<std::size_t>(legs));
        std::int32_t next = 1;
        for (int s = 0; s < legs; ++s) {
            leg_base[static_cast<std::size_t>(s)] = next;
            next += static_cast<std::int32_t>(leg_heights[static_cast<std::size_t>(s)].size());
        }

        TreeFactorization tf;
        tf.L = 1.0;
        tf.g.n = p.n;
        tf.g.m = p.m;
        tf.g.K = p.K;
        tf.g.declared_lip = 1.0;
        tf.g.values.resize(static_cast<std::size_t>(total));
        for (std::int64_t q = 0; q < total; ++q) {
            const double hgt = height[static_cast<std::size_t>(q)];
            if (hgt <= 0.0) {
                tf.g.values[static_cast<std::size_t>(q)] = 0;
                continue;
            }
            const int s = leg_of[static_cast<std::size_t>(q)];
            const auto& hs = leg_heights[static_cast<std::size_t>(s)];
            const auto it = std::lower_bound(hs.begin(), hs.end(), hgt);
            tf.g.values[static_cast<std::size_t>(q)] =
                leg_base[static_cast<std::size_t>(s)] +
                static_cast<std::int32_t>(it - hs.begin());
        }
        const TreeSpace ts = TreeSpace::from_tree(std::move(tree));
        tf.h = kuratowski_embed(FiniteMetric{
            static_cast<std::size_t>(ts.tree->vertex_count), ts.table});
        tf.g.target = TargetSpace{ts};
        tf.g.validate();
        entry.map = compose_factorization(tf);
        entry.factorization = std::move(tf);
        return entry;
    }

    if (name == "perturbed") {
        if (p.base == "perturbed")
            throw std::invalid_argument("zoo perturbed: base cannot itself be perturbed");
        ZooParams base_params = p;
        base_params.amplitude = 0.0;
        ZooEntry base = zoo(p.base, base_params);
        if (!base.map.target.is_sup_cloud())
            throw std::invalid_argument("zoo perturbed: base must target a SupCloud");
        SupCloud cloud = base.map.target.sup_cloud();
        std::mt19937_64 rng(p.seed);
        std::uniform_real_distribution<double> noise(-p.amplitude, p.amplitude);
        for (auto& pt : cloud.points)
            for (auto& c : pt) c += noise(rng);
        GridMap f = base.map;
        f.target = TargetSpace{std::move(cloud)};
        f.declared_lip =
            std::max(base.map.declared_lip, lipschitz_check(f, LipschitzMode::all_pairs).ratio);
        entry.map = std::move(f);
        return entry;
    }

    if (name == "random_lipschitz") {
        entry.map = random_lipschitz_map(p.n, p.m, p.K, /*coords=*/2, /*anchors=*/5, p.seed);
        return entry;
    }

    throw std::invalid_argument("zoo: unknown map name '" + name + "'");
}

std::vector<std::string> zoo_names() {
    return {"projection",        "constant",  "scaled_projection",
            "fold",              "distance_to_point", "segment_tree",
            "star_tree",         "perturbed", "random_lipschitz"};
}

}  // namespace contentlab
