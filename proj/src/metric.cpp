#include "contentlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace contentlab {

void FiniteMetric::validate(double tol) const {
    if (dist.size() != count * count)
        throw std::invalid_argument("FiniteMetric: matrix size mismatch");
    for (std::size_t i = 0; i < count; ++i) {
        if (std::abs(at(i, i)) > tol)
            throw std::invalid_argument("FiniteMetric: nonzero diagonal");
        for (std::size_t j = 0; j < count; ++j) {
            if (at(i, j) < -tol || std::abs(at(i, j) - at(j, i)) > tol)
                throw std::invalid_argument("FiniteMetric: not symmetric nonnegative");
        }
    }
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < count; ++j)
            for (std::size_t k = 0; k < count; ++k)
                if (at(i, k) > at(i, j) + at(j, k) + tol)
                    throw std::invalid_argument("FiniteMetric: triangle inequality fails");
}

TreeSpace TreeSpace::from_tree(MetricTree t) {
    const auto val = validate_tree(t);
    if (!val.pass())
        throw std::invalid_argument("TreeSpace: graph is not a metric tree");
    TreeSpace ts;
    ts.table = graph_path_metric(t);
    ts.tree = std::make_shared<const MetricTree>(std::move(t));
    return ts;
}

std::size_t TargetSpace::point_count() const {
    if (const auto* sc = std::get_if<SupCloud>(&space)) return sc->points.size();
    if (const auto* fm = std::get_if<FiniteMetric>(&space)) return fm->count;
    return static_cast<std::size_t>(std::get<TreeSpace>(space).tree->vertex_count);
}

double TargetSpace::distance(std::int32_t a, std::int32_t b) const {
    const auto nc = point_count();
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= nc ||
        static_cast<std::size_t>(b) >= nc)
        throw std::out_of_range("TargetSpace::distance: index out of range");
    if (const auto* sc = std::get_if<SupCloud>(&space)) {
        const auto& p = sc->points[static_cast<std::size_t>(a)];
        const auto& q = sc->points[static_cast<std::size_t>(b)];
        double d = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c)
            d = std::max(d, std::abs(p[c] - q[c]));
        return d;
    }
    if (const auto* fm = std::get_if<FiniteMetric>(&space))
        return fm->at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    const auto& ts = std::get<TreeSpace>(space);
    return ts.table[static_cast<std::size_t>(a) * nc + static_cast<std::size_t>(b)];
}

double TargetSpace::diameter() const {
    const std::size_t nc = point_count();
    double d = 0.0;
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = i + 1; j < nc; ++j)
            d = std::max(d, distance(static_cast<std::int32_t>(i),
                                     static_cast<std::int32_t>(j)));
    return d;
}

SetDistanceWitness set_distance_witness(const TargetSpace& space,
                                        std::span<const std::int32_t> A,
                                        std::span<const std::int32_t> B) {
    if (A.empty() || B.empty())
        throw std::invalid_argument("set_distance: empty point set");
    SetDistanceWitness w;
    w.value = std::numeric_limits<double>::infinity();
    for (auto a : A)
        for (auto b : B) {
            const double d = space.distance(a, b);
            if (d < w.value) {
                w.value = d;
                w.a = a;
                w.b = b;
            }
        }
    return w;
}

double set_distance(const TargetSpace& space, std::span<const std::int32_t> A,
                    std::span<const std::int32_t> B) {
    return set_distance_witness(space, A, B).value;
}

SupCloud kuratowski_embed(const FiniteMetric& fm) {
    SupCloud sc;
    sc.points.resize(fm.count);
    for (std::size_t i = 0; i < fm.count; ++i) {
        sc.points[i].resize(fm.count);
        for (std::size_t j = 0; j < fm.count; ++j) sc.points[i][j] = fm.at(i, j);
    }
    return sc;
}

std::int64_t Lattice::count() const {
    std::int64_t c = 1;
    for (int i = 0; i < d; ++i) c *= per_axis();
    return c;
}

std::vector<std::int64_t> Lattice::coords(std::int64_t idx) const {
    std::vector<std::int64_t> c(d);
    const std::int64_t pa = per_axis();
    for (int i = d - 1; i >= 0; --i) {
        c[i] = idx % pa;
        idx /= pa;
    }
    return c;
}

std::int64_t Lattice::index(std::span<const std::int64_t> c) const {
    const std::int64_t pa = per_axis();
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) {
        if (c[i] < 0 || c[i] >= pa) throw std::out_of_range("Lattice::index");
        idx = idx * pa + c[i];
    }
    return idx;
}

std::vector<double> Lattice::point(std::int64_t idx) const {
    const auto c = coords(idx);
    std::vector<double> p(d);
    const double h = spacing();
    for (int i = 0; i < d; ++i) p[i] = static_cast<double>(c[i]) * h;
    return p;
}

std::vector<std::int64_t> Lattice::box_indices(std::span<const std::int64_t> lo,
                                               std::span<const std::int64_t> hi) const {
    std::vector<std::int64_t> out;
    std::vector<std::int64_t> c(lo.begin(), lo.end());
    for (int i = 0; i < d; ++i)
        if (lo[i] > hi[i]) return out;
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= (hi[i] - lo[i] + 1);
    out.reserve(total);
    while (true) {
        out.push_back(index(c));
        int i = d - 1;
        for (; i >= 0; --i) {
            if (++c[i] <= hi[i]) break;
            c[i] = lo[i];
        }
        if (i < 0) break;
    }
    return out;
}

std::vector<std::int64_t> Lattice::cube_indices(const DyadicCube& q) const {
    const auto lo = q.corner_at(K);
    std::vector<std::int64_t> hi(lo);
    const std::int64_t span = q.span_at(K);
    for (auto& h : hi) h += span;
    return box_indices(lo, hi);
}

double lattice_euclid(const Lattice& lat, std::int64_t a, std::int64_t b) {
    const auto ca = lat.coords(a);
    const auto cb = lat.coords(b);
    double s = 0.0;
    for (int i = 0; i < lat.d; ++i) {
        const double di = static_cast<double>(ca[i] - cb[i]);
        s += di * di;
    }
    return std::sqrt(s) * lat.spacing();
}

void GridMap::validate() const {
    if (n < 0 || m < 0 || n + m <= 0) throw std::invalid_argument("GridMap: bad n,m");
    if (K < 0 || K > kMaxLevel) throw std::invalid_argument("GridMap: bad K");
    enforce_lattice_cap(n + m, K);
    const auto lat = lattice();
    if (static_cast<std::int64_t>(values.size()) != lat.count())
        throw std::invalid_argument("GridMap: values size != lattice size");
    const auto nc = target.point_count();
    for (auto v : values)
        if (v < 0 || static_cast<std::size_t>(v) >= nc)
            throw std::invalid_argument("GridMap: value index out of range");
    if (!(declared_lip > 0.0))
        throw std::invalid_argument("GridMap: declared_lip must be positive");
}

std::vector<std::int32_t> GridMap::image_points(std::span<const std::int64_t> lattice_idx) const {
    std::vector<std::int32_t> out;
    out.reserve(lattice_idx.size());
    for (auto p : lattice_idx) out.push_back(values[p]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::int32_t> GridMap::image_points_all() const {
    std::vector<std::int32_t> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::int64_t max_lattice_points() {
    if (const char* env = std::getenv("CONTENTLAB_MAX_POINTS")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 50000;
}

void enforce_lattice_cap(int d, int K) {
    const Lattice lat{d, K};
    const std::int64_t cap = max_lattice_points();
    std::int64_t c = 1;
    for (int i = 0; i < d; ++i) {
        c *= lat.per_axis();
        if (c > cap)
            throw std::invalid_argument(
                "lattice size exceeds CONTENTLAB_MAX_POINTS cap of " + std::to_string(cap));
    }
}

LipschitzReport lipschitz_check(const GridMap& f, LipschitzMode mode) {
    LipschitzReport r;
    r.mode = mode;
    const auto lat = f.lattice();
    const std::int64_t total = lat.count();
    if (mode == LipschitzMode::all_pairs) {
        for (std::int64_t a = 0; a < total; ++a) {
            for (std::int64_t b = a + 1; b < total; ++b) {
                const double num = f.dist_values(a, b);
                if (num == 0.0) continue;
                const double ratio = num / lattice_euclid(lat, a, b);
                if (ratio > r.ratio) {
                    r.ratio = ratio;
                    r.witness_a = a;
                    r.witness_b = b;
                }
            }
        }
        r.verified_bound = r.ratio;
    } else {
        const double h = lat.spacing();
        std::int64_t stride = 1;
        for (int axis = lat.d - 1; axis >= 0; --axis) {
            for (std::int64_t a = 0; a < total; ++a) {
                const auto c = lat.coords(a);
                if (c[axis] + 1 >= lat.per_axis()) continue;
                const std::int64_t b = a + stride;
                const double ratio = f.dist_values(a, b) / h;
                if (ratio > r.ratio) {
                    r.ratio = ratio;
                    r.witness_a = a;
                    r.witness_b = b;
                }
            }
            stride *= lat.per_axis();
        }
        // Chaining axis steps: any pair differs by at most ratio * l1-length,
        // and |v|_1 <= sqrt(d) |v|_2.
        r.verified_bound = r.ratio * std::sqrt(static_cast<double>(lat.d));
    }
    r.violates_declared = r.verified_bound > f.declared_lip + 1e-12;
    return r;
}

MapPair::MapPair(const GridMap& f_, const GridMap& g_) : f(f_), g(g_) {
    if (f.n != g.n || f.m != g.m || f.K != g.K)
        throw std::invalid_argument("MapPair: maps do not share a lattice");
    if (!f.target.is_sup_cloud() || !g.target.is_sup_cloud())
        throw std::invalid_argument("MapPair: both targets must be SupClouds");
    if (f.target.sup_cloud().coord_count() != g.target.sup_cloud().coord_count())
        throw std::invalid_argument("MapPair: coordinate counts differ");
}

MapDistance map_distance(const MapPair& pair) {
    const auto& fc = pair.f.target.sup_cloud();
    const auto& gc = pair.g.target.sup_cloud();
    const auto lat = pair.f.lattice();
    MapDistance out;
    const std::int64_t total = lat.count();
    for (std::int64_t p = 0; p < total; ++p) {
        const auto& a = fc.points[static_cast<std::size_t>(pair.f.values[p])];
        const auto& b = gc.points[static_cast<std::size_t>(pair.g.values[p])];
        double d = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c)
            d = std::max(d, std::abs(a[c] - b[c]));
        if (d > out.value) {
            out.value = d;
            out.witness = p;
        }
    }
    out.continuum_slack = (pair.f.declared_lip + pair.g.declared_lip) *
                          std::sqrt(static_cast<double>(lat.d)) *
                          std::ldexp(1.0, -(pair.f.K + 1));
    return out;
}

GridMap postcompose(const GridMap& f, const PointMap& phi, double tol) {
    const std::size_t old_count = f.target.point_count();
    if (phi.table.size() != old_count)
        throw std::invalid_argument("postcompose: table size != target point count");
    const std::size_t new_count = phi.new_target.point_count();
    for (auto t : phi.table)
        if (t < 0 || static_cast<std::size_t>(t) >= new_count)
            throw std::invalid_argument("postcompose: table entry out of range");
    for (std::size_t i = 0; i < old_count; ++i)
        for (std::size_t j = i + 1; j < old_count; ++j) {
            const double before = f.target.distance(static_cast<std::int32_t>(i),
                                                    static_cast<std::int32_t>(j));
            const double after = phi.new_target.distance(phi.table[i], phi.table[j]);
            if (after > before + tol)
                throw std::invalid_argument(
                    "postcompose: phi is not 1-Lipschitz at pair (" + std::to_string(i) +
                    "," + std::to_string(j) + "): " + std::to_string(after) + " > " +
                    std::to_string(before));
        }
    GridMap out;
    out.n = f.n;
    out.m = f.m;
    out.K = f.K;
    out.target = phi.new_target;
    out.declared_lip = f.declared_lip;
    out.values.resize(f.values.size());
    for (std::size_t p = 0; p < f.values.size(); ++p)
        out.values[p] = phi.table[static_cast<std::size_t>(f.values[p])];
    return out;
}

std::vector<double> mcshane_extend(const Lattice& lat,
                                   std::span<const std::int64_t> anchor_idx,
                                   std::span<const double> anchor_values) {
    if (anchor_idx.empty() || anchor_idx.size() != anchor_values.size())
        throw std::invalid_argument("mcshane_extend: bad anchors");
    const std::int64_t total = lat.count();
    std::vector<double> out(total);
    for (std::int64_t p = 0; p < total; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < anchor_idx.size(); ++a)
            best = std::min(best, anchor_values[a] + lattice_euclid(lat, p, anchor_idx[a]));
        out[p] = best;
    }
    return out;
}

}  // namespace contentlab
