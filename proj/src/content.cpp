#include "contentlab/content.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

namespace contentlab {

double dyadic_round_up(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("dyadic_round_up: r must be positive");
    int e = 0;
    const double f = std::frexp(r, &e);  // r = f * 2^e, f in [0.5, 1)
    return (f == 0.5) ? std::ldexp(1.0, e - 1) : std::ldexp(1.0, e);
}

namespace {

double pow_int(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

std::vector<double> pairwise_distances(const TargetSpace& space,
                                       std::span<const std::int32_t> A) {
    const std::size_t t = A.size();
    std::vector<double> d(t * t, 0.0);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j)
            d[i * t + j] = d[j * t + i] = space.distance(A[i], A[j]);
    return d;
}

std::vector<double> candidate_radii(double r_min_eff, double diam) {
    std::vector<double> radii{r_min_eff};
    while (radii.back() < diam) radii.push_back(radii.back() * 2.0);
    return radii;
}

}  // namespace

ContentEstimate content_upper(const TargetSpace& space,
                              std::span<const std::int32_t> A, int k, double r_min) {
    if (A.empty()) throw std::invalid_argument("content_upper: empty point set");
    if (k < 1) throw std::invalid_argument("content_upper: k must be >= 1");
    ContentEstimate est;
    est.kind = EstimateKind::upper;
    est.method = "greedy_dyadic_balls";
    est.r_min = dyadic_round_up(r_min);
    est.inflation = pow_int(2.0, k);

    const std::size_t t = A.size();
    const auto dist = pairwise_distances(space, A);
    double diam = 0.0;
    for (double d : dist) diam = std::max(diam, d);
    if (diam == 0.0) {
        // One metric point: zero content, covered at the r_min scale in the
        // continuum.
        est.balls.push_back({A[0], 0.0});
        est.continuum_value = pow_int(2.0 * est.r_min, k);
        return est;
    }
    const auto radii = candidate_radii(est.r_min, diam);

    std::vector<char> covered(t, 0);
    std::size_t remaining = t;
    while (remaining > 0) {
        // Best candidate: max newly-covered per cost, then most covered,
        // then smallest center index, then smallest radius.
        std::size_t best_c = 0;
        double best_r = radii[0];
        std::size_t best_cnt = 0;
        double best_ratio = -1.0;
        for (std::size_t c = 0; c < t; ++c) {
            for (double r : radii) {
                std::size_t cnt = 0;
                for (std::size_t i = 0; i < t; ++i)
                    if (!covered[i] && dist[c * t + i] <= r) ++cnt;
                if (cnt == 0) continue;
                const double cost = pow_int(2.0 * r, k);
                const double ratio = static_cast<double>(cnt) / cost;
                bool better = false;
                if (ratio > best_ratio * (1.0 + 1e-12)) better = true;
                else if (ratio >= best_ratio * (1.0 - 1e-12)) {
                    if (cnt > best_cnt) better = true;
                    // center index ties resolve in favor of the earlier c,
                    // and radii sweep ascending, so first hit wins.
                }
                if (better) {
                    best_ratio = ratio;
                    best_cnt = cnt;
                    best_c = c;
                    best_r = r;
                }
            }
        }
        est.balls.push_back({A[best_c], best_r});
        est.value += pow_int(2.0 * best_r, k);
        est.continuum_value += pow_int(4.0 * best_r, k);
        for (std::size_t i = 0; i < t; ++i)
            if (!covered[i] && dist[best_c * t + i] <= best_r) {
                covered[i] = 1;
                --remaining;
            }
    }
    return est;
}

ContentEstimate content_exact_small(const TargetSpace& space,
                                    std::span<const std::int32_t> A, int k,
                                    int max_parts, int threshold) {
    if (A.empty()) throw std::invalid_argument("content_exact_small: empty point set");
    if (static_cast<int>(A.size()) > threshold)
        throw std::invalid_argument("content_exact_small: more than " +
                                    std::to_string(threshold) + " points");
    const std::size_t t = A.size();
    const auto dist = pairwise_distances(space, A);

    // Exhaustive search over set partitions with branch-and-bound: assign
    // point i to an existing block or open a new one. Block diameters only
    // grow, so the running cost is a valid lower bound.
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<double> block_diam;

    auto cost_of = [&](double diam) { return pow_int(diam, k); };

    auto rec = [&](auto&& self, std::size_t i, double cost) -> void {
        if (cost >= best) return;
        if (i == t) {
            best = cost;
            return;
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            double nd = block_diam[b];
            for (auto j : blocks[b]) nd = std::max(nd, dist[i * t + j]);
            const double delta = cost_of(nd) - cost_of(block_diam[b]);
            const double saved = block_diam[b];
            blocks[b].push_back(i);
            block_diam[b] = nd;
            self(self, i + 1, cost + delta);
            blocks[b].pop_back();
            block_diam[b] = saved;
        }
        if (max_parts <= 0 || static_cast<int>(blocks.size()) < max_parts) {
            blocks.push_back({i});
            block_diam.push_back(0.0);
            self(self, i + 1, cost);
            blocks.pop_back();
            block_diam.pop_back();
        }
    };
    rec(rec, 0, 0.0);

    ContentEstimate est;
    est.kind = EstimateKind::exact_small;
    est.method = "exact_partition";
    est.value = best;
    return est;
}

ContentEstimate content_balls_exact(const TargetSpace& space,
                                    std::span<const std::int32_t> A, int k,
                                    double r_min, int threshold) {
    if (A.empty()) throw std::invalid_argument("content_balls_exact: empty point set");
    if (static_cast<int>(A.size()) > threshold)
        throw std::invalid_argument("content_balls_exact: more than " +
                                    std::to_string(threshold) + " points");
    const std::size_t t = A.size();
    const double r_eff = dyadic_round_up(r_min);
    const auto dist = pairwise_distances(space, A);
    double diam = 0.0;
    for (double d : dist) diam = std::max(diam, d);
    if (diam == 0.0) {
        ContentEstimate est;
        est.kind = EstimateKind::upper;
        est.method = "balls_exact";
        est.r_min = r_eff;
        est.inflation = pow_int(2.0, k);
        est.balls.push_back({A[0], 0.0});
        est.continuum_value = pow_int(2.0 * r_eff, k);
        return est;
    }
    const auto radii = candidate_radii(r_eff, diam);

    struct Ball {
        std::uint32_t mask;
        double cost;
        std::int32_t center;
        double radius;
    };
    std::vector<Ball> balls;
    for (std::size_t c = 0; c < t; ++c)
        for (double r : radii) {
            std::uint32_t mask = 0;
            for (std::size_t i = 0; i < t; ++i)
                if (dist[c * t + i] <= r) mask |= (1u << i);
            balls.push_back({mask, pow_int(2.0 * r, k), A[c], r});
        }

    const std::uint32_t full = (t == 32) ? 0xffffffffu : ((1u << t) - 1);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(full + 1, inf);
    std::vector<std::int32_t> choice(full + 1, -1);
    std::vector<std::uint32_t> from(full + 1, 0);
    dp[0] = 0.0;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        if (dp[mask] == inf) continue;
        std::uint32_t need = 0;
        while (mask & (1u << need)) ++need;  // lowest uncovered point
        for (std::size_t b = 0; b < balls.size(); ++b) {
            if (!(balls[b].mask & (1u << need))) continue;
            const std::uint32_t nm = mask | balls[b].mask;
            if (dp[mask] + balls[b].cost < dp[nm]) {
                dp[nm] = dp[mask] + balls[b].cost;
                choice[nm] = static_cast<std::int32_t>(b);
                from[nm] = mask;
            }
        }
    }

    ContentEstimate est;
    est.kind = EstimateKind::upper;
    est.method = "balls_exact";
    est.r_min = r_eff;
    est.inflation = pow_int(2.0, k);
    est.value = dp[full];
    for (std::uint32_t mask = full; mask != 0 && choice[mask] >= 0; mask = from[mask]) {
        const auto& b = balls[static_cast<std::size_t>(choice[mask])];
        est.balls.push_back({b.center, b.radius});
        est.continuum_value += pow_int(4.0 * b.radius, k);
    }
    return est;
}

namespace {

struct DPContext {
    const GridMap& f;
    Lattice lat;
    int l_max;
    DPOptions opts;
    double r_eff;

    std::pair<double, double> term(const DyadicCube& q) const {
        const auto idx = lat.cube_indices(q);
        const auto img = f.image_points(idx);
        ContentEstimate est =
            (opts.mode == TermMode::greedy)
                ? content_upper(f.target, img, f.n, r_eff)
                : content_balls_exact(f.target, img, f.n, r_eff, opts.exact_threshold);
        const double side_m = pow_int(q.side(), f.m);
        return {est.value * side_m, est.continuum_value * side_m};
    }

    // Returns the optimal (value, continuum value) and the realizing cover.
    // Ties at a parent keep the parent: coarser covers for free.
    std::pair<double, double> solve(const DyadicCube& q, std::vector<DyadicCube>& cover,
                                    std::vector<double>& terms) const {
        const auto own = term(q);
        if (q.level >= l_max) {
            cover.push_back(q);
            terms.push_back(own.first);
            return own;
        }
        std::vector<DyadicCube> sub_cover;
        std::vector<double> sub_terms;
        std::pair<double, double> sub_total{0.0, 0.0};
        for (const auto& child : children(q)) {
            const auto c = solve(child, sub_cover, sub_terms);
            sub_total.first += c.first;
            sub_total.second += c.second;
        }
        if (own.first <= sub_total.first) {
            cover.push_back(q);
            terms.push_back(own.first);
            return own;
        }
        cover.insert(cover.end(), sub_cover.begin(), sub_cover.end());
        terms.insert(terms.end(), sub_terms.begin(), sub_terms.end());
        return sub_total;
    }
};

}  // namespace

DPResult mapping_content_upper(const GridMap& f, int L_max, const DPOptions& opts) {
    if (L_max < 0 || L_max > f.K)
        throw std::invalid_argument("mapping_content_upper: need 0 <= L_max <= K");
    const int d = f.dim();
    double r_eff;
    if (opts.r_min) {
        r_eff = dyadic_round_up(*opts.r_min);
    } else {
        // Default radius grid starts strictly above the image-cell diameter
        // bound sqrt(d) * 2^-K * Lip, so each ball covers its cell with
        // margin.
        const double cell = std::sqrt(static_cast<double>(d)) * std::ldexp(1.0, -f.K) *
                            f.declared_lip;
        r_eff = dyadic_round_up(cell);
        if (r_eff == cell) r_eff *= 2.0;
    }
    DPContext ctx{f, f.lattice(), L_max, opts, r_eff};

    DPResult out;
    out.r_min = ctx.r_eff;
    out.inflation = pow_int(2.0, f.n);
    out.mode = opts.mode;
    out.l_max = L_max;
    const auto v = ctx.solve(root_cube(d), out.cover, out.per_cube);
    out.value = v.first;
    out.continuum_value = v.second;
    return out;
}

FaceCertificate faces_lower_bound(const GridMap& f) {
    if (f.n < 1) throw std::invalid_argument("faces_lower_bound: requires n >= 1");
    const auto lat = f.lattice();
    const auto q0 = root_cube(f.dim());
    FaceCertificate cert;
    cert.per_axis_error = f.declared_lip * std::sqrt(static_cast<double>(f.dim())) *
                          std::ldexp(1.0, -f.K);
    cert.product = 1.0;
    double adjusted = 1.0;
    for (int axis = 0; axis < f.n; ++axis) {
        const auto lo_pts = face_lattice_points({q0, axis, false}, f.K);
        const auto hi_pts = face_lattice_points({q0, axis, true}, f.K);
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::int64_t, std::int64_t> wit{-1, -1};
        for (const auto& pc : lo_pts) {
            const auto p = lat.index(pc);
            for (const auto& qc : hi_pts) {
                const auto q = lat.index(qc);
                const double dv = f.dist_values(p, q);
                if (dv < best) {
                    best = dv;
                    wit = {p, q};
                }
            }
        }
        cert.axis_distances.push_back(best);
        cert.witnesses.push_back(wit);
        cert.product *= best;
        adjusted *= std::max(0.0, best - cert.per_axis_error);
    }
    cert.sampling_error = cert.product - adjusted;
    return cert;
}

namespace {

bool sorted_intersect(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

void check_weight_shape(const std::vector<std::vector<std::int64_t>>& sets,
                        const std::vector<std::vector<double>>& weights) {
    if (weights.size() != sets.size())
        throw std::invalid_argument("CoverWeighting: one weight row per set required");
    for (const auto& row : weights)
        for (double w : row)
            if (w < 0.0) throw std::invalid_argument("CoverWeighting: negative weight");
}

}  // namespace

CoverWeighting cover_from_sets(CoverUniverse universe,
                               std::vector<std::vector<std::int64_t>> sets,
                               std::vector<std::vector<double>> weights) {
    check_weight_shape(sets, weights);
    CoverWeighting cw;
    cw.universe = universe;
    for (auto& s : sets) std::sort(s.begin(), s.end());
    cw.sets = std::move(sets);
    cw.weights = std::move(weights);
    cw.adjacency.resize(cw.sets.size());
    for (std::size_t i = 0; i < cw.sets.size(); ++i)
        for (std::size_t j = i + 1; j < cw.sets.size(); ++j)
            if (sorted_intersect(cw.sets[i], cw.sets[j])) {
                cw.adjacency[i].push_back(static_cast<std::int32_t>(j));
                cw.adjacency[j].push_back(static_cast<std::int32_t>(i));
            }
    return cw;
}

CoverWeighting cover_from_balls(const TargetSpace& space,
                                std::span<const std::int32_t> A,
                                std::span<const BallSpec> balls,
                                std::vector<std::vector<double>> weights) {
    CoverWeighting cw;
    cw.universe = CoverUniverse::target_points;
    cw.sets.resize(balls.size());
    for (std::size_t b = 0; b < balls.size(); ++b) {
        for (auto a : A)
            if (space.distance(a, balls[b].center) <= balls[b].radius)
                cw.sets[b].push_back(a);
        std::sort(cw.sets[b].begin(), cw.sets[b].end());
    }
    check_weight_shape(cw.sets, weights);
    cw.weights = std::move(weights);
    cw.adjacency.resize(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i)
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            // Ball intersection in the ambient sup-metric space; matches
            // continuum box intersection for SupClouds.
            if (space.distance(balls[i].center, balls[j].center) <=
                balls[i].radius + balls[j].radius + 1e-12) {
                cw.adjacency[i].push_back(static_cast<std::int32_t>(j));
                cw.adjacency[j].push_back(static_cast<std::int32_t>(i));
            }
        }
    return cw;
}

double chain_distance(const CoverWeighting& cw, int axis,
                      std::span<const std::int64_t> E,
                      std::span<const std::int64_t> F) {
    const std::size_t ns = cw.set_count();
    if (axis < 0 || (ns > 0 && axis >= static_cast<int>(cw.weights[0].size())))
        throw std::invalid_argument("chain_distance: axis out of range");
    const double inf = kInfiniteDistance;
    std::vector<double> dist(ns, inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t s = 0; s < ns; ++s)
        if (sorted_intersect(cw.sets[s], E)) {
            dist[s] = cw.weights[s][axis];
            pq.emplace(dist[s], s);
        }
    double best = inf;
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u]) continue;
        for (auto v : cw.adjacency[u]) {
            const double nd = du + cw.weights[v][axis];
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    for (std::size_t s = 0; s < ns; ++s)
        if (dist[s] < best && sorted_intersect(cw.sets[s], F)) best = dist[s];
    return best;
}

namespace {

std::vector<std::int64_t> face_universe_ids(const GridMap& g, const CoverWeighting& cw,
                                            int axis, bool high) {
    const auto lat = g.lattice();
    const auto pts = face_lattice_points({root_cube(g.dim()), axis, high}, g.K);
    std::vector<std::int64_t> ids;
    ids.reserve(pts.size());
    for (const auto& pc : pts) {
        const auto p = lat.index(pc);
        ids.push_back(cw.universe == CoverUniverse::lattice_points
                          ? p
                          : static_cast<std::int64_t>(g.values[p]));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

KinnebergReport kinneberg_check(const GridMap& g, const CoverWeighting& cw) {
    const int d = g.dim();
    for (const auto& row : cw.weights)
        if (static_cast<int>(row.size()) != d)
            throw std::invalid_argument("kinneberg_check: weight rows must have d entries");

    // Coverage precheck over the sampled picture.
    std::vector<std::int64_t> universe;
    if (cw.universe == CoverUniverse::target_points) {
        for (auto v : g.image_points_all()) universe.push_back(v);
    } else {
        universe.resize(static_cast<std::size_t>(g.lattice().count()));
        for (std::size_t i = 0; i < universe.size(); ++i)
            universe[i] = static_cast<std::int64_t>(i);
    }
    std::vector<std::int64_t> covered;
    for (const auto& s : cw.sets) covered.insert(covered.end(), s.begin(), s.end());
    std::sort(covered.begin(), covered.end());
    for (auto u : universe)
        if (!std::binary_search(covered.begin(), covered.end(), u))
            throw std::invalid_argument("kinneberg_check: cover misses sampled point " +
                                        std::to_string(u));

    KinnebergReport rep;
    for (std::size_t i = 0; i < cw.set_count(); ++i) {
        double prod = 1.0;
        for (int k = 0; k < d; ++k) prod *= cw.weights[i][k];
        rep.lhs += prod;
    }
    rep.rhs = 1.0;
    for (int k = 0; k < d; ++k) {
        const auto E = face_universe_ids(g, cw, k, false);
        const auto F = face_universe_ids(g, cw, k, true);
        const double cd = chain_distance(cw, k, E, F);
        rep.per_axis.push_back(cd);
        rep.rhs *= cd;
    }
    rep.holds = rep.lhs >= rep.rhs - 1e-9;
    return rep;
}

CoverWeighting lifted_cover(const GridMap& f,
                            const std::vector<std::vector<std::int64_t>>& domain_sets,
                            const std::vector<std::vector<BallSpec>>& image_covers,
                            double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("lifted_cover: eta must be positive");
    if (image_covers.size() != domain_sets.size())
        throw std::invalid_argument("lifted_cover: one image cover per domain set");
    const auto lat = f.lattice();
    const std::int64_t total = lat.count();

    // Domain sets must cover the lattice.
    {
        std::vector<char> seen(static_cast<std::size_t>(total), 0);
        for (const auto& s : domain_sets)
            for (auto p : s) {
                if (p < 0 || p >= total)
                    throw std::invalid_argument("lifted_cover: lattice index out of range");
                seen[static_cast<std::size_t>(p)] = 1;
            }
        for (std::int64_t p = 0; p < total; ++p)
            if (!seen[static_cast<std::size_t>(p)])
                throw std::invalid_argument("lifted_cover: domain sets miss lattice point " +
                                            std::to_string(p));
    }

    // Per domain set: Euclidean diameter and distinct y-blocks (real coords).
    const int d = f.dim();
    const int n = f.n;
    const int mm = f.m;
    std::vector<double> s_diam(domain_sets.size(), 0.0);
    std::vector<std::vector<std::vector<double>>> s_yproj(domain_sets.size());
    for (std::size_t i = 0; i < domain_sets.size(); ++i) {
        const auto& s = domain_sets[i];
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b)
                s_diam[i] = std::max(s_diam[i], lattice_euclid(lat, s[a], s[b]));
        std::vector<std::vector<double>> ys;
        for (auto p : s) {
            const auto pt = lat.point(p);
            ys.emplace_back(pt.begin() + n, pt.end());
        }
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        s_yproj[i] = std::move(ys);
    }

    auto y_euclid = [mm](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int c = 0; c < mm; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        return std::sqrt(s);
    };
    auto y_set_dist = [&](std::size_t i, std::size_t j) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : s_yproj[i])
            for (const auto& b : s_yproj[j]) best = std::min(best, y_euclid(a, b));
        return best;
    };

    CoverWeighting cw;
    cw.universe = CoverUniverse::lattice_points;
    struct LiftedMeta {
        std::size_t domain;  // i
        BallSpec ball;       // U^i_j
    };
    std::vector<LiftedMeta> meta;

    for (std::size_t i = 0; i < domain_sets.size(); ++i) {
        // Image cover must cover f(S_i) samples.
        for (auto p : domain_sets[i]) {
            bool ok = false;
            for (const auto& b : image_covers[i])
                if (f.target.distance(f.values[p], b.center) <= b.radius) {
                    ok = true;
                    break;
                }
            if (!ok)
                throw std::invalid_argument(
                    "lifted_cover: image cover of domain set " + std::to_string(i) +
                    " misses the image of lattice point " + std::to_string(p));
        }
        for (const auto& ball : image_covers[i]) {
            std::vector<std::int64_t> members;
            for (std::int64_t p = 0; p < total; ++p) {
                if (f.target.distance(f.values[p], ball.center) > ball.radius) continue;
                const auto pt = lat.point(p);
                const std::vector<double> y(pt.begin() + n, pt.end());
                double dy = std::numeric_limits<double>::infinity();
                for (const auto& yb : s_yproj[i]) dy = std::min(dy, y_euclid(y, yb));
                if (mm == 0 || dy < eta) members.push_back(p);
            }
            std::vector<double> w(d, 0.0);
            for (int k = 0; k < d; ++k)
                w[k] = (k < n) ? 2.0 * ball.radius : s_diam[i] + 2.0 * eta;
            cw.sets.push_back(std::move(members));
            cw.weights.push_back(std::move(w));
            meta.push_back({i, ball});
        }
    }

    // Nerve from product geometry: image balls intersect and the eta
    // neighborhoods of the y projections intersect.
    cw.adjacency.resize(cw.sets.size());
    for (std::size_t a = 0; a < meta.size(); ++a)
        for (std::size_t b = a + 1; b < meta.size(); ++b) {
            const bool img_meet =
                f.target.distance(meta[a].ball.center, meta[b].ball.center) <=
                meta[a].ball.radius + meta[b].ball.radius + 1e-12;
            const bool y_meet =
                mm == 0 || y_set_dist(meta[a].domain, meta[b].domain) < 2.0 * eta;
            if (img_meet && y_meet) {
                cw.adjacency[a].push_back(static_cast<std::int32_t>(b));
                cw.adjacency[b].push_back(static_cast<std::int32_t>(a));
            }
        }
    return cw;
}

}  // namespace contentlab
