#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "contentlab/metric.hpp"
#include "contentlab/zoo.hpp"

using namespace contentlab;

namespace {

TargetSpace line_points(std::initializer_list<double> xs) {
    SupCloud sc;
    for (double x : xs) sc.points.push_back({x});
    return TargetSpace{sc};
}

FiniteMetric random_metric(int p, std::mt19937_64& rng) {
    // Coordinates in the plane induce a genuine metric.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<double, double>> pts(p);
    for (auto& q : pts) q = {unif(rng), unif(rng)};
    FiniteMetric fm;
    fm.count = static_cast<std::size_t>(p);
    fm.dist.assign(fm.count * fm.count, 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            fm.dist[static_cast<std::size_t>(i) * p + j] =
                std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    return fm;
}

}  // namespace

TEST_CASE("distance by target kind") {
    const TargetSpace sup{SupCloud{{{0.0, 0.0}, {1.0, 3.0}}}};
    CHECK(sup.distance(0, 1) == doctest::Approx(3.0));

    FiniteMetric fm;
    fm.count = 2;
    fm.dist = {0.0, 5.0, 5.0, 0.0};
    const TargetSpace tfm{fm};
    CHECK(tfm.distance(0, 0) == 0.0);
    CHECK(tfm.distance(0, 1) == doctest::Approx(5.0));

    const TargetSpace tree{TreeSpace::from_tree(star_tree_graph(3, {{1.0}, {2.0}, {0.5}}))};
    CHECK(tree.distance(1, 2) == doctest::Approx(3.0));

    CHECK_THROWS_AS(sup.distance(0, 7), std::out_of_range);
}

TEST_CASE("set distance") {
    const auto line = line_points({0.0, 1.0});
    const std::vector<std::int32_t> A{0}, B{1};
    CHECK(set_distance(line, A, B) == doctest::Approx(1.0));

    const std::vector<std::int32_t> C{0, 1};
    CHECK(set_distance(line, C, B) == 0.0);
    CHECK_THROWS_AS(set_distance(line, {}, B), std::invalid_argument);
}

TEST_CASE("projection faces map to the endpoints") {
    const auto f = zoo("projection", {.n = 1, .m = 1, .K = 2}).map;
    const auto lat = f.lattice();
    std::vector<std::int32_t> lo, hi;
    for (std::int64_t p = 0; p < lat.count(); ++p) {
        const auto c = lat.coords(p);
        if (c[0] == 0) lo.push_back(f.values[p]);
        if (c[0] == lat.per_axis() - 1) hi.push_back(f.values[p]);
    }
    CHECK(set_distance(f.target, lo, hi) == doctest::Approx(1.0));
}

TEST_CASE("kuratowski embedding is isometric") {
    FiniteMetric two;
    two.count = 2;
    two.dist = {0, 5, 5, 0};
    const auto sc = kuratowski_embed(two);
    CHECK(sc.points[0] == std::vector<double>{0, 5});
    CHECK(sc.points[1] == std::vector<double>{5, 0});
    CHECK(TargetSpace{sc}.distance(0, 1) == doctest::Approx(5.0));

    FiniteMetric one;
    one.count = 1;
    one.dist = {0};
    CHECK(kuratowski_embed(one).points[0] == std::vector<double>{0});

    // Path metric 1-2-3 with unit edges, checked exhaustively.
    FiniteMetric path;
    path.count = 3;
    path.dist = {0, 1, 2, 1, 0, 1, 2, 1, 0};
    const TargetSpace emb{kuratowski_embed(path)};
    for (std::int32_t i = 0; i < 3; ++i)
        for (std::int32_t j = 0; j < 3; ++j)
            CHECK(emb.distance(i, j) ==
                  doctest::Approx(path.at(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(j))).epsilon(1e-12));

    // Random finite metrics up to 8 points.
    std::mt19937_64 rng(11);
    for (int it = 0; it < 25; ++it) {
        const auto fm = random_metric(8, rng);
        const TargetSpace e{kuratowski_embed(fm)};
        for (std::int32_t i = 0; i < 8; ++i)
            for (std::int32_t j = 0; j < 8; ++j)
                CHECK(std::abs(e.distance(i, j) -
                               fm.at(static_cast<std::size_t>(i),
                                     static_cast<std::size_t>(j))) <= 1e-12);
    }
}

TEST_CASE("lipschitz check") {
    const auto constant = zoo("constant", {.n = 1, .m = 1, .K = 2}).map;
    CHECK(lipschitz_check(constant, LipschitzMode::all_pairs).ratio == 0.0);

    const auto proj = zoo("projection", {.n = 1, .m = 1, .K = 2}).map;
    const auto rep = lipschitz_check(proj, LipschitzMode::all_pairs);
    CHECK(rep.ratio == doctest::Approx(1.0));
    CHECK_FALSE(rep.violates_declared);

    const auto adj = lipschitz_check(proj, LipschitzMode::adjacent);
    CHECK(adj.ratio == doctest::Approx(1.0));
    CHECK(adj.verified_bound == doctest::Approx(std::sqrt(2.0)));

    // f(x) = 2x on [0,1] declared 1-Lipschitz gets flagged, not rejected.
    GridMap steep;
    steep.n = 1;
    steep.m = 0;
    steep.K = 2;
    steep.declared_lip = 1.0;
    SupCloud sc;
    for (int j = 0; j <= 4; ++j) sc.points.push_back({2.0 * j / 4.0});
    steep.target = TargetSpace{sc};
    steep.values = {0, 1, 2, 3, 4};
    const auto srep = lipschitz_check(steep, LipschitzMode::all_pairs);
    CHECK(srep.ratio == doctest::Approx(2.0));
    CHECK(srep.violates_declared);
}

TEST_CASE("map distance") {
    const auto f = zoo("projection", {.n = 1, .m = 1, .K = 3}).map;
    CHECK(map_distance(MapPair(f, f)).value == 0.0);

    // Shift every coordinate by a constant.
    GridMap g = f;
    SupCloud cloud = f.target.sup_cloud();
    for (auto& p : cloud.points)
        for (auto& c : p) c += 0.25;
    g.target = TargetSpace{cloud};
    const auto md = map_distance(MapPair(f, g));
    CHECK(md.value == doctest::Approx(0.25));
    CHECK(md.continuum_slack == doctest::Approx(2.0 * std::sqrt(2.0) / 16.0));

    // f = projection, g constant 1/2: sup |x - 1/2| over the lattice.
    GridMap h = f;
    SupCloud half;
    half.points.assign(f.target.point_count(), {0.5});
    h.target = TargetSpace{half};
    CHECK(map_distance(MapPair(f, h)).value == doctest::Approx(0.5));

    const auto other = zoo("projection", {.n = 1, .m = 1, .K = 2}).map;
    CHECK_THROWS_AS(MapPair(f, other), std::invalid_argument);
}

TEST_CASE("map distance is a pseudometric on random triples") {
    std::mt19937_64 rng(23);
    std::vector<GridMap> maps;
    for (int s = 0; s < 6; ++s)
        maps.push_back(random_lipschitz_map(1, 1, 2, 2, 4, 100 + s));
    std::uniform_int_distribution<std::size_t> pick(0, maps.size() - 1);
    for (int it = 0; it < 40; ++it) {
        const auto &a = maps[pick(rng)], &b = maps[pick(rng)], &c = maps[pick(rng)];
        const double ab = map_distance(MapPair(a, b)).value;
        const double ba = map_distance(MapPair(b, a)).value;
        const double ac = map_distance(MapPair(a, c)).value;
        const double cb = map_distance(MapPair(c, b)).value;
        CHECK(ab == ba);  // exact symmetry
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("postcompose") {
    const auto f = zoo("projection", {.n = 1, .m = 1, .K = 2}).map;
    const std::size_t count = f.target.point_count();

    // Identity.
    PointMap id;
    id.new_target = f.target;
    id.table.resize(count);
    for (std::size_t i = 0; i < count; ++i) id.table[i] = static_cast<std::int32_t>(i);
    CHECK(postcompose(f, id).values == f.values);

    // Collapse to one point.
    PointMap collapse;
    collapse.new_target = TargetSpace{SupCloud{{{0.0}}}};
    collapse.table.assign(count, 0);
    const auto c = postcompose(f, collapse);
    CHECK(lipschitz_check(c, LipschitzMode::all_pairs).ratio == 0.0);

    // Coordinate projection of a 2-coordinate cloud is 1-Lipschitz in sup.
    const auto fold = zoo("fold", {.n = 1, .m = 1, .K = 2}).map;
    const auto& pts = fold.target.sup_cloud().points;
    SupCloud dropped;
    std::vector<std::int32_t> table;
    for (const auto& p : pts) {
        table.push_back(static_cast<std::int32_t>(dropped.points.size()));
        dropped.points.push_back({p[0]});
    }
    PointMap drop{TargetSpace{dropped}, table};
    const auto g = postcompose(fold, drop);
    CHECK(lipschitz_check(g, LipschitzMode::all_pairs).ratio <=
          lipschitz_check(fold, LipschitzMode::all_pairs).ratio + 1e-15);

    // An expanding table is rejected with a witness in the message.
    PointMap expand;
    SupCloud big = fold.target.sup_cloud();
    for (auto& p : big.points)
        for (auto& x : p) x *= 3.0;
    expand.new_target = TargetSpace{big};
    expand.table = table;  // identity-shaped
    expand.table.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        expand.table[i] = static_cast<std::int32_t>(i);
    CHECK_THROWS_WITH_AS(postcompose(fold, expand),
                         doctest::Contains("not 1-Lipschitz"), std::invalid_argument);
}

TEST_CASE("postcomposition never increases the all-pairs constant") {
    std::mt19937_64 rng(5);
    for (int s = 0; s < 10; ++s) {
        const auto f = random_lipschitz_map(1, 1, 2, 2, 4, 900 + s);
        const std::size_t count = f.target.point_count();
        // Contraction toward the first point.
        SupCloud contracted = f.target.sup_cloud();
        const auto base = contracted.points[0];
        for (auto& p : contracted.points)
            for (std::size_t c = 0; c < p.size(); ++c)
                p[c] = base[c] + 0.5 * (p[c] - base[c]);
        PointMap phi;
        phi.new_target = TargetSpace{contracted};
        phi.table.resize(count);
        for (std::size_t i = 0; i < count; ++i) phi.table[i] = static_cast<std::int32_t>(i);
        const auto g = postcompose(f, phi);
        CHECK(lipschitz_check(g, LipschitzMode::all_pairs).ratio <=
              lipschitz_check(f, LipschitzMode::all_pairs).ratio + 1e-15);
    }
    (void)rng;
}

TEST_CASE("mcshane extension is 1-Lipschitz and interpolates") {
    const Lattice lat{2, 3};
    const std::vector<std::int64_t> anchors{0, 80};  // two corners at K=3
    const std::vector<double> vals{0.0, 1.0};
    const auto ext = mcshane_extend(lat, anchors, vals);
    CHECK(ext[0] == doctest::Approx(0.0));
    // Anchor constraint: min includes the anchor itself only if consistent;
    // here d(corner, corner) = sqrt(2) >= 1 so both anchors keep their value.
    CHECK(ext[80] == doctest::Approx(1.0));
    for (std::int64_t p = 0; p < lat.count(); ++p)
        for (std::int64_t q = p + 1; q < lat.count(); ++q)
            CHECK(std::abs(ext[p] - ext[q]) <= lattice_euclid(lat, p, q) + 1e-12);
}

TEST_CASE("lattice cap is enforced") {
    CHECK_THROWS_AS(enforce_lattice_cap(3, 8), std::invalid_argument);
}
