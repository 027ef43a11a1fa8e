// Acceptance suite: one self-contained check per criterion, each printing a
// PASS/FAIL line with its runtime. Exit code = number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contentlab/experiments.hpp"
#include "contentlab/seminorm.hpp"
#include "contentlab/serialize.hpp"
#include "contentlab/zoo.hpp"

using namespace contentlab;

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << why;
        }
    }
};

std::string g_cli;
std::string g_workdir = "acceptance_work";

// ---------------------------------------------------------------------------
// Criterion 1: projection exactness + brute-force dyadic cover oracle.
// ---------------------------------------------------------------------------

void enumerate_cover_sums(const GridMap& f, const DyadicCube& q, int l_max, double r_min,
                          std::vector<double>& out) {
    const auto lat = f.lattice();
    const auto img = f.image_points(lat.cube_indices(q));
    const double own =
        content_upper(f.target, img, f.n, r_min).value * std::pow(q.side(), f.m);
    if (q.level >= l_max) {
        out = {own};
        return;
    }
    std::vector<std::vector<double>> child_sums;
    for (const auto& c : children(q)) {
        child_sums.emplace_back();
        enumerate_cover_sums(f, c, l_max, r_min, child_sums.back());
    }
    std::vector<double> combos{0.0};
    for (const auto& cs : child_sums) {
        std::vector<double> next;
        next.reserve(combos.size() * cs.size());
        for (double a : combos)
            for (double b : cs) next.push_back(a + b);
        combos = std::move(next);
    }
    out.clear();
    out.push_back(own);
    out.insert(out.end(), combos.begin(), combos.end());
}

Check criterion1() {
    Check c;
    const auto f = zoo("projection", {.n = 1, .m = 1, .K = 3}).map;
    const auto faces = faces_lower_bound(f);
    c.require(faces.product == 1.0, "faces product != 1 exactly");
    const auto dp = mapping_content_upper(f, 3);
    c.require(std::abs(dp.value - 1.0) <= 1e-9, "dp value not 1 within 1e-9");
    std::vector<double> sums;
    enumerate_cover_sums(f, root_cube(2), 3, dp.r_min, sums);
    const double brute = *std::min_element(sums.begin(), sums.end());
    c.require(std::abs(dp.value - brute) <= 1e-12,
              "brute-force dyadic cover oracle disagrees with the DP");
    c.detail << "dp=" << dp.value << " faces=" << faces.product << " brute(" << sums.size()
             << " covers)=" << brute;
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 2: sandwich on 50 random 1-Lipschitz maps and the zoo.
// ---------------------------------------------------------------------------

std::vector<ZooEntry> full_zoo(int K) {
    std::vector<ZooEntry> out;
    out.push_back(zoo("projection", {.n = 1, .m = 1, .K = K}));
    out.push_back(zoo("constant", {.n = 1, .m = 1, .K = K}));
    out.push_back(zoo("scaled_projection", {.n = 1, .m = 1, .K = K, .alpha = 0.5}));
    out.push_back(zoo("fold", {.n = 1, .m = 1, .K = K}));
    out.push_back(zoo("distance_to_point", {.n = 1, .m = 1, .K = K}));
    out.push_back(zoo("segment_tree", {.n = 2, .m = 0, .K = K}));
    out.push_back(zoo("star_tree", {.n = 2, .m = 0, .K = K, .legs = 4}));
    {
        ZooParams p{.n = 1, .m = 1, .K = K};
        p.base = "projection";
        p.amplitude = 0.05;
        p.seed = 9;
        out.push_back(zoo("perturbed", p));
    }
    out.push_back(zoo("random_lipschitz", {.n = 1, .m = 1, .K = K, .seed = 12}));
    return out;
}

Check criterion2() {
    Check c;
    int checked = 0;
    for (int s = 0; s < 50; ++s) {
        const auto f = random_lipschitz_map(1, 1, 3, 2, 5, 5000 + s);
        const auto rep = content_experiment(f, 3);
        c.require(rep.sandwich_ok, "sandwich fails on random map seed " + std::to_string(s));
        ++checked;
    }
    for (const auto& e : full_zoo(3)) {
        const auto rep = content_experiment(e.map, 3);
        c.require(rep.sandwich_ok, "sandwich fails on zoo map " + e.name);
        ++checked;
    }
    c.detail << checked << " maps";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 3: tree decay for segment_tree and star_tree at n=2, m=0.
// ---------------------------------------------------------------------------

Check criterion3() {
    Check c;
    for (const char* name : {"segment_tree", "star_tree"}) {
        const auto e = zoo(name, {.n = 2, .m = 0, .K = 5});
        const auto& ts = std::get<TreeSpace>(e.factorization->g.target.space);
        const double total = total_edge_length(*ts.tree);
        double prev = std::numeric_limits<double>::infinity();
        double at5 = 0.0;
        for (int l = 0; l <= 5; ++l) {
            const double v = mapping_content_upper(e.map, l).value;
            c.require(v <= prev + 1e-12,
                      std::string(name) + ": value increased at L_max=" + std::to_string(l));
            prev = v;
            if (l == 5) at5 = v;
        }
        const double bound = 8.0 * std::ldexp(1.0, -5) * (total + 1.0);
        c.require(at5 <= bound, std::string(name) + ": decay bound missed");
        c.detail << name << ": dp(5)=" << at5 << " bound=" << bound << "  ";
    }
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 4: Kinneberg inequality on seeded random covers and lifted covers.
// ---------------------------------------------------------------------------

CoverWeighting random_ball_cover(const GridMap& f, std::mt19937_64& rng) {
    const auto img = f.image_points_all();
    const auto lat = f.lattice();
    std::uniform_int_distribution<std::size_t> pick(0, img.size() - 1);
    std::uniform_real_distribution<double> rad(0.15, 0.6);
    std::uniform_real_distribution<double> wgt(0.1, 1.5);
    std::uniform_int_distribution<int> nballs(3, 6);

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<BallSpec> balls;
        const int nb = nballs(rng);
        for (int b = 0; b < nb; ++b) balls.push_back({img[pick(rng)], rad(rng)});
        // Every domain-adjacent pair's images must sit in one common ball --
        // the discrete stand-in for covering the continuum image.
        bool ok = true;
        for (std::int64_t p = 0; p < lat.count() && ok; ++p) {
            const auto coords = lat.coords(p);
            for (int axis = 0; axis < lat.d && ok; ++axis) {
                if (coords[axis] + 1 >= lat.per_axis()) continue;
                auto next = coords;
                next[axis] += 1;
                const std::int64_t q = lat.index(next);
                bool shared = false;
                for (const auto& ball : balls)
                    if (f.target.distance(f.values[p], ball.center) <= ball.radius &&
                        f.target.distance(f.values[q], ball.center) <= ball.radius) {
                        shared = true;
                        break;
                    }
                ok = shared;
            }
        }
        if (!ok) continue;
        std::vector<std::vector<double>> weights;
        for (int b = 0; b < nb; ++b) {
            std::vector<double> w(static_cast<std::size_t>(f.dim()));
            for (auto& x : w) x = wgt(rng);
            weights.push_back(std::move(w));
        }
        return cover_from_balls(f.target, img, balls, std::move(weights));
    }
    throw std::runtime_error("random_ball_cover: could not cover the image");
}

Check criterion4() {
    Check c;
    std::mt19937_64 rng(31337);
    std::vector<ZooEntry> maps;
    maps.push_back(zoo("projection", {.n = 1, .m = 1, .K = 3}));
    maps.push_back(zoo("constant", {.n = 1, .m = 1, .K = 3}));
    maps.push_back(zoo("fold", {.n = 1, .m = 1, .K = 3}));
    maps.push_back(zoo("distance_to_point", {.n = 1, .m = 1, .K = 3}));
    maps.push_back(zoo("scaled_projection", {.n = 1, .m = 1, .K = 3, .alpha = 0.5}));

    int done = 0;
    for (const auto& e : maps) {
        for (int it = 0; it < 18; ++it) {
            const auto cw = random_ball_cover(e.map, rng);
            const auto rep = kinneberg_check(e.map, cw);
            c.require(rep.holds, e.name + ": random cover " + std::to_string(it) +
                                     " violates the inequality");
            ++done;
        }
    }
    // Lifted covers from the product construction, eta in {1/8, 1/32}.
    for (const auto& e : maps) {
        const auto& f = e.map;
        const auto lat = f.lattice();
        std::vector<std::vector<std::int64_t>> domain_sets;
        for (const auto& q : children(root_cube(2)))
            domain_sets.push_back(lat.cube_indices(q));
        std::vector<std::vector<BallSpec>> covers;
        for (const auto& s : domain_sets) {
            const auto img = f.image_points(s);
            covers.push_back(content_upper(f.target, img, 1, 0.25).balls);
            for (auto& b : covers.back()) b.radius = std::max(b.radius, 0.25);
        }
        for (double eta : {0.125, 0.03125}) {
            const auto cw = lifted_cover(f, domain_sets, covers, eta);
            const auto rep = kinneberg_check(f, cw);
            c.require(rep.holds, e.name + ": lifted cover eta=" + std::to_string(eta) +
                                     " violates the inequality");
            ++done;
        }
    }
    c.detail << done << " covers";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 5: seminorm bracket on all cubes of level <= 2 at K = 4.
// ---------------------------------------------------------------------------

Check criterion5() {
    Check c;
    const bool affine_names[] = {true, true, true, false, false, false, false, false, false};
    const auto maps = full_zoo(4);
    int cubes = 0;
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        const auto& f = maps[mi].map;
        const int d = f.dim();
        for (int level = 0; level <= 2; ++level) {
            std::vector<std::int64_t> corner(static_cast<std::size_t>(d), 0);
            while (true) {
                const DyadicCube q(level, corner);
                const auto lp = md_fit_lp(f, q);
                const auto mat = md_fit_matrix(f, q, 2);
                c.require(lp.md_value <= mat.md_value + 1e-9,
                          maps[mi].name + " " + q.describe() + ": lp exceeds matrix");
                if (affine_names[mi])
                    c.require(lp.md_value <= 1e-6 && mat.md_value <= 1e-6,
                              maps[mi].name + " " + q.describe() + ": affine md not ~0");
                ++cubes;
                int i = d - 1;
                for (; i >= 0; --i) {
                    if (++corner[static_cast<std::size_t>(i)] < (1 << level)) break;
                    corner[static_cast<std::size_t>(i)] = 0;
                }
                if (i < 0) break;
            }
        }
    }
    // 1-D fold md against the slope grid-search oracle.
    GridMap fold1d;
    fold1d.n = 1;
    fold1d.m = 0;
    fold1d.K = 4;
    fold1d.declared_lip = 1.0;
    {
        const Lattice lat{1, 4};
        SupCloud sc;
        std::map<double, std::int32_t> seen;
        fold1d.values.resize(static_cast<std::size_t>(lat.count()));
        for (std::int64_t p = 0; p < lat.count(); ++p) {
            const double v = std::abs(lat.point(p)[0] - 0.5);
            auto [it, fresh] = seen.try_emplace(v, static_cast<std::int32_t>(sc.points.size()));
            if (fresh) sc.points.push_back({v});
            fold1d.values[static_cast<std::size_t>(p)] = it->second;
        }
        fold1d.target = TargetSpace{sc};
    }
    const auto lp = md_fit_lp(fold1d, root_cube(1));
    double oracle = std::numeric_limits<double>::infinity();
    const Lattice lat{1, 4};
    for (int s = 0; s <= 40000; ++s) {
        const double a = 2.0 * s / 40000;
        double worst = 0.0;
        for (std::int64_t p = 0; p < lat.count(); ++p)
            for (std::int64_t q = p + 1; q < lat.count(); ++q)
                worst = std::max(worst, std::abs(fold1d.dist_values(p, q) -
                                                 a * lattice_euclid(lat, p, q)));
        oracle = std::min(oracle, worst);
    }
    c.require(std::abs(lp.md_value - oracle) <= 1e-4, "1-D fold md misses the oracle");
    c.detail << cubes << " cubes; fold1d lp=" << lp.md_value << " oracle=" << oracle;
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 6: svd and John ellipsoid oracles.
// ---------------------------------------------------------------------------

std::array<double, 3> charpoly_eigs(const Eigen::Matrix3d& S) {
    const double p1 = S(0, 1) * S(0, 1) + S(0, 2) * S(0, 2) + S(1, 2) * S(1, 2);
    const double q = S.trace() / 3.0;
    const double p2 = (S(0, 0) - q) * (S(0, 0) - q) + (S(1, 1) - q) * (S(1, 1) - q) +
                      (S(2, 2) - q) * (S(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(std::max(p2 / 6.0, 0.0));
    if (p < 1e-300) return {q, q, q};
    const Eigen::Matrix3d B = (S - q * Eigen::Matrix3d::Identity()) / p;
    const double r = std::clamp(B.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    std::array<double, 3> eig;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    eig[1] = 3.0 * q - eig[0] - eig[2];
    return eig;
}

bool john_factor_ok(const SymmetricPolytope& poly, std::mt19937_64& rng) {
    const auto res = john_matrix(poly);
    const int d = poly.ambient_dim;
    std::vector<Eigen::VectorXd> basis;
    if (poly.subspace.empty()) {
        for (int i = 0; i < d; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(i) = 1.0;
            basis.push_back(e);
        }
    } else {
        for (const auto& b : poly.subspace) {
            Eigen::VectorXd v(d);
            for (int i = 0; i < d; ++i) v(i) = b[static_cast<std::size_t>(i)];
            basis.push_back(v);
        }
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd y(static_cast<int>(basis.size()));
        for (int i = 0; i < y.size(); ++i) y(i) = gauss(rng);
        if (y.norm() < 1e-9) continue;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < y.size(); ++i) w += y(i) * basis[static_cast<std::size_t>(i)];
        double gauge = 0.0;
        for (std::size_t j = 0; j < poly.normals.size(); ++j) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += poly.normals[j][static_cast<std::size_t>(i)] * w(i);
            gauge = std::max(gauge, std::abs(dot) / poly.offsets[j]);
        }
        const double aw = (res.A * w).norm();
        if (aw + 1e-9 < gauge || aw > res.factor * gauge + 1e-9) return false;
    }
    return true;
}

Check criterion6() {
    Check c;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int it = 0; it < 500; ++it) {
        Eigen::Matrix3d M;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) M(i, j) = unif(rng);
        const auto r = svd_small(Eigen::MatrixXd(M));
        const double rec =
            (r.U * r.S.asDiagonal() * r.V.transpose() - M).cwiseAbs().maxCoeff();
        c.require(rec <= 1e-12, "svd reconstruction error above 1e-12");
        const auto eig = charpoly_eigs(M.transpose() * M);
        for (int i = 0; i < 3; ++i) {
            const double want = std::sqrt(std::max(eig[static_cast<std::size_t>(i)], 0.0));
            c.require(std::abs(r.S(i) - want) <= 1e-9 * std::max(1.0, want),
                      "svd singular value misses the characteristic polynomial oracle");
        }
    }

    SymmetricPolytope square;
    square.ambient_dim = 2;
    square.normals = {{1.0, 0.0}, {0.0, 1.0}};
    square.offsets = {1.0, 1.0};
    c.require(john_factor_ok(square, rng), "john factor fails on the square");
    c.require(john_factor_ok(polytope_from_vertices({{1, 0}, {0, 1}}), rng),
              "john factor fails on the cross-polytope");
    std::uniform_real_distribution<double> rad(0.2, 1.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI);
    for (int it = 0; it < 20; ++it) {
        std::vector<std::vector<double>> verts;
        for (int v = 0; v < 3 + (it % 4); ++v) {
            const double th = ang(rng);
            const double rr = rad(rng);
            verts.push_back({rr * std::cos(th), rr * std::sin(th)});
        }
        c.require(john_factor_ok(polytope_from_vertices(verts), rng),
                  "john factor fails on random polygon " + std::to_string(it));
    }
    c.detail << "500 svd matrices, 22 polytopes";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 7: certificate soundness + fresh-process replay via the CLI.
// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

Check criterion7() {
    Check c;
    if (g_cli.empty()) {
        c.require(false, "no --cli given; cannot run fresh-process replay");
        return c;
    }
    int replayed = 0;
    for (const char* name : {"projection", "fold"}) {
        const bool is_fold = name == std::string("fold");
        ZooParams p{.n = 1, .m = 1, .K = is_fold ? 4 : 3};
        const auto f = zoo(name, p).map;
        const std::string hash = map_content_hash(f);
        const std::string base = g_workdir + "/" + name;
        write_text_atomic(base + ".map.json", gridmap_to_json(f).dump(2) + "\n");

        const auto dp = mapping_content_upper(f, f.K);
        const auto faces = faces_lower_bound(f);
        const auto w = good_cube_search(f, is_fold ? 0.05 : 0.1, 0.5,
                                        std::ldexp(1.0, -f.K + 1));
        c.require(w.has_value(), std::string(name) + ": no witness found");
        if (!w) continue;
        const auto cert = positive_content_certificate(f, *w);
        const double slack = dp.continuum_value - dp.value;
        c.require(cert.bound_h <= dp.value + slack + 1e-9,
                  std::string(name) + ": certificate bound exceeds the DP upper bound");

        const std::vector<std::pair<std::string, json>> certs = {
            {"faces", face_certificate_to_json(faces, hash)},
            {"dp", dp_result_to_json(dp, hash)},
            {"goodcube", witness_to_json(*w, hash)},
            {"positive", positive_certificate_to_json(cert, hash)},
        };
        for (const auto& [kind, j] : certs) {
            const std::string path = base + "." + kind + ".json";
            write_text_atomic(path, j.dump(2) + "\n");
            const int rc = run_cli("verify --map " + base + ".map.json --cert " + path);
            c.require(rc == 0, std::string(name) + ": fresh-process replay of " + kind +
                                   " exited " + std::to_string(rc));
            ++replayed;
        }
    }
    c.detail << replayed << " certificates replayed in fresh processes";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 8: continuity experiment patterns.
// ---------------------------------------------------------------------------

Check criterion8() {
    Check c;
    const auto rx = continuity_experiment("contract_x", 16, 3);
    for (const auto& row : rx.rows) {
        const double r_eff =
            dyadic_round_up(std::sqrt(2.0) * std::ldexp(1.0, -3) / row.i);
        c.require(row.upper <= 1.0 / row.i + 4.0 * r_eff + 1e-12,
                  "contract_x upper too large at i=" + std::to_string(row.i));
    }
    c.require(rx.consistent, "contract_x flagged inconsistent");

    const auto ry = continuity_experiment("contract_y", 16, 3);
    for (const auto& row : ry.rows)
        c.require(row.faces_product == 1.0,
                  "contract_y faces product != 1 at i=" + std::to_string(row.i));
    c.require(ry.consistent, "contract_y flagged inconsistent");
    c.detail << "contract_x upper(i=16)=" << rx.rows.back().upper
             << ", contract_y faces all 1";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 9: postcomposition monotonicity with exact ball-cover terms.
// ---------------------------------------------------------------------------

Check criterion9() {
    Check c;
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick_kind(0, 2);
    int done = 0;
    for (int s = 0; s < 20; ++s) {
        // Base map on K=2 into an 8-point cloud in [0,1]^3 (sup metric).
        SupCloud cloud;
        for (int i = 0; i < 8; ++i) cloud.points.push_back({unif(rng), unif(rng), unif(rng)});
        GridMap f;
        f.n = 1;
        f.m = 1;
        f.K = 2;
        f.declared_lip = 1.0;
        f.target = TargetSpace{cloud};
        std::uniform_int_distribution<std::int32_t> pv(0, 7);
        f.values.resize(25);
        for (auto& v : f.values) v = pv(rng);
        f.validate();

        PointMap phi;
        phi.table.resize(8);
        const int kind = pick_kind(rng);
        SupCloud out = cloud;
        if (kind == 0) {
            // Coordinate projection: zero one coordinate.
            const int drop = s % 3;
            for (auto& p : out.points) p[static_cast<std::size_t>(drop)] = 0.0;
        } else {
            // Exact dyadic contraction toward the origin.
            const double theta = (kind == 1) ? 0.5 : 0.25;
            for (auto& p : out.points)
                for (auto& x : p) x *= theta;
        }
        phi.new_target = TargetSpace{out};
        for (std::size_t i = 0; i < 8; ++i) phi.table[i] = static_cast<std::int32_t>(i);

        const auto g = postcompose(f, phi);
        DPOptions opts;
        opts.mode = TermMode::exact_balls;
        const double vf = mapping_content_upper(f, 2, opts).value;
        const double vg = mapping_content_upper(g, 2, opts).value;
        c.require(vg <= vf, "postcomposition increased the exact DP value at seed " +
                                std::to_string(s));
        ++done;
    }
    c.detail << done << " tables";
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 10: quantitative differentiation trend.
// ---------------------------------------------------------------------------

Check criterion10() {
    Check c;
    double prev = std::numeric_limits<double>::infinity();
    std::ostringstream vals;
    for (int K : {3, 4, 5}) {
        const auto fold = zoo("fold", {.n = 1, .m = 1, .K = K}).map;
        const double s = quantdiff_sum(fold, 0.01);
        c.require(s <= prev + 1e-9, "fold quantdiff sum increased at K=" + std::to_string(K));
        prev = s;
        vals << "K" << K << "=" << s << " ";
    }
    const auto proj = zoo("projection", {.n = 1, .m = 1, .K = 4}).map;
    c.require(quantdiff_sum(proj, 0.01) == 0.0, "affine map has nonzero quantdiff sum");
    const auto constant = zoo("constant", {.n = 1, .m = 1, .K = 4}).map;
    c.require(quantdiff_sum(constant, 0.01) == 0.0, "constant map has nonzero quantdiff sum");
    c.detail << vals.str();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
        if (std::string(argv[i]) == "--workdir") g_workdir = argv[i + 1];
    }
    std::filesystem::create_directories(g_workdir);

    struct Criterion {
        const char* name;
        std::function<Check()> run;
        double budget_seconds;
    };
    const std::vector<Criterion> criteria = {
        {"projection exactness", criterion1, 1.0},
        {"lower/upper sandwich", criterion2, 30.0},
        {"tree map decay", criterion3, 30.0},
        {"chain-distance inequality", criterion4, 60.0},
        {"seminorm bracket", criterion5, 120.0},
        {"linear algebra oracles", criterion6, 30.0},
        {"certificate soundness", criterion7, 30.0},
        {"continuity experiment", criterion8, 60.0},
        {"postcomposition monotonicity", criterion9, 30.0},
        {"quantitative differentiation trend", criterion10, 60.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = criteria[i].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.require(secs < criteria[i].budget_seconds,
                       "runtime budget of " + std::to_string(criteria[i].budget_seconds) +
                           " s exceeded");
        std::cout << (result.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
                  << criteria[i].name << " (" << secs << " s)";
        if (!result.detail.str().empty()) std::cout << " -- " << result.detail.str();
        std::cout << "\n";
        if (!result.pass) ++failures;
    }
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "FAILURES: " + std::to_string(failures))
              << "\n";
    return failures;
}
