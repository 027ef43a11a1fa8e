#include "contentlab/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace contentlab {

std::string real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw std::invalid_argument("expected a decimal string");
    return std::stod(j.get<std::string>());
}

json real_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(real17(x));
    return a;
}

std::vector<double> parse_real_array(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(parse_real(x));
    return out;
}

json tree_to_json(const MetricTree& t) {
    json j;
    j["vertices"] = t.vertex_count;
    json edges = json::array();
    for (const auto& e : t.edges) edges.push_back({e.u, e.v, real17(e.length)});
    j["edges"] = std::move(edges);
    j["labels"] = t.labels;
    return j;
}

MetricTree tree_from_json(const json& j) {
    MetricTree t;
    t.vertex_count = j.at("vertices").get<std::int32_t>();
    for (const auto& e : j.at("edges"))
        t.edges.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>(),
                           parse_real(e.at(2))});
    if (j.contains("labels")) t.labels = j.at("labels").get<std::vector<std::string>>();
    return t;
}

json gridmap_to_json(const GridMap& f) {
    json j;
    j["schema"] = "contentlab.gridmap/1";
    j["n"] = f.n;
    j["m"] = f.m;
    j["K"] = f.K;
    j["declared_lip"] = real17(f.declared_lip);
    json target;
    if (const auto* sc = std::get_if<SupCloud>(&f.target.space)) {
        target["kind"] = "sup_cloud";
        json pts = json::array();
        for (const auto& p : sc->points) pts.push_back(real_array(p));
        target["points"] = std::move(pts);
    } else if (const auto* fm = std::get_if<FiniteMetric>(&f.target.space)) {
        target["kind"] = "finite_metric";
        target["count"] = fm->count;
        target["dist"] = real_array(fm->dist);
    } else {
        target["kind"] = "tree";
        target["tree"] = tree_to_json(*std::get<TreeSpace>(f.target.space).tree);
    }
    j["target"] = std::move(target);
    j["values"] = f.values;
    return j;
}

GridMap gridmap_from_json(const json& j) {
    if (j.value("schema", "") != "contentlab.gridmap/1")
        throw std::invalid_argument("gridmap_from_json: unknown schema");
    GridMap f;
    f.n = j.at("n").get<int>();
    f.m = j.at("m").get<int>();
    f.K = j.at("K").get<int>();
    f.declared_lip = parse_real(j.at("declared_lip"));
    const auto& target = j.at("target");
    const std::string kind = target.at("kind").get<std::string>();
    if (kind == "sup_cloud") {
        SupCloud sc;
        for (const auto& p : target.at("points")) sc.points.push_back(parse_real_array(p));
        f.target = TargetSpace{std::move(sc)};
    } else if (kind == "finite_metric") {
        FiniteMetric fm;
        fm.count = target.at("count").get<std::size_t>();
        fm.dist = parse_real_array(target.at("dist"));
        fm.validate();
        f.target = TargetSpace{std::move(fm)};
    } else if (kind == "tree") {
        f.target = TargetSpace{TreeSpace::from_tree(tree_from_json(target.at("tree")))};
    } else {
        throw std::invalid_argument("gridmap_from_json: unknown target kind " + kind);
    }
    f.values = j.at("values").get<std::vector<std::int32_t>>();
    f.validate();
    return f;
}

std::string map_content_hash(const GridMap& f) {
    const std::string dump = gridmap_to_json(f).dump();
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

json cube_to_json(const DyadicCube& q) {
    json j;
    j["level"] = q.level;
    j["corner"] = q.corner;
    return j;
}

DyadicCube cube_from_json(const json& j) {
    return DyadicCube(j.at("level").get<int>(),
                      j.at("corner").get<std::vector<std::int64_t>>());
}

json fit_to_json(const SeminormFit& fit) {
    json j;
    j["form"] = fit.form == SeminormFit::Form::matrix ? "matrix" : "slopes";
    j["cube"] = cube_to_json(fit.cube);
    j["c0"] = fit.c0;
    j["clipped"] = fit.clipped;
    j["md_value"] = real17(fit.md_value);
    j["sup_deviation"] = real17(fit.sup_deviation);
    if (fit.form == SeminormFit::Form::matrix) j["matrix"] = real_array(fit.matrix);
    if (fit.form == SeminormFit::Form::slopes) {
        json slopes = json::array();
        for (const auto& [dir, s] : fit.slopes) slopes.push_back({dir, real17(s)});
        j["slopes"] = std::move(slopes);
    }
    return j;
}

SeminormFit fit_from_json(const json& j) {
    SeminormFit fit;
    fit.form = j.at("form").get<std::string>() == "matrix" ? SeminormFit::Form::matrix
                                                           : SeminormFit::Form::slopes;
    fit.cube = cube_from_json(j.at("cube"));
    fit.c0 = j.at("c0").get<int>();
    fit.clipped = j.at("clipped").get<bool>();
    fit.md_value = parse_real(j.at("md_value"));
    fit.sup_deviation = parse_real(j.at("sup_deviation"));
    if (j.contains("matrix")) fit.matrix = parse_real_array(j.at("matrix"));
    if (j.contains("slopes"))
        for (const auto& s : j.at("slopes"))
            fit.slopes.emplace_back(s.at(0).get<std::vector<std::int64_t>>(),
                                    parse_real(s.at(1)));
    return fit;
}

json vectors_to_json(const std::vector<Eigen::VectorXd>& vs) {
    json a = json::array();
    for (const auto& v : vs) {
        std::vector<double> row(static_cast<std::size_t>(v.size()));
        for (int i = 0; i < v.size(); ++i) row[static_cast<std::size_t>(i)] = v(i);
        a.push_back(real_array(row));
    }
    return a;
}

std::vector<Eigen::VectorXd> vectors_from_json(const json& j) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& row : j) {
        const auto vals = parse_real_array(row);
        Eigen::VectorXd v(static_cast<int>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<int>(i)) = vals[i];
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

json face_certificate_to_json(const FaceCertificate& c, const std::string& map_hash) {
    json j;
    j["schema"] = "contentlab.cert.faces/1";
    j["map_hash"] = map_hash;
    j["axis_distances"] = real_array(c.axis_distances);
    json wits = json::array();
    for (const auto& [a, b] : c.witnesses) wits.push_back({a, b});
    j["witnesses"] = std::move(wits);
    j["product"] = real17(c.product);
    j["per_axis_error"] = real17(c.per_axis_error);
    j["sampling_error"] = real17(c.sampling_error);
    return j;
}

json dp_result_to_json(const DPResult& r, const std::string& map_hash) {
    json j;
    j["schema"] = "contentlab.cert.dp/1";
    j["map_hash"] = map_hash;
    j["value"] = real17(r.value);
    j["continuum_value"] = real17(r.continuum_value);
    json cover = json::array();
    for (const auto& q : r.cover) cover.push_back(cube_to_json(q));
    j["cover"] = std::move(cover);
    j["per_cube"] = real_array(r.per_cube);
    j["r_min"] = real17(r.r_min);
    j["inflation"] = real17(r.inflation);
    j["mode"] = r.mode == TermMode::greedy ? "greedy" : "exact_balls";
    j["l_max"] = r.l_max;
    return j;
}

json witness_to_json(const GoodCubeWitness& w, const std::string& map_hash) {
    json j;
    j["schema"] = "contentlab.cert.goodcube/1";
    j["map_hash"] = map_hash;
    j["cube"] = cube_to_json(w.cube);
    j["fit"] = fit_to_json(w.fit);
    j["matrix_fit"] = fit_to_json(w.matrix);
    j["plane"] = vectors_to_json(w.plane);
    j["c"] = real17(w.c);
    j["eta"] = real17(w.eta);
    j["clipped"] = w.clipped;
    return j;
}

GoodCubeWitness witness_from_json(const json& j) {
    if (j.value("schema", "") != "contentlab.cert.goodcube/1")
        throw std::invalid_argument("witness_from_json: unknown schema");
    GoodCubeWitness w;
    w.cube = cube_from_json(j.at("cube"));
    w.fit = fit_from_json(j.at("fit"));
    w.matrix = fit_from_json(j.at("matrix_fit"));
    w.plane = vectors_from_json(j.at("plane"));
    w.c = parse_real(j.at("c"));
    w.eta = parse_real(j.at("eta"));
    w.clipped = j.at("clipped").get<bool>();
    return w;
}

json positive_certificate_to_json(const PositiveContentCertificate& c,
                                  const std::string& map_hash) {
    json j;
    j["schema"] = "contentlab.cert.positive/1";
    j["map_hash"] = map_hash;
    j["witness"] = witness_to_json(c.witness, map_hash);
    json basis;
    basis["vectors"] = vectors_to_json(c.basis.vectors);
    basis["delta"] = real17(c.basis.delta);
    basis["constant"] = real17(c.basis.constant);
    basis["n"] = c.basis.n;
    j["adapted_basis"] = std::move(basis);
    json qp;
    qp["center"] = real_array(c.q_prime.center);
    json qb = json::array();
    for (const auto& b : c.q_prime.basis) qb.push_back(real_array(b));
    qp["basis"] = std::move(qb);
    qp["side"] = real17(c.q_prime.side);
    j["q_prime"] = std::move(qp);
    j["face_distances"] = real_array(c.face_distances);
    json wits = json::array();
    for (const auto& [a, b] : c.face_witnesses) wits.push_back({a, b});
    j["face_witnesses"] = std::move(wits);
    j["face_grid"] = c.face_grid;
    j["a"] = real17(c.a);
    j["bound_hhat"] = real17(c.bound_hhat);
    j["bound_h"] = real17(c.bound_h);
    j["sampling_error"] = real17(c.sampling_error);
    j["degenerate"] = c.degenerate;
    return j;
}

json factorization_to_json(const TreeFactorization& tf, const std::string& f_hash) {
    json j;
    j["schema"] = "contentlab.factorization/1";
    j["f_hash"] = f_hash;
    j["L"] = real17(tf.L);
    j["tree"] = tree_to_json(*std::get<TreeSpace>(tf.g.target.space).tree);
    j["g"] = gridmap_to_json(tf.g);
    json h = json::array();
    for (const auto& p : tf.h.points) h.push_back(real_array(p));
    j["h_points"] = std::move(h);
    return j;
}

TreeFactorization factorization_from_json(const json& j) {
    if (j.value("schema", "") != "contentlab.factorization/1")
        throw std::invalid_argument("factorization_from_json: unknown schema");
    TreeFactorization tf;
    tf.L = parse_real(j.at("L"));
    tf.g = gridmap_from_json(j.at("g"));
    for (const auto& p : j.at("h_points")) tf.h.points.push_back(parse_real_array(p));
    return tf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

constexpr double kVerifyTol = 1e-9;

void verify_faces(const GridMap& f, const json& cert, VerifyResult& r) {
    const auto fresh = faces_lower_bound(f);
    const auto stored = parse_real_array(cert.at("axis_distances"));
    if (static_cast<int>(stored.size()) != f.n)
        r.fail("axis_distances count != n");
    for (std::size_t k = 0; k < stored.size() && k < fresh.axis_distances.size(); ++k)
        if (std::abs(stored[k] - fresh.axis_distances[k]) > kVerifyTol)
            r.fail("axis " + std::to_string(k + 1) + " distance mismatch: stored " +
                   real17(stored[k]) + " recomputed " + real17(fresh.axis_distances[k]));
    // Witness pairs must realize the stored distances.
    const auto& wits = cert.at("witnesses");
    for (std::size_t k = 0; k < wits.size() && k < stored.size(); ++k) {
        const std::int64_t a = wits[k].at(0).get<std::int64_t>();
        const std::int64_t b = wits[k].at(1).get<std::int64_t>();
        if (std::abs(f.dist_values(a, b) - stored[k]) > kVerifyTol)
            r.fail("witness pair of axis " + std::to_string(k + 1) +
                   " does not realize the stored distance");
    }
    double prod = 1.0;
    for (double x : stored) prod *= x;
    if (std::abs(prod - parse_real(cert.at("product"))) > kVerifyTol)
        r.fail("product mismatch");
    if (std::abs(fresh.sampling_error - parse_real(cert.at("sampling_error"))) > kVerifyTol)
        r.fail("sampling_error mismatch");
}

void verify_dp(const GridMap& f, const json& cert, VerifyResult& r) {
    const int d = f.dim();
    std::vector<DyadicCube> cover;
    for (const auto& cj : cert.at("cover"))
        cover.push_back(DyadicCube(cj.at("level").get<int>(),
                                   cj.at("corner").get<std::vector<std::int64_t>>()));
    // Almost-disjointness and total measure, in exact integer units of the
    // finest level present.
    int finest = 0;
    for (const auto& q : cover) finest = std::max(finest, q.level);
    double measure = 0.0;
    for (const auto& q : cover) measure += std::pow(q.side(), d);
    if (std::abs(measure - 1.0) > 1e-12) r.fail("cover measure != 1");
    for (std::size_t i = 0; i < cover.size(); ++i)
        for (std::size_t j = i + 1; j < cover.size(); ++j) {
            const auto li = cover[i].corner_at(finest);
            const auto hi_span = cover[i].span_at(finest);
            const auto lj = cover[j].corner_at(finest);
            const auto hj_span = cover[j].span_at(finest);
            bool overlap = true;
            for (int a = 0; a < d; ++a)
                overlap = overlap && li[a] < lj[a] + hj_span && lj[a] < li[a] + hi_span;
            if (overlap) r.fail("cover cubes " + std::to_string(i) + " and " +
                                std::to_string(j) + " overlap");
        }

    const double r_min = parse_real(cert.at("r_min"));
    const TermMode mode =
        cert.at("mode").get<std::string>() == "greedy" ? TermMode::greedy : TermMode::exact_balls;
    const auto stored_terms = parse_real_array(cert.at("per_cube"));
    if (stored_terms.size() != cover.size()) {
        r.fail("per_cube count mismatch");
        return;
    }
    const auto lat = f.lattice();
    double total = 0.0, continuum = 0.0;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const auto img = f.image_points(lat.cube_indices(cover[i]));
        const ContentEstimate est = (mode == TermMode::greedy)
                                        ? content_upper(f.target, img, f.n, r_min)
                                        : content_balls_exact(f.target, img, f.n, r_min);
        const double side_m = std::pow(cover[i].side(), f.m);
        const double term = est.value * side_m;
        if (std::abs(term - stored_terms[i]) > kVerifyTol)
            r.fail("term of cover cube " + std::to_string(i) + " mismatch: stored " +
                   real17(stored_terms[i]) + " recomputed " + real17(term));
        total += term;
        continuum += est.continuum_value * side_m;
    }
    if (std::abs(total - parse_real(cert.at("value"))) > kVerifyTol)
        r.fail("value != sum of per-cube terms");
    if (std::abs(continuum - parse_real(cert.at("continuum_value"))) > kVerifyTol)
        r.fail("continuum_value mismatch");
}

void verify_goodcube(const GridMap& f, const json& cert, VerifyResult& r) {
    const GoodCubeWitness w = witness_from_json(cert);
    if (w.matrix.form != SeminormFit::Form::matrix || w.fit.form != SeminormFit::Form::slopes) {
        r.fail("witness fits have the wrong forms");
        return;
    }
    // The flatness gate: the LP md replays and clears eta.
    const auto lp = md_fit_lp(f, w.cube, w.fit.c0);
    if (std::abs(lp.md_value - w.fit.md_value) > kVerifyTol)
        r.fail("lp md mismatch: stored " + real17(w.fit.md_value) + " recomputed " +
               real17(lp.md_value));
    if (!(w.fit.md_value < w.eta + kVerifyTol)) r.fail("md not below eta");

    // The orientation matrix achieves the stored deviation and plane constant.
    {
        std::vector<std::vector<double>> rows;
        for (const auto& v : w.plane) {
            std::vector<double> row(static_cast<std::size_t>(v.size()));
            for (int i = 0; i < v.size(); ++i) row[static_cast<std::size_t>(i)] = v(i);
            rows.push_back(std::move(row));
        }
        for (auto& a : rows)
            for (auto& b : rows) {
                double dot = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
                const double want = (&a == &b) ? 1.0 : 0.0;
                if (std::abs(dot - want) > 1e-9) {
                    r.fail("witness plane is not orthonormal");
                    return;
                }
            }
    }
    bool clipped = false;
    const auto box = dilated_cube_box(w.cube, f.K, w.matrix.c0, &clipped);
    const auto st = collect_diff_stats(f, box);
    const Eigen::MatrixXd A = w.matrix.matrix_as_eigen();
    double dev = 0.0;
    for (const auto& [diff, mm] : st.stats) {
        Eigen::VectorXd v(static_cast<int>(diff.size()));
        for (std::size_t i = 0; i < diff.size(); ++i)
            v(static_cast<int>(i)) = static_cast<double>(diff[i]) * st.spacing;
        const double val = (A * v).norm();
        dev = std::max(dev, std::max(mm.second - val, val - mm.first));
    }
    if (std::abs(dev - w.matrix.sup_deviation) > kVerifyTol)
        r.fail("seminorm deviation mismatch: stored " + real17(w.matrix.sup_deviation) +
               " recomputed " + real17(dev));
    if (clipped != w.clipped) r.fail("clipping flag mismatch");
    const double c = restricted_sigma_min(A, w.plane);
    if (std::abs(c - w.c) > kVerifyTol)
        r.fail("plane constant mismatch: stored " + real17(w.c) + " recomputed " + real17(c));
}

void verify_positive(const GridMap& f, const json& cert, VerifyResult& r) {
    verify_goodcube(f, cert.at("witness"), r);
    const GoodCubeWitness w = witness_from_json(cert.at("witness"));
    const auto& qp = cert.at("q_prime");
    RotatedCube rc;
    rc.center = parse_real_array(qp.at("center"));
    for (const auto& b : qp.at("basis")) rc.basis.push_back(parse_real_array(b));
    rc.side = parse_real(qp.at("side"));

    const int d = f.dim();
    if (!basis_orthonormal(rc.basis, 1e-9)) r.fail("q_prime basis not orthonormal");
    const auto want_center = w.cube.center();
    for (int i = 0; i < d; ++i)
        if (std::abs(rc.center[static_cast<std::size_t>(i)] -
                     want_center[static_cast<std::size_t>(i)]) > kVerifyTol)
            r.fail("q_prime center is not the witness cube center");
    if (std::abs(rc.side - w.cube.side() / std::sqrt(static_cast<double>(d))) > kVerifyTol)
        r.fail("q_prime side != side/sqrt(d)");
    if (!rotated_cube_inside(rc, w.cube)) r.fail("q_prime not inside the witness cube");

    const int grid = cert.at("face_grid").get<int>();
    const auto lat = f.lattice();
    const double h = lat.spacing();
    const std::int64_t top = std::int64_t{1} << f.K;
    auto nearest = [&](const std::vector<double>& x) {
        std::vector<std::int64_t> cc(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            const double t = std::round(x[static_cast<std::size_t>(i)] / h);
            cc[static_cast<std::size_t>(i)] = std::min<std::int64_t>(
                top, std::max<std::int64_t>(0, static_cast<std::int64_t>(t)));
        }
        return lat.index(cc);
    };
    const auto stored = parse_real_array(cert.at("face_distances"));
    double a = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < f.n; ++axis) {
        std::vector<std::int64_t> lo, hi;
        for (const auto& x : rotated_face_samples(rc, axis, false, grid))
            lo.push_back(nearest(x));
        for (const auto& x : rotated_face_samples(rc, axis, true, grid))
            hi.push_back(nearest(x));
        double best = std::numeric_limits<double>::infinity();
        for (auto pp : lo)
            for (auto qq : hi) best = std::min(best, f.dist_values(pp, qq));
        if (axis < static_cast<int>(stored.size()) &&
            std::abs(best - stored[static_cast<std::size_t>(axis)]) > kVerifyTol)
            r.fail("face distance of axis " + std::to_string(axis + 1) +
                   " mismatch: stored " + real17(stored[static_cast<std::size_t>(axis)]) +
                   " recomputed " + real17(best));
        a = std::min(a, best / rc.side);
    }
    if (std::abs(a - parse_real(cert.at("a"))) > kVerifyTol) r.fail("a mismatch");
    double bound = std::pow(a, f.n) * std::pow(rc.side, d);
    if (cert.at("degenerate").get<bool>()) bound = 0.0;
    if (std::abs(bound - parse_real(cert.at("bound_hhat"))) > kVerifyTol)
        r.fail("bound_hhat mismatch");
    const double bound_h = bound / std::pow(static_cast<double>(d), 0.5 * f.m);
    if (std::abs(bound_h - parse_real(cert.at("bound_h"))) > kVerifyTol)
        r.fail("bound_h mismatch");
}

}  // namespace

VerifyResult verify_certificate(const GridMap& f, const json& cert) {
    VerifyResult r;
    const std::string schema = cert.value("schema", "");
    const std::string want_hash = map_content_hash(f);
    const std::string hash_key = schema == "contentlab.factorization/1" ? "f_hash" : "map_hash";
    if (cert.value(hash_key, "") != want_hash) {
        r.fail("map hash mismatch: certificate belongs to a different map");
        return r;
    }
    if (schema == "contentlab.cert.faces/1") verify_faces(f, cert, r);
    else if (schema == "contentlab.cert.dp/1") verify_dp(f, cert, r);
    else if (schema == "contentlab.cert.goodcube/1") verify_goodcube(f, cert, r);
    else if (schema == "contentlab.cert.positive/1") verify_positive(f, cert, r);
    else if (schema == "contentlab.factorization/1") {
        const auto tf = factorization_from_json(cert);
        const auto rep = factor_check(f, tf, kVerifyTol);
        if (!rep.legs.ok) r.fail("factorization leg check failed: " + rep.legs.violation);
        else if (!rep.pass)
            r.fail("composition deviates from the map by " + real17(rep.sup_deviation));
    } else {
        r.fail("unknown certificate schema '" + schema + "'");
    }
    return r;
}

}  // namespace contentlab
