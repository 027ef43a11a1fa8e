// contentlab: certified upper/lower bounds for the mapping content of
// sampled Lipschitz maps, seminorm (metric derivative) fits, good-cube
// certificates, tree factorization checks, and certificate replay.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

#include "contentlab/experiments.hpp"
#include "contentlab/seminorm.hpp"
#include "contentlab/serialize.hpp"
#include "contentlab/zoo.hpp"

using namespace contentlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFail = 2;

struct MapSource {
    std::string spec = "zoo:projection";
    int n = 1;
    int m = 1;
    int K = 3;
    double alpha = 0.5;
    int legs = 4;
    std::uint64_t seed = 1;
};

void add_map_flags(CLI::App* cmd, MapSource& src) {
    cmd->add_option("--map", src.spec, "GridMap JSON file, or zoo:<name>");
    cmd->add_option("--n", src.n, "domain dimensions mapped non-degenerately");
    cmd->add_option("--m", src.m, "remaining domain dimensions");
    cmd->add_option("--K", src.K, "lattice resolution (spacing 2^-K)");
    cmd->add_option("--alpha", src.alpha, "parameter of scaled_projection");
    cmd->add_option("--legs", src.legs, "legs of star_tree");
    cmd->add_option("--seed", src.seed, "seed for randomized zoo maps");
}

ZooEntry load_map(const MapSource& src) {
    if (src.spec.rfind("zoo:", 0) == 0) {
        ZooParams p;
        p.n = src.n;
        p.m = src.m;
        p.K = src.K;
        p.alpha = src.alpha;
        p.legs = src.legs;
        p.seed = src.seed;
        return zoo(src.spec.substr(4), p);
    }
    ZooEntry entry;
    entry.name = src.spec;
    entry.map = gridmap_from_json(json::parse(read_text(src.spec)));
    return entry;
}

// Configuration echo embedded in every report so runs are reproducible from
// their outputs alone.
json config_json(const MapSource& src) {
    json j;
    j["map"] = src.spec;
    j["n"] = src.n;
    j["m"] = src.m;
    j["K"] = src.K;
    j["alpha"] = real17(src.alpha);
    j["legs"] = src.legs;
    j["seed"] = src.seed;
    return j;
}

int cmd_content_run(const MapSource& src, int l_max, const std::string& out) {
    const auto entry = load_map(src);
    const auto& f = entry.map;
    const int lm = l_max < 0 ? f.K : l_max;
    const auto rep = content_experiment(f, lm);
    const std::string hash = map_content_hash(f);

    json j;
    j["schema"] = "contentlab.report.content/1";
    j["config"] = config_json(src);
    j["config"]["l_max"] = lm;
    j["map_hash"] = hash;
    j["upper"] = dp_result_to_json(rep.dp, hash);
    j["lower"] = face_certificate_to_json(rep.faces, hash);
    j["slack"] = real17(rep.slack);
    j["sandwich_ok"] = rep.sandwich_ok;

    std::ostringstream csv;
    csv << "schema,map,upper_value,upper_continuum,cover_cubes,faces_product,"
           "faces_sampling_error,slack,sandwich_ok\n";
    csv << "contentlab.report.content/1," << src.spec << ","
        << real17(rep.dp.value) << "," << real17(rep.dp.continuum_value) << ","
        << rep.dp.cover.size() << "," << real17(rep.faces.product) << ","
        << real17(rep.faces.sampling_error) << "," << real17(rep.slack) << ","
        << (rep.sandwich_ok ? "pass" : "fail") << "\n";

    if (!out.empty()) {
        write_text_atomic(out + ".json", j.dump(2) + "\n");
        write_text_atomic(out + ".csv", csv.str());
        write_text_atomic(out + ".map.json", gridmap_to_json(f).dump(2) + "\n");
    }
    std::cout << "upper " << real17(rep.dp.value) << " (continuum "
              << real17(rep.dp.continuum_value) << ", cover " << rep.dp.cover.size()
              << " cubes)\n";
    std::cout << "lower " << real17(rep.faces.product) << " (sampling error "
              << real17(rep.faces.sampling_error) << ")\n";
    std::cout << "sandwich " << (rep.sandwich_ok ? "pass" : "fail") << "\n";
    return kExitOk;
}

int cmd_continuity_run(const std::string& family, int count, int K, const std::string& out) {
    const auto rep = continuity_experiment(family, count, K);
    std::ostringstream csv;
    csv << "schema,family,i,dist,dist_slack,upper,upper_continuum,faces_product,"
           "faces_certified\n";
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv << "contentlab.report.continuity/1," << family << "," << r.i << ","
            << real17(r.dist) << "," << real17(r.dist_slack) << "," << real17(r.upper)
            << "," << real17(r.upper_continuum) << "," << real17(r.faces_product) << ","
            << real17(r.faces_certified) << "\n";
        json jr;
        jr["i"] = r.i;
        jr["dist"] = real17(r.dist);
        jr["dist_slack"] = real17(r.dist_slack);
        jr["upper"] = real17(r.upper);
        jr["upper_continuum"] = real17(r.upper_continuum);
        jr["faces_product"] = real17(r.faces_product);
        jr["faces_certified"] = real17(r.faces_certified);
        rows.push_back(std::move(jr));
    }
    json j;
    j["schema"] = "contentlab.report.continuity/1";
    j["config"] = {{"family", family}, {"count", count}, {"K", K}};
    j["family"] = family;
    j["K"] = K;
    j["rows"] = std::move(rows);
    j["limit_upper"] = real17(rep.limit_upper);
    j["limit_faces_product"] = real17(rep.limit_faces_product);
    j["limit_positive"] = rep.limit_positive;
    j["lower_bounds_consistent"] = rep.lower_bounds_consistent;
    j["uppers_non_increasing"] = rep.uppers_non_increasing;
    j["consistent"] = rep.consistent;
    if (!out.empty()) {
        write_text_atomic(out + ".json", j.dump(2) + "\n");
        write_text_atomic(out + ".csv", csv.str());
    }
    std::cout << "family " << family << ": " << rep.rows.size() << " maps, limit upper "
              << real17(rep.limit_upper) << ", limit faces product "
              << real17(rep.limit_faces_product) << "\n";
    std::cout << "consistent " << (rep.consistent ? "yes" : "no") << "\n";
    return kExitOk;
}

int cmd_goodcube_run(const MapSource& src, double eta, double c, double min_side,
                     bool certify, const std::string& out) {
    const auto entry = load_map(src);
    const auto& f = entry.map;
    const std::string hash = map_content_hash(f);
    const double ms = min_side > 0 ? min_side : std::ldexp(1.0, -f.K + 1);
    const auto witness = good_cube_search(f, eta, c, ms);
    if (!witness) {
        json j;
        j["schema"] = "contentlab.report.goodcube/1";
        j["config"] = config_json(src);
        j["config"]["eta"] = real17(eta);
        j["config"]["c"] = real17(c);
        j["config"]["min_side"] = real17(ms);
        j["map_hash"] = hash;
        j["outcome"] = "none";
        if (!out.empty()) write_text_atomic(out + ".witness.json", j.dump(2) + "\n");
        std::cout << "no witness (eta " << real17(eta) << ", c " << real17(c) << ")\n";
        return kExitOk;
    }
    std::cout << "witness at " << witness->cube.describe() << ", md "
              << real17(witness->fit.md_value) << ", c " << real17(witness->c) << "\n";
    if (!out.empty())
        write_text_atomic(out + ".witness.json",
                          witness_to_json(*witness, hash).dump(2) + "\n");
    if (!certify) return kExitOk;

    const auto cert = positive_content_certificate(f, *witness);
    std::cout << "certificate bound (arbitrary covers) " << real17(cert.bound_hhat)
              << ", (dyadic covers) " << real17(cert.bound_h)
              << (cert.degenerate ? " [degenerate: eta too large for c]" : "") << "\n";
    const auto dp = mapping_content_upper(f, f.K);
    const bool sandwich = cert.bound_hhat <=
                          dp.continuum_value * std::pow(std::sqrt(f.dim()), f.m) + 1e-9;
    std::cout << "dp upper " << real17(dp.value) << " (continuum "
              << real17(dp.continuum_value) << "), sandwich "
              << (sandwich ? "pass" : "fail") << "\n";
    if (!out.empty()) {
        write_text_atomic(out + ".certificate.json",
                          positive_certificate_to_json(cert, hash).dump(2) + "\n");
        write_text_atomic(out + ".map.json", gridmap_to_json(f).dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_verify_run(const std::string& map_file, const std::string& cert_file) {
    const auto f = gridmap_from_json(json::parse(read_text(map_file)));
    const auto cert = json::parse(read_text(cert_file));
    const auto res = verify_certificate(f, cert);
    if (res.pass) {
        std::cout << "verify pass\n";
        return kExitOk;
    }
    for (const auto& why : res.failures) std::cout << "verify fail: " << why << "\n";
    return kExitVerifyFail;
}

int cmd_zoo_export_run(const MapSource& src, const std::string& out) {
    const auto entry = load_map(src);
    const std::string hash = map_content_hash(entry.map);
    write_text_atomic(out + ".map.json", gridmap_to_json(entry.map).dump(2) + "\n");
    std::cout << "wrote " << out << ".map.json (hash " << hash << ")\n";
    if (entry.factorization) {
        write_text_atomic(out + ".factorization.json",
                          factorization_to_json(*entry.factorization, hash).dump(2) + "\n");
        std::cout << "wrote " << out << ".factorization.json\n";
    }
    return kExitOk;
}

int cmd_md_run(const MapSource& src, int level, const std::string& corner_csv, int c0,
               const std::string& out) {
    const auto entry = load_map(src);
    const auto& f = entry.map;
    std::vector<std::int64_t> corner;
    if (!corner_csv.empty()) {
        std::stringstream ss(corner_csv);
        std::string item;
        while (std::getline(ss, item, ',')) corner.push_back(std::stoll(item));
    } else {
        corner.assign(static_cast<std::size_t>(f.dim()), 0);
    }
    const DyadicCube cube(level, corner);
    const auto lp = md_fit_lp(f, cube, c0);
    const auto mat = md_fit_matrix(f, cube, 3, c0);
    std::cout << "md_lp " << real17(lp.md_value) << " (lower bound)\n";
    std::cout << "md_matrix " << real17(mat.md_value) << " (upper bound in the family)\n";
    if (!out.empty()) {
        json j;
        j["schema"] = "contentlab.report.md/1";
        j["config"] = config_json(src);
        j["map_hash"] = map_content_hash(f);
        j["cube"] = {{"level", cube.level}, {"corner", cube.corner}};
        j["c0"] = c0;
        j["md_lp"] = real17(lp.md_value);
        j["md_matrix"] = real17(mat.md_value);
        write_text_atomic(out + ".md.json", j.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "contentlab: certified bounds on the mapping content of sampled Lipschitz maps"};
    app.require_subcommand(1);

    MapSource src;
    int l_max = -1;
    double eta = 0.1, c = 0.5, min_side = -1.0, tol = 1e-9;
    std::string out, family = "contract_x", map_file, cert_file, corner_csv;
    int count = 8, level = 0, c0 = 1;

    auto* content = app.add_subcommand("content", "dyadic DP upper bound + face lower bound");
    add_map_flags(content, src);
    content->add_option("--Lmax", l_max, "deepest cover level (default K)");
    content->add_option("--out", out, "output path prefix");

    auto* continuity = app.add_subcommand("continuity", "map sequence experiment");
    continuity->add_option("--family", family, "contract_x | contract_y | constant_seq");
    continuity->add_option("--count", count, "number of sequence members");
    continuity->add_option("--K", src.K, "lattice resolution");
    continuity->add_option("--out", out, "output path prefix");

    auto* goodcube = app.add_subcommand("goodcube", "search for an eta-flat nondegenerate cube");
    add_map_flags(goodcube, src);
    goodcube->add_option("--eta", eta, "metric derivative bound");
    goodcube->add_option("--c", c, "plane nondegeneracy constant");
    goodcube->add_option("--min-side", min_side, "smallest cube side scanned");
    goodcube->add_option("--out", out, "output path prefix");

    auto* certify = app.add_subcommand("certify", "good cube + positive content certificate");
    add_map_flags(certify, src);
    certify->add_option("--eta", eta, "metric derivative bound");
    certify->add_option("--c", c, "plane nondegeneracy constant");
    certify->add_option("--min-side", min_side, "smallest cube side scanned");
    certify->add_option("--out", out, "output path prefix");

    auto* verify = app.add_subcommand("verify", "replay a certificate against a map file");
    verify->add_option("--map", map_file, "GridMap JSON file")->required();
    verify->add_option("--cert", cert_file, "certificate JSON file")->required();
    verify->add_option("--tol", tol, "unused; replay tolerance is fixed at 1e-9");

    auto* zoo_cmd = app.add_subcommand("zoo", "example maps");
    zoo_cmd->require_subcommand(1);
    auto* zoo_export = zoo_cmd->add_subcommand("export", "write a zoo map (and factorization)");
    add_map_flags(zoo_export, src);
    zoo_export->add_option("--out", out, "output path prefix")->required();

    auto* md = app.add_subcommand("md", "seminorm fits on one dyadic cube");
    add_map_flags(md, src);
    md->add_option("--level", level, "cube level");
    md->add_option("--corner", corner_csv, "comma-separated cube corner");
    md->add_option("--c0", c0, "dilation factor (1 or 3)");
    md->add_option("--out", out, "output path prefix");

    try {
        app.parse(argc, argv);
        if (content->parsed()) return cmd_content_run(src, l_max, out);
        if (continuity->parsed()) return cmd_continuity_run(family, count, src.K, out);
        if (goodcube->parsed()) return cmd_goodcube_run(src, eta, c, min_side, false, out);
        if (certify->parsed()) return cmd_goodcube_run(src, eta, c, min_side, true, out);
        if (verify->parsed()) return cmd_verify_run(map_file, cert_file);
        if (zoo_cmd->parsed() && zoo_export->parsed()) return cmd_zoo_export_run(src, out);
        if (md->parsed()) return cmd_md_run(src, level, corner_csv, c0, out);
        std::cerr << app.help();
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
