#include "contentlab/experiments.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace contentlab {

ContentReport content_experiment(const GridMap& f, int l_max, const DPOptions& opts) {
    ContentReport rep;
    rep.dp = mapping_content_upper(f, l_max, opts);
    rep.faces = faces_lower_bound(f);
    rep.slack = (rep.dp.continuum_value - rep.dp.value) + rep.faces.sampling_error;
    rep.sandwich_ok = rep.dp.value + rep.slack >= rep.faces.product - 1e-9;
    return rep;
}

namespace {

GridMap two_coord_map(int K, double x_scale, double y_scale) {
    const Lattice lat{2, K};
    std::map<std::vector<double>, std::int32_t> seen;
    SupCloud cloud;
    GridMap f;
    f.values.resize(static_cast<std::size_t>(lat.count()));
    for (std::int64_t q = 0; q < lat.count(); ++q) {
        const auto pt = lat.point(q);
        const std::vector<double> v{x_scale * pt[0], y_scale * pt[1]};
        auto [it, fresh] = seen.try_emplace(v, static_cast<std::int32_t>(cloud.points.size()));
        if (fresh) cloud.points.push_back(v);
        f.values[static_cast<std::size_t>(q)] = it->second;
    }
    f.n = 1;
    f.m = 1;
    f.K = K;
    f.declared_lip = std::max({x_scale, y_scale, 1e-9});
    f.target = TargetSpace{std::move(cloud)};
    f.validate();
    return f;
}

}  // namespace

GridMap continuity_family_member(const std::string& family, int i, int K) {
    if (i < 1) throw std::invalid_argument("continuity member index must be >= 1");
    if (family == "contract_x") return two_coord_map(K, 1.0 / i, 0.0);
    if (family == "contract_y") return two_coord_map(K, 1.0, 1.0 / i);
    if (family == "constant_seq") return two_coord_map(K, 1.0, 0.0);
    throw std::invalid_argument("unknown continuity family '" + family + "'");
}

GridMap continuity_family_limit(const std::string& family, int K) {
    if (family == "contract_x") return two_coord_map(K, 0.0, 0.0);
    if (family == "contract_y" || family == "constant_seq") return two_coord_map(K, 1.0, 0.0);
    throw std::invalid_argument("unknown continuity family '" + family + "'");
}

ContinuityReport continuity_experiment(const std::string& family, int count, int K) {
    ContinuityReport rep;
    rep.family = family;
    const GridMap limit = continuity_family_limit(family, K);
    const auto limit_content = content_experiment(limit, K);
    rep.limit_upper = limit_content.dp.value;
    rep.limit_faces_product = limit_content.faces.product;
    rep.limit_faces_certified =
        limit_content.faces.product - limit_content.faces.sampling_error;
    rep.limit_positive = rep.limit_faces_certified > 0.0;

    double prev_upper = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= count; ++i) {
        const GridMap fi = continuity_family_member(family, i, K);
        ContinuityRow row;
        row.i = i;
        const auto md = map_distance(MapPair(fi, limit));
        row.dist = md.value;
        row.dist_slack = md.continuum_slack;
        const auto rep_i = content_experiment(fi, K);
        row.upper = rep_i.dp.value;
        row.upper_continuum = rep_i.dp.continuum_value;
        row.faces_product = rep_i.faces.product;
        row.faces_certified = rep_i.faces.product - rep_i.faces.sampling_error;
        rep.rows.push_back(row);

        if (rep.limit_positive) {
            // Face distances move by at most 2 dist(f_i, f) per axis.
            double floor = 1.0;
            for (double dk : limit_content.faces.axis_distances)
                floor *= std::max(0.0, dk - 2.0 * (row.dist + row.dist_slack));
            if (row.faces_product < floor - 1e-9) rep.lower_bounds_consistent = false;
        }
        if (row.upper > prev_upper + 1e-9) rep.uppers_non_increasing = false;
        prev_upper = row.upper;
    }
    const bool limit_decay_evidence = !rep.limit_positive;
    rep.consistent = rep.lower_bounds_consistent &&
                     (!limit_decay_evidence || rep.uppers_non_increasing);
    return rep;
}

}  // namespace contentlab
