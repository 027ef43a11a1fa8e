#pragma once

#include <string>
#include <vector>

#include "contentlab/content.hpp"
#include "contentlab/metric.hpp"
#include "contentlab/zoo.hpp"

namespace contentlab {

/// Combined upper/lower content report with the certified sandwich verdict:
/// continuum upper + face sampling error must dominate the face product.
struct ContentReport {
    DPResult dp;
    FaceCertificate faces;
    double slack = 0.0;  // (continuum - sample) DP gap + face sampling error
    bool sandwich_ok = false;
};

ContentReport content_experiment(const GridMap& f, int l_max,
                                 const DPOptions& opts = {});

/// Canonical map sequences for the continuity experiment.
///   contract_x:   f_i(x,y) = (x/i, 0), limit the constant map
///   contract_y:   f_i(x,y) = (x, y/i), limit (x, 0)
///   constant_seq: f_i = limit = (x, 0)
GridMap continuity_family_member(const std::string& family, int i, int K);
GridMap continuity_family_limit(const std::string& family, int K);

struct ContinuityRow {
    int i = 0;
    double dist = 0.0;            // map_distance(f_i, limit), lattice sup
    double dist_slack = 0.0;      // continuum error bar
    double upper = 0.0;           // DP value of f_i
    double upper_continuum = 0.0;
    double faces_product = 0.0;
    double faces_certified = 0.0;  // product - sampling error
};

struct ContinuityReport {
    std::string family;
    std::vector<ContinuityRow> rows;
    double limit_upper = 0.0;
    double limit_faces_product = 0.0;
    double limit_faces_certified = 0.0;
    // Positive limit certificate forces the sequence's face products to stay
    // near it (continuity of face distances in the map distance).
    bool limit_positive = false;
    bool lower_bounds_consistent = true;
    // Decaying limit evidence expects a non-increasing upper trend.
    bool uppers_non_increasing = true;
    bool consistent = true;
};

ContinuityReport continuity_experiment(const std::string& family, int count, int K);

}  // namespace contentlab
