#pragma once

#include <json.hpp>
#include <string>

#include "contentlab/content.hpp"
#include "contentlab/metric.hpp"
#include "contentlab/seminorm.hpp"
#include "contentlab/tree.hpp"
#include "contentlab/zoo.hpp"

namespace contentlab {

using nlohmann::json;

/// Reals are serialized as decimal strings with 17 significant digits, which
/// round-trips IEEE doubles exactly and keeps files byte-stable.
std::string real17(double v);
double parse_real(const json& j);
json real_array(const std::vector<double>& v);
std::vector<double> parse_real_array(const json& j);

json tree_to_json(const MetricTree& t);
MetricTree tree_from_json(const json& j);

json gridmap_to_json(const GridMap& f);
GridMap gridmap_from_json(const json& j);

/// FNV-1a over the canonical serialization; identifies the map a certificate
/// belongs to.
std::string map_content_hash(const GridMap& f);

json face_certificate_to_json(const FaceCertificate& c, const std::string& map_hash);
json dp_result_to_json(const DPResult& r, const std::string& map_hash);
json witness_to_json(const GoodCubeWitness& w, const std::string& map_hash);
json positive_certificate_to_json(const PositiveContentCertificate& c,
                                  const std::string& map_hash);
json factorization_to_json(const TreeFactorization& tf, const std::string& f_hash);
TreeFactorization factorization_from_json(const json& j);
GoodCubeWitness witness_from_json(const json& j);

/// Atomic write (temp file + rename) so concurrent readers never see a torn
/// report.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

struct VerifyResult {
    bool pass = true;
    std::vector<std::string> failures;

    void fail(std::string why) {
        pass = false;
        failures.push_back(std::move(why));
    }
};

/// Replays every arithmetic claim of a serialized certificate against the
/// map, at tolerance 1e-9. Dispatches on the certificate's schema field.
VerifyResult verify_certificate(const GridMap& f, const json& cert);

}  // namespace contentlab
