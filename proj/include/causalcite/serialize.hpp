#pragma once
// JSON views of result types. nlohmann objects keep keys sorted, so
// identical values always serialize to identical bytes.

#include <json.hpp>

#include "causalcite/indices.hpp"
#include "causalcite/textmatch.hpp"

namespace causalcite::serialize {

inline constexpr const char* kPciSchema = "causalcite/pci-result/1";
inline constexpr const char* kImpactSchema = "causalcite/impact-result/1";

nlohmann::json to_json(const textmatch::MatchSet& set);
nlohmann::json to_json(const textmatch::PciDiagnostics& diag);
nlohmann::json to_json(const textmatch::PciResult& result);  // carries kPciSchema
nlohmann::json to_json(const indices::SamplePlan& plan);
nlohmann::json to_json(const indices::ImpactEstimate& est);  // carries kImpactSchema

}  // namespace causalcite::serialize
