#include "causalcite/serialize.hpp"

namespace causalcite::serialize {

using nlohmann::json;

json to_json(const textmatch::MatchSet& set) {
    json j;
    j["treated_id"] = set.treated_id;
    j["threshold"] = set.threshold;
    j["empty"] = set.empty;
    j["entries"] = json::array();
    for (const auto& e : set.entries) {
        json entry;
        entry["candidate_id"] = e.candidate_id;
        entry["similarity"] = e.similarity;
        entry["weight"] = e.weight;
        entry["outcome"] = e.outcome;
        j["entries"].push_back(std::move(entry));
    }
    return j;
}

json to_json(const textmatch::PciDiagnostics& diag) {
    json j;
    j["year_partition"] = diag.year_partition;
    j["excluded_from_pool"] = diag.excluded_from_pool;
    j["pool_size"] = diag.pool_size;
    j["coarse_kept"] = diag.coarse_kept;
    j["dropped_by_coarse"] = diag.dropped_by_coarse;
    j["missing_embedding"] = diag.missing_embedding;
    j["below_threshold"] = diag.below_threshold;
    j["dropped_by_top_k"] = diag.dropped_by_top_k;
    return j;
}

json to_json(const textmatch::PciResult& result) {
    json j;
    j["schema"] = kPciSchema;
    j["a_id"] = result.a_id;
    j["b_id"] = result.b_id;
    j["y_b"] = result.y_b;
    j["y_hat_t0"] = result.y_hat_t0;
    j["pci"] = result.pci;
    j["match_set"] = to_json(result.match_set);
    j["diagnostics"] = to_json(result.diagnostics);
    return j;
}

json to_json(const indices::SamplePlan& plan) {
    json j;
    j["paper_a"] = plan.paper_a;
    j["children_count"] = plan.children_count;
    j["n_requested"] = plan.n_requested;
    j["seed"] = plan.seed;
    j["sampled_ids"] = plan.sampled_ids;
    j["bins"] = json::array();
    for (const auto& bin : plan.bins) {
        json b;
        b["lower"] = bin.lower;
        b["upper"] = bin.upper;
        b["size"] = bin.member_ids.size();
        b["quota"] = bin.quota;
        j["bins"].push_back(std::move(b));
    }
    return j;
}

json to_json(const indices::ImpactEstimate& est) {
    json j;
    j["schema"] = kImpactSchema;
    j["paper_a"] = est.paper_a;
    j["aci"] = est.aci;
    j["tci"] = est.tci;
    j["children_count"] = est.children_count;
    j["sample_plan"] = to_json(est.plan);
    j["per_sample"] = json::array();
    for (const auto& s : est.per_sample) {
        json sample;
        sample["b_id"] = s.b_id;
        sample["bin_index"] = s.bin_index;
        sample["backfill"] = s.backfill;
        sample["result"] = to_json(s.result);
        j["per_sample"].push_back(std::move(sample));
    }
    j["failed"] = json::array();
    for (const auto& f : est.failed) {
        json fail;
        fail["b_id"] = f.b_id;
        fail["bin_index"] = f.bin_index;
        fail["reason"] = f.reason;
        j["failed"].push_back(std::move(fail));
    }
    return j;
}

}  // namespace causalcite::serialize
