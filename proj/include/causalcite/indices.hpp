#pragma once
// ACI / TCI estimation over a paper's follow-up set: citation-binned
// stratified sampling, per-sample PCI, deterministic aggregation.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "causalcite/textmatch.hpp"

namespace causalcite::indices {

enum class BinMode { EqualWidth, Quantile };
enum class BinDomain { Outcome, RawCitations };
enum class Estimator { Stratified, Plain };

struct SampleParams {
    std::size_t n = 40;         // Alg. 1 sample budget
    std::size_t bin_count = 8;
    BinMode bin_mode = BinMode::EqualWidth;
    BinDomain bin_domain = BinDomain::Outcome;
    Estimator estimator = Estimator::Stratified;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Bin {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::string> member_ids;  // ascending id order
    std::size_t quota = 0;
    // Members in seeded shuffle order; the first `quota` are the planned
    // sample, the rest are the backfill queue for failed samples.
    std::vector<std::string> draw_order;
};

struct SamplePlan {
    std::string paper_a;
    std::size_t children_count = 0;
    std::vector<Bin> bins;
    std::vector<std::string> sampled_ids;  // bin order, then draw order
    std::uint64_t seed = 0;
    std::size_t n_requested = 0;
};

// `children` pairs each follow-up id with its binning value (outcome or
// raw citations per bin_domain), ids unique.
SamplePlan plan_sample(const std::string& paper_a,
                       const std::vector<std::pair<std::string, double>>& children,
                       const SampleParams& params);

struct SampleOutcome {
    std::string b_id;
    std::size_t bin_index = 0;
    bool backfill = false;  // drawn to replace a failed sample
    textmatch::PciResult result;
};

struct FailedSample {
    std::string b_id;
    std::size_t bin_index = 0;
    std::string reason;
};

struct ImpactEstimate {
    std::string paper_a;
    double aci = 0.0;
    double tci = 0.0;  // aci * children_count, exactly as multiplied
    std::size_t children_count = 0;
    SamplePlan plan;
    std::vector<SampleOutcome> per_sample;  // deterministic plan order
    std::vector<FailedSample> failed;
};

using PciFn = std::function<textmatch::PciResult(const std::string& b_id)>;

// Runs pci_fn over the planned samples (in parallel when workers > 1),
// backfills failures within-bin, and aggregates in plan order so the
// result is bit-identical for any worker count.
ImpactEstimate estimate_impact(const std::string& paper_a,
                               const std::vector<std::pair<std::string, double>>& children,
                               const SampleParams& params, const PciFn& pci_fn,
                               std::size_t workers = 1);

// Convenience: wires children/outcomes from the engine's stores.
ImpactEstimate impact(const textmatch::TextMatchEngine& engine,
                      const corpus::CorpusStore& store, const graph::CitationGraph& graph,
                      const std::string& paper_a, const SampleParams& params,
                      std::size_t workers = 1, bool influential_only = false,
                      bool exact = false);

}  // namespace causalcite::indices
