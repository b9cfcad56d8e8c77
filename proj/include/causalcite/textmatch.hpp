#pragma once
// The causal core: embedding rerank, counterfactual synthesis (Eq. 6
// shape: similarity-weighted convex combination), and per-pair PCI.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "causalcite/bm25.hpp"
#include "causalcite/embedding.hpp"
#include "causalcite/text_prep.hpp"

namespace causalcite::corpus { class CorpusStore; }
namespace causalcite::graph { class CitationGraph; }

namespace causalcite::textmatch {

// log10(1 + count); the +1 shift keeps zero-citation papers defined.
double outcome(std::int64_t citation_count);

struct MatchEntry {
    std::string candidate_id;
    double similarity = 0.0;  // m_i
    double weight = 0.0;      // m_i / sum(m_j)
    double outcome = 0.0;     // y_i
};

struct MatchSet {
    std::string treated_id;
    double threshold = 0.0;
    std::vector<MatchEntry> entries;  // descending m_i, ties ascending id
    bool empty = true;

    bool operator==(const MatchSet&) const = default;
};

struct PciDiagnostics {
    std::size_t year_partition = 0;     // corpus papers sharing b's year
    std::size_t excluded_from_pool = 0; // a + descendants of a in that year
    std::size_t pool_size = 0;
    std::size_t coarse_kept = 0;
    std::size_t dropped_by_coarse = 0;  // pool members outside the BM25 top-k
    std::size_t missing_embedding = 0;  // candidates with no vector and no text
    std::size_t below_threshold = 0;
    std::size_t dropped_by_top_k = 0;   // above threshold, beyond max_matches

    bool operator==(const PciDiagnostics&) const = default;
};

struct PciResult {
    std::string a_id;
    std::string b_id;
    double y_b = 0.0;
    double y_hat_t0 = 0.0;
    double pci = 0.0;  // y_b - y_hat_t0, exactly as stored
    MatchSet match_set;
    PciDiagnostics diagnostics;
};

// One rerank candidate: its vector may be absent (no stored embedding
// and no cleanable text), in which case it is skipped and counted.
struct RerankCandidate {
    std::string id;
    std::optional<embed::Vector> vector;
    double outcome = 0.0;
};

// Survivors with cos >= threshold, top max_matches by similarity (ties
// prefer the smaller candidate_id), weights normalized to sum 1.
MatchSet rerank(std::string_view treated_id, const embed::Vector& treated_vec,
                const std::vector<RerankCandidate>& candidates, double threshold,
                std::size_t max_matches, PciDiagnostics* diag = nullptr);

// sum(w_i * y_i); empty set -> 0.0 (the zero-counterfactual rule).
double synthesize_counterfactual(const MatchSet& match_set);

struct MatchParams {
    double threshold = 0.81;
    std::size_t max_matches = 10;
    std::size_t coarse_k = 100;
    bm25::Params bm25;

    void validate() const;
};

// Computes PCI(a, b) over immutable stores. Safe for concurrent pci()
// calls; per-year BM25 indexes are built lazily, exactly once.
class TextMatchEngine {
public:
    TextMatchEngine(const corpus::CorpusStore& store, const graph::CitationGraph& graph,
                    const embed::EmbeddingProvider& provider,
                    const text_prep::Blocklist& blocklist, MatchParams params);

    // Requires edge a->b. Pipeline: year filter -> non-descendant pool
    // -> mediator removal -> BM25 coarse top-k -> cosine rerank ->
    // counterfactual synthesis.
    PciResult pci(std::string_view a, std::string_view b) const;

    const bm25::Bm25Index& year_index(int year) const;
    const MatchParams& params() const { return params_; }

private:
    text_prep::CleanedText cleaned(const std::string& paper_id) const;

    const corpus::CorpusStore& store_;
    const graph::CitationGraph& graph_;
    const embed::EmbeddingProvider& provider_;
    const text_prep::Blocklist& blocklist_;
    MatchParams params_;

    struct YearSlot;
    mutable std::mutex index_mutex_;
    mutable std::unordered_map<int, std::shared_ptr<YearSlot>> year_slots_;
};

}  // namespace causalcite::textmatch
