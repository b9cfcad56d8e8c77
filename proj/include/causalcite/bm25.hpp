#pragma once
// Okapi BM25 over tokenized documents. Coarse retrieval stage ahead of
// the embedding rerank. Immutable after construction; concurrent
// queries are safe.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace causalcite::bm25 {

struct Params {
    double k1 = 1.5;
    double b = 0.75;
    void validate() const;  // k1 >= 0, b in [0, 1]
};

struct Scored {
    std::string doc_id;
    double score = 0.0;
};

struct CoarseCandidateList {
    std::string query_id;
    std::size_t k_requested = 0;
    std::vector<Scored> entries;  // descending score, ties ascending doc_id
};

class Bm25Index {
public:
    using Doc = std::pair<std::string, std::vector<std::string>>;

    // Doc set must be non-empty with unique ids.
    explicit Bm25Index(const std::vector<Doc>& docs, Params params = {});

    // IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1): always positive for
    // any df <= N, so every matched term helps.
    double idf(std::string_view term) const;

    // Query terms are deduplicated in first-appearance order and summed
    // in that order, so equal scores are bit-identical across queries.
    double score(const std::vector<std::string>& query, std::string_view doc_id) const;

    // The k highest-scoring pool members, zero scores included; ties
    // break by ascending doc_id; the query paper never appears even if
    // the pool contains it. Empty query token list yields an empty
    // candidate list. Every pool id must be indexed; k must be >= 1.
    CoarseCandidateList top_k(std::string_view query_id,
                              const std::vector<std::string>& query,
                              const std::vector<std::string>& pool,
                              std::size_t k) const;

    // Pool = all indexed documents.
    CoarseCandidateList top_k(std::string_view query_id,
                              const std::vector<std::string>& query,
                              std::size_t k) const;

    std::size_t size() const { return doc_ids_.size(); }
    double avg_doc_len() const { return avgdl_; }
    bool contains(std::string_view doc_id) const;

private:
    std::vector<std::string> dedup_query(const std::vector<std::string>& query) const;
    void accumulate(const std::vector<std::string>& terms, std::vector<double>& acc) const;

    Params params_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> id_to_idx_;
    std::vector<std::uint32_t> doc_len_;
    double avgdl_ = 0.0;

    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;
    };
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

}  // namespace causalcite::bm25
