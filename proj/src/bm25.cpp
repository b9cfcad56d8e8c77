#include "causalcite/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "causalcite/error.hpp"

namespace causalcite::bm25 {

void Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1))
        throw ContractError("bm25.k1 must be a finite value >= 0");
    if (!(b >= 0.0 && b <= 1.0))
        throw ContractError("bm25.b must lie in [0, 1]");
}

Bm25Index::Bm25Index(const std::vector<Doc>& docs, Params params) : params_(params) {
    params_.validate();
    if (docs.empty()) throw ContractError("bm25: empty document set");
    doc_ids_.reserve(docs.size());
    doc_len_.reserve(docs.size());

    std::unordered_map<std::string, std::uint32_t> tf;
    std::uint64_t total_len = 0;
    for (const auto& [id, tokens] : docs) {
        if (id.empty()) throw ContractError("bm25: empty doc_id");
        auto idx = static_cast<std::uint32_t>(doc_ids_.size());
        if (!id_to_idx_.emplace(id, idx).second)
            throw ConflictError("bm25: duplicate doc_id '" + id + "'");
        doc_ids_.push_back(id);
        doc_len_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();

        tf.clear();
        for (const auto& tok : tokens) ++tf[tok];
        for (const auto& [term, count] : tf)
            postings_[term].push_back({idx, count});
    }
    avgdl_ = doc_ids_.empty() ? 0.0
                              : static_cast<double>(total_len) /
                                    static_cast<double>(doc_ids_.size());
    // Postings were appended in doc-insertion order, hence sorted by doc
    // index already; keep that invariant explicit.
    for (auto& [term, list] : postings_)
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
}

double Bm25Index::idf(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    double df = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
    double n = static_cast<double>(doc_ids_.size());
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::vector<std::string> Bm25Index::dedup_query(
    const std::vector<std::string>& query) const {
    std::vector<std::string> terms;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : query)
        if (seen.insert(t).second) terms.push_back(t);
    return terms;
}

double Bm25Index::score(const std::vector<std::string>& query,
                        std::string_view doc_id) const {
    auto it = id_to_idx_.find(std::string(doc_id));
    if (it == id_to_idx_.end())
        throw NotFoundError("bm25: unknown doc_id '" + std::string(doc_id) + "'");
    std::uint32_t doc = it->second;

    double dl_ratio = avgdl_ > 0.0 ? doc_len_[doc] / avgdl_ : 0.0;
    double norm = params_.k1 * (1.0 - params_.b + params_.b * dl_ratio);

    double total = 0.0;
    for (const auto& term : dedup_query(query)) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        const auto& list = pit->second;
        auto pos = std::lower_bound(list.begin(), list.end(), doc,
                                    [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pos == list.end() || pos->doc != doc) continue;
        double tf = pos->tf;
        total += idf(term) * (tf * (params_.k1 + 1.0)) / (tf + norm);
    }
    return total;
}

void Bm25Index::accumulate(const std::vector<std::string>& terms,
                           std::vector<double>& acc) const {
    // Term-major traversal: each doc's partial sums land in query-term
    // order, matching score() bit for bit.
    for (const auto& term : terms) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        double term_idf = idf(term);
        for (const Posting& p : pit->second) {
            double dl_ratio = avgdl_ > 0.0 ? doc_len_[p.doc] / avgdl_ : 0.0;
            double norm = params_.k1 * (1.0 - params_.b + params_.b * dl_ratio);
            double tf = p.tf;
            acc[p.doc] += term_idf * (tf * (params_.k1 + 1.0)) / (tf + norm);
        }
    }
}

CoarseCandidateList Bm25Index::top_k(std::string_view query_id,
                                     const std::vector<std::string>& query,
                                     std::size_t k) const {
    return top_k(query_id, query, doc_ids_, k);
}

CoarseCandidateList Bm25Index::top_k(std::string_view query_id,
                                     const std::vector<std::string>& query,
                                     const std::vector<std::string>& pool,
                                     std::size_t k) const {
    if (k == 0) throw ContractError("bm25: top_k requires k >= 1");
    CoarseCandidateList result{std::string(query_id), k, {}};

    auto terms = dedup_query(query);
    if (terms.empty()) return result;

    std::vector<double> acc(doc_ids_.size(), 0.0);
    accumulate(terms, acc);

    std::vector<std::uint32_t> members;
    members.reserve(pool.size());
    for (const auto& id : pool) {
        if (id == query_id) continue;
        auto it = id_to_idx_.find(id);
        if (it == id_to_idx_.end())
            throw ContractError("bm25: pool id '" + id + "' is not indexed");
        members.push_back(it->second);
    }

    std::sort(members.begin(), members.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                  if (acc[a] != acc[b]) return acc[a] > acc[b];
                  return doc_ids_[a] < doc_ids_[b];
              });
    if (members.size() > k) members.resize(k);

    result.entries.reserve(members.size());
    for (std::uint32_t m : members) result.entries.push_back({doc_ids_[m], acc[m]});
    return result;
}

bool Bm25Index::contains(std::string_view doc_id) const {
    return id_to_idx_.contains(std::string(doc_id));
}

}  // namespace causalcite::bm25
