#include "causalcite/textmatch.hpp"

#include <algorithm>
#include <cmath>

#include "causalcite/citation_graph.hpp"
#include "causalcite/corpus_store.hpp"
#include "causalcite/error.hpp"

namespace causalcite::textmatch {

double outcome(std::int64_t citation_count) {
    if (citation_count < 0)
        throw ContractError("outcome: citation_count must be >= 0");
    return std::log10(1.0 + static_cast<double>(citation_count));
}

void MatchParams::validate() const {
    if (!(threshold >= -1.0 && threshold <= 1.0))
        throw ContractError("match.threshold must lie in [-1, 1]");
    if (max_matches == 0) throw ContractError("match.max_matches must be >= 1");
    if (coarse_k == 0) throw ContractError("match.coarse_k must be >= 1");
    bm25.validate();
}

MatchSet rerank(std::string_view treated_id, const embed::Vector& treated_vec,
                const std::vector<RerankCandidate>& candidates, double threshold,
                std::size_t max_matches, PciDiagnostics* diag) {
    if (treated_vec.empty())
        throw ContractError("rerank: treated paper has no embedding vector");

    struct Scored {
        const RerankCandidate* cand;
        double sim;
    };
    std::vector<Scored> survivors;
    survivors.reserve(candidates.size());
    for (const auto& c : candidates) {
        if (!c.vector.has_value()) {
            if (diag) ++diag->missing_embedding;
            continue;
        }
        double sim = embed::cosine_similarity(treated_vec, *c.vector);
        if (sim < threshold) {
            if (diag) ++diag->below_threshold;
            continue;
        }
        survivors.push_back({&c, sim});
    }
    std::sort(survivors.begin(), survivors.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.cand->id < b.cand->id;
    });
    if (survivors.size() > max_matches) {
        if (diag) diag->dropped_by_top_k += survivors.size() - max_matches;
        survivors.resize(max_matches);
    }

    MatchSet set;
    set.treated_id = std::string(treated_id);
    set.threshold = threshold;
    set.empty = survivors.empty();
    if (set.empty) return set;

    double sim_sum = 0.0;
    for (const auto& s : survivors) sim_sum += s.sim;
    set.entries.reserve(survivors.size());
    for (const auto& s : survivors)
        set.entries.push_back({s.cand->id, s.sim, s.sim / sim_sum, s.cand->outcome});
    return set;
}

double synthesize_counterfactual(const MatchSet& match_set) {
    if (match_set.empty) return 0.0;
    double y_hat = 0.0;
    for (const auto& e : match_set.entries) y_hat += e.weight * e.outcome;
    return y_hat;
}

struct TextMatchEngine::YearSlot {
    std::once_flag built;
    std::shared_ptr<const bm25::Bm25Index> index;
};

TextMatchEngine::TextMatchEngine(const corpus::CorpusStore& store,
                                 const graph::CitationGraph& graph,
                                 const embed::EmbeddingProvider& provider,
                                 const text_prep::Blocklist& blocklist,
                                 MatchParams params)
    : store_(store), graph_(graph), provider_(provider), blocklist_(blocklist),
      params_(params) {
    params_.validate();
}

text_prep::CleanedText TextMatchEngine::cleaned(const std::string& paper_id) const {
    const auto& rec = store_.get(paper_id);
    return text_prep::clean(paper_id, rec.title, rec.abstract_text, blocklist_);
}

const bm25::Bm25Index& TextMatchEngine::year_index(int year) const {
    std::shared_ptr<YearSlot> slot;
    {
        std::lock_guard lock(index_mutex_);
        auto& entry = year_slots_[year];
        if (!entry) entry = std::make_shared<YearSlot>();
        slot = entry;
    }
    std::call_once(slot->built, [&] {
        const auto& ids = store_.papers_in_year(year);
        if (ids.empty())
            throw ContractError("no papers in year " + std::to_string(year));
        std::vector<bm25::Bm25Index::Doc> docs;
        docs.reserve(ids.size());
        for (const auto& id : ids) {
            const auto& rec = store_.get(id);
            auto ct = text_prep::clean(id, rec.title, rec.abstract_text, blocklist_);
            docs.emplace_back(id, std::move(ct.tokens));
        }
        slot->index = std::make_shared<const bm25::Bm25Index>(docs, params_.bm25);
    });
    if (!slot->index)
        throw ContractError("no papers in year " + std::to_string(year));
    return *slot->index;
}

PciResult TextMatchEngine::pci(std::string_view a, std::string_view b) const {
    store_.get(a);  // not-found surfaces before the edge check
    const auto& b_rec = store_.get(b);
    if (!graph_.has_edge(a, b))
        throw ContractError("b is not a follow-up of a: no edge " + std::string(a) +
                            " -> " + std::string(b));

    PciResult result;
    result.a_id = std::string(a);
    result.b_id = std::string(b);
    result.y_b = outcome(b_rec.citation_count);

    const int year = b_rec.year;
    auto pool = graph_.non_descendant_pool_in_year(a, year);
    result.diagnostics.year_partition = store_.papers_in_year(year).size();
    result.diagnostics.pool_size = pool.size();
    result.diagnostics.excluded_from_pool =
        result.diagnostics.year_partition - pool.size();

    auto b_clean = cleaned(result.b_id);
    auto b_vec = provider_.vector_for(result.b_id, b_clean.tokens);
    if (!b_vec.has_value())
        throw ContractError("paper '" + result.b_id +
                            "' has no embedding and no cleanable text");

    MatchSet match_set;
    match_set.treated_id = result.b_id;
    match_set.threshold = params_.threshold;

    if (!pool.empty()) {
        const auto& index = year_index(year);
        auto coarse = index.top_k(b, b_clean.tokens, pool, params_.coarse_k);
        result.diagnostics.coarse_kept = coarse.entries.size();
        result.diagnostics.dropped_by_coarse = pool.size() - coarse.entries.size();

        std::vector<RerankCandidate> candidates;
        candidates.reserve(coarse.entries.size());
        for (const auto& entry : coarse.entries) {
            const auto& rec = store_.get(entry.doc_id);
            RerankCandidate c;
            c.id = entry.doc_id;
            c.outcome = outcome(rec.citation_count);
            auto ct = text_prep::clean(c.id, rec.title, rec.abstract_text, blocklist_);
            c.vector = provider_.vector_for(c.id, ct.tokens);
            candidates.push_back(std::move(c));
        }
        match_set = rerank(result.b_id, *b_vec, candidates, params_.threshold,
                           params_.max_matches, &result.diagnostics);
    }

    result.match_set = std::move(match_set);
    result.y_hat_t0 = synthesize_counterfactual(result.match_set);
    result.pci = result.y_b - result.y_hat_t0;
    return result;
}

}  // namespace causalcite::textmatch
