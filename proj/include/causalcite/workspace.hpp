#pragma once
// Wires the stores, provider, and engine together from an EngineConfig;
// also the on-disk store-directory format (manifest + fixed exports).

#include <filesystem>
#include <memory>
#include <optional>

#include "causalcite/citation_graph.hpp"
#include "causalcite/config.hpp"
#include "causalcite/corpus_store.hpp"
#include "causalcite/embedding.hpp"
#include "causalcite/indices.hpp"
#include "causalcite/text_prep.hpp"
#include "causalcite/textmatch.hpp"

namespace causalcite::workspace {

inline constexpr const char* kStoreFormat = "causalcite-store";
inline constexpr int kStoreVersion = 1;

// Writes manifest.json + papers.jsonl + edges.tsv into `dir`.
void save_store(const corpus::CorpusStore& store, const graph::CitationGraph& graph,
                const std::filesystem::path& dir);

struct Workspace {
    config::EngineConfig cfg;
    std::unique_ptr<corpus::CorpusStore> corpus;
    std::unique_ptr<graph::CitationGraph> graph;
    std::unique_ptr<embed::EmbeddingStore> embeddings;  // null in fallback mode
    std::unique_ptr<embed::EmbeddingProvider> provider;
    std::unique_ptr<text_prep::Blocklist> blocklist;  // engine keeps a reference
    std::unique_ptr<textmatch::TextMatchEngine> engine;

    corpus::IngestReport corpus_report;
    graph::EdgeIngestReport edges_report;
    std::optional<embed::LoadReport> embedding_report;
    bool fallback_embeddings = false;

    indices::SampleParams sample_params() const;
};

// Loads corpus + edges (paths.corpus may name a store directory, in
// which case paths.edges is ignored), optional embeddings, blocklist,
// and constructs the engine. Throws on missing inputs.
Workspace open(const config::EngineConfig& cfg);

}  // namespace causalcite::workspace
