#include "causalcite/workspace.hpp"

#include <fstream>
#include <json.hpp>

#include "causalcite/error.hpp"

namespace causalcite::workspace {

namespace fs = std::filesystem;
using nlohmann::json;

void save_store(const corpus::CorpusStore& store, const graph::CitationGraph& graph,
                const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create store directory: " + dir.string());

    store.export_jsonl(dir / "papers.jsonl");
    graph.export_tsv(dir / "edges.tsv");

    json manifest;
    manifest["format"] = kStoreFormat;
    manifest["version"] = kStoreVersion;
    manifest["papers"] = store.size();
    manifest["edges"] = graph.edge_count();
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

namespace {

// Resolves corpus/edges paths, transparently unwrapping a store dir.
std::pair<fs::path, fs::path> resolve_inputs(const config::EngineConfig& cfg) {
    if (cfg.paths.corpus.empty())
        throw IoError("corpus file not found: no paths.corpus configured");
    fs::path corpus(cfg.paths.corpus);

    if (fs::is_directory(corpus)) {
        fs::path manifest_path = corpus / "manifest.json";
        std::ifstream in(manifest_path, std::ios::binary);
        if (!in)
            throw IoError("store manifest not found: " + manifest_path.string());
        json manifest = json::parse(in, nullptr, /*allow_exceptions=*/false);
        if (manifest.is_discarded() || manifest.value("format", "") != kStoreFormat)
            throw FormatError("not a causalcite store: " + corpus.string());
        if (manifest.value("version", -1) != kStoreVersion)
            throw FormatError("unsupported store version in " + manifest_path.string());
        return {corpus / "papers.jsonl", corpus / "edges.tsv"};
    }

    if (!fs::exists(corpus))
        throw IoError("corpus file not found: " + corpus.string());
    if (cfg.paths.edges.empty())
        throw IoError("edges file not found: no paths.edges configured");
    fs::path edges(cfg.paths.edges);
    if (!fs::exists(edges))
        throw IoError("edges file not found: " + edges.string());
    return {corpus, edges};
}

}  // namespace

indices::SampleParams Workspace::sample_params() const {
    indices::SampleParams p;
    p.n = cfg.sample_n;
    p.bin_count = cfg.sample_bins;
    p.bin_mode = cfg.sample_bin_mode == "quantile" ? indices::BinMode::Quantile
                                                   : indices::BinMode::EqualWidth;
    p.bin_domain = cfg.sample_bin_domain == "raw" ? indices::BinDomain::RawCitations
                                                  : indices::BinDomain::Outcome;
    p.estimator = cfg.sample_estimator == "plain" ? indices::Estimator::Plain
                                                  : indices::Estimator::Stratified;
    p.seed = cfg.sample_seed;
    return p;
}

Workspace open(const config::EngineConfig& cfg) {
    cfg.validate();
    Workspace ws;
    ws.cfg = cfg;

    auto [corpus_path, edges_path] = resolve_inputs(cfg);
    ws.corpus = std::make_unique<corpus::CorpusStore>();
    ws.corpus_report = ws.corpus->ingest_jsonl(corpus_path);
    ws.graph = std::make_unique<graph::CitationGraph>(*ws.corpus);
    ws.edges_report = ws.graph->ingest_tsv(edges_path);

    if (!cfg.paths.blocklist.empty()) {
        if (!fs::exists(cfg.paths.blocklist))
            throw IoError("blocklist file not found: " + cfg.paths.blocklist);
        ws.blocklist = std::make_unique<text_prep::Blocklist>(
            text_prep::Blocklist::from_file(cfg.paths.blocklist));
    } else {
        ws.blocklist = std::make_unique<text_prep::Blocklist>(
            text_prep::Blocklist::default_blocklist());
    }

    if (!cfg.paths.embeddings.empty()) {
        fs::path emb(cfg.paths.embeddings);
        if (!fs::exists(emb))
            throw IoError("embeddings file not found: " + emb.string());
        ws.embeddings = std::make_unique<embed::EmbeddingStore>();
        auto known = ws.corpus->all_ids();
        ws.embedding_report = ws.embeddings->load(emb, &known);
        ws.provider = std::make_unique<embed::StoreProvider>(*ws.embeddings);
    } else {
        ws.provider = std::make_unique<embed::FallbackProvider>(cfg.embedding_dims);
        ws.fallback_embeddings = true;
    }

    textmatch::MatchParams params;
    params.threshold = cfg.match_threshold;
    params.max_matches = cfg.match_max_matches;
    params.coarse_k = cfg.match_coarse_k;
    params.bm25.k1 = cfg.bm25_k1;
    params.bm25.b = cfg.bm25_b;
    ws.engine = std::make_unique<textmatch::TextMatchEngine>(
        *ws.corpus, *ws.graph, *ws.provider, *ws.blocklist, params);
    return ws;
}

}  // namespace causalcite::workspace
