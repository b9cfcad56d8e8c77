#pragma once
// Engine configuration: defaults, TOML-style file parsing, validation,
// and the JSON echo stamped into every CLI output.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace causalcite::config {

struct EngineConfig {
    struct Paths {
        std::string corpus;
        std::string edges;
        std::string embeddings;  // optional CCEMB1 store
        std::string blocklist;   // optional phrase file
    } paths;

    double match_threshold = 0.81;
    std::size_t match_max_matches = 10;
    std::size_t match_coarse_k = 100;

    double bm25_k1 = 1.5;
    double bm25_b = 0.75;

    std::size_t sample_n = 40;
    std::size_t sample_bins = 8;
    std::string sample_bin_mode = "equal_width";  // or "quantile"
    std::string sample_bin_domain = "outcome";    // or "raw"
    std::string sample_estimator = "stratified";  // or "plain"
    std::uint64_t sample_seed = 0;

    std::uint32_t embedding_dims = 256;
    bool graph_influential_only = false;
    std::size_t workers = 0;  // 0 -> hardware concurrency

    // Throws ContractError naming the offending key.
    void validate() const;

    std::size_t effective_workers() const;
};

// key = value lines, `#` comments, optional [section] headers or dotted
// keys; unknown keys are rejected by name.
EngineConfig load_config(const std::filesystem::path& path);

// Applies a single `key=value` assignment (used for file rows and CLI
// `--set` overrides alike).
void apply_assignment(EngineConfig& cfg, const std::string& key, const std::string& value);

nlohmann::json to_json(const EngineConfig& cfg);

}  // namespace causalcite::config
