#include "causalcite/config.hpp"

#include <charconv>
#include <fstream>
#include <thread>

#include "causalcite/error.hpp"

namespace causalcite::config {
namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "': expected a number, got '" +
                            value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ContractError("config key '" + key + "': expected a non-negative "
                            "integer, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ContractError("config key '" + key + "': expected true/false, got '" +
                        value + "'");
}

}  // namespace

void apply_assignment(EngineConfig& cfg, const std::string& raw_key,
                      const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::string value = unquote(trim(raw_value));

    if (key == "paths.corpus") cfg.paths.corpus = value;
    else if (key == "paths.edges") cfg.paths.edges = value;
    else if (key == "paths.embeddings") cfg.paths.embeddings = value;
    else if (key == "paths.blocklist") cfg.paths.blocklist = value;
    else if (key == "match.threshold") cfg.match_threshold = parse_double(key, value);
    else if (key == "match.max_matches")
        cfg.match_max_matches = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "match.coarse_k" || key == "bm25.coarse_k")
        cfg.match_coarse_k = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "bm25.k1") cfg.bm25_k1 = parse_double(key, value);
    else if (key == "bm25.b") cfg.bm25_b = parse_double(key, value);
    else if (key == "sample.n")
        cfg.sample_n = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "sample.bins")
        cfg.sample_bins = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "sample.bin_mode") cfg.sample_bin_mode = value;
    else if (key == "sample.bin_domain") cfg.sample_bin_domain = value;
    else if (key == "sample.estimator") cfg.sample_estimator = value;
    else if (key == "sample.seed") cfg.sample_seed = parse_uint(key, value);
    else if (key == "embedding.dims")
        cfg.embedding_dims = static_cast<std::uint32_t>(parse_uint(key, value));
    else if (key == "graph.influential_only")
        cfg.graph_influential_only = parse_bool(key, value);
    else if (key == "workers")
        cfg.workers = static_cast<std::size_t>(parse_uint(key, value));
    else
        throw ContractError("unknown config key '" + key + "'");
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());

    EngineConfig cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw FormatError("bad section header at line " + std::to_string(line_no) +
                                  " in " + path.string());
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw FormatError("expected key = value at line " + std::to_string(line_no) +
                              " in " + path.string());
        std::string key = trim(t.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        apply_assignment(cfg, key, t.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void EngineConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw ContractError("config key '" + key + "': " + why);
    };
    if (!(match_threshold >= -1.0 && match_threshold <= 1.0))
        fail("match.threshold", "must lie in [-1, 1]");
    if (match_max_matches == 0) fail("match.max_matches", "must be >= 1");
    if (match_coarse_k == 0) fail("match.coarse_k", "must be >= 1");
    if (!(bm25_k1 >= 0.0)) fail("bm25.k1", "must be >= 0");
    if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) fail("bm25.b", "must lie in [0, 1]");
    if (sample_n == 0) fail("sample.n", "must be >= 1");
    if (sample_bins == 0) fail("sample.bins", "must be >= 1");
    if (sample_bin_mode != "equal_width" && sample_bin_mode != "quantile")
        fail("sample.bin_mode", "must be equal_width or quantile");
    if (sample_bin_domain != "outcome" && sample_bin_domain != "raw")
        fail("sample.bin_domain", "must be outcome or raw");
    if (sample_estimator != "stratified" && sample_estimator != "plain")
        fail("sample.estimator", "must be stratified or plain");
    if (embedding_dims == 0) fail("embedding.dims", "must be >= 1");
}

std::size_t EngineConfig::effective_workers() const {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

nlohmann::json to_json(const EngineConfig& cfg) {
    nlohmann::json j;
    j["paths"]["corpus"] = cfg.paths.corpus;
    j["paths"]["edges"] = cfg.paths.edges;
    j["paths"]["embeddings"] = cfg.paths.embeddings;
    j["paths"]["blocklist"] = cfg.paths.blocklist;
    j["match"]["threshold"] = cfg.match_threshold;
    j["match"]["max_matches"] = cfg.match_max_matches;
    j["match"]["coarse_k"] = cfg.match_coarse_k;
    j["bm25"]["k1"] = cfg.bm25_k1;
    j["bm25"]["b"] = cfg.bm25_b;
    j["sample"]["n"] = cfg.sample_n;
    j["sample"]["bins"] = cfg.sample_bins;
    j["sample"]["bin_mode"] = cfg.sample_bin_mode;
    j["sample"]["bin_domain"] = cfg.sample_bin_domain;
    j["sample"]["estimator"] = cfg.sample_estimator;
    j["sample"]["seed"] = cfg.sample_seed;
    j["embedding"]["dims"] = cfg.embedding_dims;
    j["graph"]["influential_only"] = cfg.graph_influential_only;
    // `workers` is deliberately not echoed: it cannot change any result,
    // and output bytes must not depend on the parallelism degree.
    return j;
}

}  // namespace causalcite::config
