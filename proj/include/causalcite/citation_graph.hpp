#pragma once
// Directed citation graph over a corpus. Edge a -> b means b cites a
// (b is a follow-up of a). Immutable after ingest; descendant queries
// are memoized and thread-safe.

#include <cstdint>
#include <filesystem>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace causalcite::corpus { class CorpusStore; }

namespace causalcite::graph {

struct EdgeRejection {
    std::size_t line_number = 0;
    std::string reason;
};

struct EdgeIngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t duplicates = 0;
    std::vector<EdgeRejection> rejections;
};

class CitationGraph {
public:
    explicit CitationGraph(const corpus::CorpusStore& store) : store_(store) {}

    // TSV rows `from<TAB>to[<TAB>is_influential]`. Both endpoints must
    // exist in the corpus; self-loops and unknown ids are rejected row
    // by row. Duplicate edges collapse, OR-ing the influential flag.
    EdgeIngestReport ingest_tsv(const std::filesystem::path& path);

    struct Edge {
        std::string from;
        std::string to;
        bool is_influential = false;
    };
    EdgeIngestReport ingest_edges(const std::vector<Edge>& edges,
                                  std::size_t base_line = 1);

    // Direct citers of `paper_id`, ascending byte order.
    std::vector<std::string> children(std::string_view paper_id,
                                      bool influential_only = false) const;

    // Transitive citers (excludes the paper itself), ascending byte order.
    std::vector<std::string> descendants(std::string_view paper_id) const;

    // Papers that `paper_id` cites (reverse adjacency), ascending byte order.
    std::vector<std::string> references(std::string_view paper_id) const;

    bool has_edge(std::string_view from, std::string_view to) const;
    std::size_t edge_count() const { return edge_count_; }

    // Entire corpus minus descendants(paper_id) minus the paper itself;
    // ascending byte order. The candidate control pool before the year
    // filter.
    std::vector<std::string> non_descendant_pool(std::string_view paper_id) const;

    // Same pool restricted to papers published in `year`; what the
    // counterfactual pipeline actually consumes.
    std::vector<std::string> non_descendant_pool_in_year(std::string_view paper_id,
                                                         int year) const;

    // Same TSV schema as ingest, rows sorted (from, to) byte order.
    void export_tsv(const std::filesystem::path& path) const;

private:
    std::uint32_t intern(const std::string& id);
    EdgeIngestReport ingest_impl(const std::vector<Edge>& edges,
                                 const std::vector<std::size_t>& lines);
    const std::vector<std::uint32_t>& descendant_set(std::uint32_t node) const;

    const corpus::CorpusStore& store_;
    std::unordered_map<std::string, std::uint32_t> id_to_node_;
    std::vector<std::string> node_to_id_;
    std::vector<std::vector<std::uint32_t>> out_;          // node -> citer nodes
    std::vector<std::vector<std::uint32_t>> in_;           // node -> cited nodes
    std::vector<std::vector<std::uint8_t>> out_influential_;
    std::size_t edge_count_ = 0;

    mutable std::shared_mutex memo_mutex_;
    mutable std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> desc_memo_;
};

}  // namespace causalcite::graph
