#include "causalcite/citation_graph.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "causalcite/corpus_store.hpp"
#include "causalcite/error.hpp"

namespace causalcite::graph {
namespace {

// Splits a TSV row; returns false when the column count is wrong.
bool split_tsv(const std::string& line, std::vector<std::string>& cols) {
    cols.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols.size() == 2 || cols.size() == 3;
}

}  // namespace

std::uint32_t CitationGraph::intern(const std::string& id) {
    auto it = id_to_node_.find(id);
    if (it != id_to_node_.end()) return it->second;
    auto node = static_cast<std::uint32_t>(node_to_id_.size());
    id_to_node_.emplace(id, node);
    node_to_id_.push_back(id);
    out_.emplace_back();
    in_.emplace_back();
    out_influential_.emplace_back();
    return node;
}

EdgeIngestReport CitationGraph::ingest_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open edges file: " + path.string());

    std::vector<Edge> edges;
    std::vector<EdgeRejection> rejections;
    std::vector<std::size_t> lines;
    std::string line;
    std::vector<std::string> cols;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!split_tsv(line, cols)) {
            rejections.push_back({line_no, "expected 2 or 3 tab-separated columns"});
            continue;
        }
        Edge e;
        e.from = cols[0];
        e.to = cols[1];
        if (cols.size() == 3) {
            if (cols[2] == "1") {
                e.is_influential = true;
            } else if (cols[2] == "0") {
                e.is_influential = false;
            } else {
                rejections.push_back({line_no, "is_influential must be 0 or 1"});
                continue;
            }
        }
        edges.push_back(std::move(e));
        lines.push_back(line_no);
    }

    EdgeIngestReport report = ingest_impl(edges, lines);
    for (auto& r : rejections) report.rejections.push_back(std::move(r));
    std::sort(report.rejections.begin(), report.rejections.end(),
              [](const auto& a, const auto& b) { return a.line_number < b.line_number; });
    report.rejected = report.rejections.size();
    return report;
}

EdgeIngestReport CitationGraph::ingest_edges(const std::vector<Edge>& edges,
                                             std::size_t base_line) {
    std::vector<std::size_t> lines(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) lines[i] = base_line + i;
    return ingest_impl(edges, lines);
}

EdgeIngestReport CitationGraph::ingest_impl(const std::vector<Edge>& edges,
                                            const std::vector<std::size_t>& lines) {
    if (!desc_memo_.empty()) {
        std::unique_lock lock(memo_mutex_);
        desc_memo_.clear();  // topology changes invalidate memoized closures
    }
    EdgeIngestReport report;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        const std::size_t line_no = lines[i];
        if (e.from.empty() || e.to.empty()) {
            report.rejections.push_back({line_no, "empty endpoint id"});
            continue;
        }
        if (e.from == e.to) {
            report.rejections.push_back({line_no, "self-citation edge '" + e.from + "'"});
            continue;
        }
        if (!store_.find(e.from)) {
            report.rejections.push_back({line_no, "unknown paper_id '" + e.from + "'"});
            continue;
        }
        if (!store_.find(e.to)) {
            report.rejections.push_back({line_no, "unknown paper_id '" + e.to + "'"});
            continue;
        }
        std::uint32_t from = intern(e.from);
        std::uint32_t to = intern(e.to);
        auto& citers = out_[from];
        auto pos = std::find(citers.begin(), citers.end(), to);
        if (pos != citers.end()) {
            auto idx = static_cast<std::size_t>(pos - citers.begin());
            out_influential_[from][idx] |= static_cast<std::uint8_t>(e.is_influential);
            ++report.duplicates;
            continue;
        }
        citers.push_back(to);
        out_influential_[from].push_back(static_cast<std::uint8_t>(e.is_influential));
        in_[to].push_back(from);
        ++edge_count_;
        ++report.accepted;
    }
    report.rejected = report.rejections.size();
    return report;
}

std::vector<std::string> CitationGraph::children(std::string_view paper_id,
                                                 bool influential_only) const {
    store_.get(paper_id);  // surfaces NotFoundError for unknown ids
    auto it = id_to_node_.find(std::string(paper_id));
    if (it == id_to_node_.end()) return {};
    const auto& citers = out_[it->second];
    const auto& flags = out_influential_[it->second];
    std::vector<std::string> out;
    out.reserve(citers.size());
    for (std::size_t i = 0; i < citers.size(); ++i) {
        if (influential_only && !flags[i]) continue;
        out.push_back(node_to_id_[citers[i]]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<std::uint32_t>& CitationGraph::descendant_set(std::uint32_t node) const {
    {
        std::shared_lock lock(memo_mutex_);
        if (auto it = desc_memo_.find(node); it != desc_memo_.end()) return it->second;
    }
    // BFS with a visited set; the graph may contain cycles (bad data,
    // mutual citations) and must still terminate.
    std::vector<std::uint32_t> result;
    std::unordered_set<std::uint32_t> visited;
    std::vector<std::uint32_t> frontier{node};
    visited.insert(node);
    while (!frontier.empty()) {
        std::uint32_t cur = frontier.back();
        frontier.pop_back();
        for (std::uint32_t next : out_[cur]) {
            if (visited.insert(next).second) {
                result.push_back(next);
                frontier.push_back(next);
            }
        }
    }
    std::sort(result.begin(), result.end(), [this](std::uint32_t a, std::uint32_t b) {
        return node_to_id_[a] < node_to_id_[b];
    });
    std::unique_lock lock(memo_mutex_);
    return desc_memo_.try_emplace(node, std::move(result)).first->second;
}

std::vector<std::string> CitationGraph::descendants(std::string_view paper_id) const {
    store_.get(paper_id);
    auto it = id_to_node_.find(std::string(paper_id));
    if (it == id_to_node_.end()) return {};
    const auto& nodes = descendant_set(it->second);
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (std::uint32_t n : nodes) out.push_back(node_to_id_[n]);
    return out;
}

bool CitationGraph::has_edge(std::string_view from, std::string_view to) const {
    auto f = id_to_node_.find(std::string(from));
    if (f == id_to_node_.end()) return false;
    auto t = id_to_node_.find(std::string(to));
    if (t == id_to_node_.end()) return false;
    const auto& citers = out_[f->second];
    return std::find(citers.begin(), citers.end(), t->second) != citers.end();
}

std::vector<std::string> CitationGraph::references(std::string_view paper_id) const {
    store_.get(paper_id);
    auto it = id_to_node_.find(std::string(paper_id));
    if (it == id_to_node_.end()) return {};
    std::vector<std::string> out;
    out.reserve(in_[it->second].size());
    for (std::uint32_t n : in_[it->second]) out.push_back(node_to_id_[n]);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Shared filter: candidates minus descendants(paper) minus the paper.
std::vector<std::string> filter_pool(std::string_view paper_id,
                                     const std::vector<std::string>& candidates,
                                     const std::unordered_set<std::string_view>& excluded) {
    std::vector<std::string> pool;
    pool.reserve(candidates.size());
    for (const auto& id : candidates) {
        if (id == paper_id) continue;
        if (excluded.contains(id)) continue;
        pool.push_back(id);
    }
    return pool;
}

}  // namespace

std::vector<std::string> CitationGraph::non_descendant_pool(std::string_view paper_id) const {
    const auto desc = descendants(paper_id);  // validates paper_id
    std::unordered_set<std::string_view> excluded(desc.begin(), desc.end());
    return filter_pool(paper_id, store_.all_ids(), excluded);
}

std::vector<std::string> CitationGraph::non_descendant_pool_in_year(
    std::string_view paper_id, int year) const {
    const auto desc = descendants(paper_id);
    std::unordered_set<std::string_view> excluded(desc.begin(), desc.end());
    return filter_pool(paper_id, store_.papers_in_year(year), excluded);
}

void CitationGraph::export_tsv(const std::filesystem::path& path) const {
    struct Row {
        std::string from, to;
        bool influential;
    };
    std::vector<Row> rows;
    rows.reserve(edge_count_);
    for (std::uint32_t from = 0; from < out_.size(); ++from)
        for (std::size_t i = 0; i < out_[from].size(); ++i)
            rows.push_back({node_to_id_[from], node_to_id_[out_[from][i]],
                            out_influential_[from][i] != 0});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write edges file: " + path.string());
    for (const auto& r : rows)
        out << r.from << '\t' << r.to << '\t' << (r.influential ? 1 : 0) << '\n';
    if (!out) throw IoError("failed writing edges file: " + path.string());
}

}  // namespace causalcite::graph
