#pragma once
// Paper metadata store: ingest, validation, year partitions, export.
//
// Single-writer during ingest; immutable afterwards and safe for any
// number of concurrent readers.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace causalcite::corpus {

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract_text;  // may be empty; such papers match on title only
    int year = 0;
    std::int64_t citation_count = 0;
    std::int64_t influential_citation_count = 0;

    bool operator==(const PaperRecord&) const = default;
};

constexpr int kMinYear = 1000;
constexpr int kMaxYear = 3000;

struct RejectedRow {
    std::size_t line_number = 0;  // 1-based
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t duplicates = 0;  // identical re-ingested rows
    std::vector<RejectedRow> rejections;
};

class CorpusStore {
public:
    // JSON-lines, one object per paper. Invalid rows are rejected and
    // reported; a duplicate paper_id with conflicting fields aborts with
    // a ConflictError naming both rows.
    IngestReport ingest_jsonl(const std::filesystem::path& path);

    // In-memory ingest path (tests, synthetic corpora). Row numbers are
    // base_line + index.
    IngestReport ingest_records(const std::vector<PaperRecord>& records,
                                std::size_t base_line = 1);

    const PaperRecord* find(std::string_view paper_id) const;
    const PaperRecord& get(std::string_view paper_id) const;  // throws NotFoundError

    // Ids whose record year equals `year`, ascending byte order. Empty
    // for unrepresented years.
    const std::vector<std::string>& papers_in_year(int year) const;

    std::vector<int> years() const;  // ascending
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    // All ids, ascending byte order.
    std::vector<std::string> all_ids() const;

    // Same JSON-lines schema as ingest, records sorted by paper_id byte order.
    void export_jsonl(const std::filesystem::path& path) const;

private:
    IngestReport ingest_parsed(std::vector<std::pair<std::size_t, PaperRecord>>&& rows,
                               std::vector<RejectedRow>&& pre_rejections);

    std::unordered_map<std::string, PaperRecord> records_;
    std::unordered_map<std::string, std::size_t> first_seen_line_;
    std::map<int, std::vector<std::string>> by_year_;
};

}  // namespace causalcite::corpus
