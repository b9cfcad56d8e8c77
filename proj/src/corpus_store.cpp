#include "causalcite/corpus_store.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "causalcite/error.hpp"

namespace causalcite::corpus {
namespace {

using nlohmann::json;

// Empty string describes a valid record, otherwise the reason.
std::string validate(const PaperRecord& r) {
    if (r.paper_id.empty()) return "empty paper_id";
    if (r.year < kMinYear || r.year > kMaxYear)
        return "year out of range: " + std::to_string(r.year) + " not in [" +
               std::to_string(kMinYear) + ", " + std::to_string(kMaxYear) + "]";
    if (r.citation_count < 0) return "negative citation_count";
    if (r.influential_citation_count < 0)
        return "negative influential_citation_count";
    if (r.influential_citation_count > r.citation_count)
        return "influential_citation_count exceeds citation_count";
    return {};
}

// Parses one JSONL row into a record; returns reason string on failure.
std::string parse_row(const json& j, PaperRecord& out) {
    if (!j.is_object()) return "row is not a JSON object";

    auto need_string = [&](const char* key, std::string& dst) -> std::string {
        auto it = j.find(key);
        if (it == j.end()) return std::string("missing field '") + key + "'";
        if (!it->is_string()) return std::string("field '") + key + "' must be a string";
        dst = it->get<std::string>();
        return {};
    };
    auto need_int = [&](const char* key, std::int64_t& dst) -> std::string {
        auto it = j.find(key);
        if (it == j.end()) return std::string("missing field '") + key + "'";
        if (!it->is_number_integer())
            return std::string("field '") + key + "' must be an integer";
        dst = it->get<std::int64_t>();
        return {};
    };

    if (auto e = need_string("paper_id", out.paper_id); !e.empty()) return e;
    if (auto e = need_string("title", out.title); !e.empty()) return e;

    if (auto it = j.find("abstract"); it != j.end()) {
        if (it->is_null()) {
            out.abstract_text.clear();
        } else if (it->is_string()) {
            out.abstract_text = it->get<std::string>();
        } else {
            return "field 'abstract' must be a string or null";
        }
    }

    std::int64_t year = 0;
    if (auto e = need_int("year", year); !e.empty()) return e;
    out.year = static_cast<int>(year);

    if (auto e = need_int("citation_count", out.citation_count); !e.empty()) return e;

    if (auto it = j.find("influential_citation_count"); it != j.end()) {
        if (!it->is_number_integer())
            return "field 'influential_citation_count' must be an integer";
        out.influential_citation_count = it->get<std::int64_t>();
    } else {
        out.influential_citation_count = 0;
    }
    return validate(out);
}

}  // namespace

IngestReport CorpusStore::ingest_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    std::vector<std::pair<std::size_t, PaperRecord>> rows;
    std::vector<RejectedRow> rejections;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded()) {
            rejections.push_back({line_no, "malformed JSON"});
            continue;
        }
        PaperRecord rec;
        if (auto reason = parse_row(j, rec); !reason.empty()) {
            rejections.push_back({line_no, reason});
            continue;
        }
        rows.emplace_back(line_no, std::move(rec));
    }
    return ingest_parsed(std::move(rows), std::move(rejections));
}

IngestReport CorpusStore::ingest_records(const std::vector<PaperRecord>& records,
                                         std::size_t base_line) {
    std::vector<std::pair<std::size_t, PaperRecord>> rows;
    std::vector<RejectedRow> rejections;
    rows.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (auto reason = validate(records[i]); !reason.empty()) {
            rejections.push_back({base_line + i, reason});
            continue;
        }
        rows.emplace_back(base_line + i, records[i]);
    }
    return ingest_parsed(std::move(rows), std::move(rejections));
}

IngestReport CorpusStore::ingest_parsed(
    std::vector<std::pair<std::size_t, PaperRecord>>&& rows,
    std::vector<RejectedRow>&& pre_rejections) {
    IngestReport report;
    report.rejections = std::move(pre_rejections);

    // Conflict scan first so a failed ingest leaves the store untouched.
    std::unordered_map<std::string, std::size_t> batch_first;
    for (const auto& [line_no, rec] : rows) {
        std::size_t prior_line = 0;
        const PaperRecord* prior = nullptr;
        if (auto it = records_.find(rec.paper_id); it != records_.end()) {
            prior = &it->second;
            prior_line = first_seen_line_.at(rec.paper_id);
        } else if (auto bf = batch_first.find(rec.paper_id); bf != batch_first.end()) {
            prior_line = bf->second;
            for (const auto& [ln, r] : rows)
                if (ln == prior_line) { prior = &r; break; }
        } else {
            batch_first.emplace(rec.paper_id, line_no);
            continue;
        }
        if (!(*prior == rec))
            throw ConflictError("conflicting records for paper_id '" + rec.paper_id +
                                "': first seen at row " + std::to_string(prior_line) +
                                ", conflicting row " + std::to_string(line_no));
    }

    for (auto& [line_no, rec] : rows) {
        if (records_.contains(rec.paper_id)) {
            ++report.duplicates;  // byte-identical re-ingest is a no-op
            continue;
        }
        first_seen_line_[rec.paper_id] = line_no;
        by_year_[rec.year].push_back(rec.paper_id);
        records_.emplace(rec.paper_id, std::move(rec));
        ++report.accepted;
    }
    for (auto& [year, ids] : by_year_) std::sort(ids.begin(), ids.end());

    report.rejected = report.rejections.size();
    return report;
}

const PaperRecord* CorpusStore::find(std::string_view paper_id) const {
    auto it = records_.find(std::string(paper_id));
    return it == records_.end() ? nullptr : &it->second;
}

const PaperRecord& CorpusStore::get(std::string_view paper_id) const {
    if (const auto* rec = find(paper_id)) return *rec;
    throw NotFoundError("unknown paper_id '" + std::string(paper_id) + "'");
}

const std::vector<std::string>& CorpusStore::papers_in_year(int year) const {
    static const std::vector<std::string> kEmpty;
    auto it = by_year_.find(year);
    return it == by_year_.end() ? kEmpty : it->second;
}

std::vector<int> CorpusStore::years() const {
    std::vector<int> out;
    out.reserve(by_year_.size());
    for (const auto& [year, ids] : by_year_)
        if (!ids.empty()) out.push_back(year);
    return out;
}

std::vector<std::string> CorpusStore::all_ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& [id, rec] : records_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

void CorpusStore::export_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write corpus file: " + path.string());
    for (const auto& id : all_ids()) {
        const PaperRecord& r = records_.at(id);
        json j;
        j["paper_id"] = r.paper_id;
        j["title"] = r.title;
        if (!r.abstract_text.empty()) j["abstract"] = r.abstract_text;
        j["year"] = r.year;
        j["citation_count"] = r.citation_count;
        if (r.influential_citation_count > 0)
            j["influential_citation_count"] = r.influential_citation_count;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing corpus file: " + path.string());
}

}  // namespace causalcite::corpus
