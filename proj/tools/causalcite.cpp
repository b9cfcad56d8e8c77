// causalcite — counterfactual citation-impact indices over a paper corpus.
//
// Subcommands: ingest, pci, impact, eval {accuracy, award-corr,
// outliers}, export-distribution. Machine-readable JSON/TSV goes to
// stdout; human-readable notes go to stderr. Exit codes: 0 ok,
// 2 missing input, 3 format error, 4 contract violation, 5 internal.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalcite/config.hpp"
#include "causalcite/error.hpp"
#include "causalcite/evaluation.hpp"
#include "causalcite/indices.hpp"
#include "causalcite/serialize.hpp"
#include "causalcite/workspace.hpp"

namespace cc = causalcite;
using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

cc::workspace::Workspace open_with_notice(const cc::config::EngineConfig& cfg) {
    auto ws = cc::workspace::open(cfg);
    if (ws.fallback_embeddings)
        std::cerr << "note: no embedding store configured; using the deterministic "
                  << "fallback encoder (" << cfg.embedding_dims << " dims)\n";
    if (ws.embedding_report && !ws.embedding_report->unknown_ids.empty())
        std::cerr << "note: " << ws.embedding_report->unknown_ids.size()
                  << " embedding ids are absent from the corpus\n";
    return ws;
}

json ingest_report_json(const cc::workspace::Workspace& ws) {
    json j;
    j["schema"] = "causalcite/ingest-report/1";
    j["corpus"]["accepted"] = ws.corpus_report.accepted;
    j["corpus"]["rejected"] = ws.corpus_report.rejected;
    j["corpus"]["duplicates"] = ws.corpus_report.duplicates;
    j["corpus"]["rejections"] = json::array();
    for (const auto& r : ws.corpus_report.rejections)
        j["corpus"]["rejections"].push_back({{"line", r.line_number}, {"reason", r.reason}});
    j["edges"]["accepted"] = ws.edges_report.accepted;
    j["edges"]["rejected"] = ws.edges_report.rejected;
    j["edges"]["duplicates"] = ws.edges_report.duplicates;
    j["edges"]["rejections"] = json::array();
    for (const auto& r : ws.edges_report.rejections)
        j["edges"]["rejections"].push_back({{"line", r.line_number}, {"reason", r.reason}});
    if (ws.embedding_report) {
        j["embeddings"]["loaded"] = ws.embedding_report->loaded;
        j["embeddings"]["renormalized"] = ws.embedding_report->renormalized;
        j["embeddings"]["unknown_ids"] = ws.embedding_report->unknown_ids;
    } else {
        j["embeddings"] = nullptr;
    }
    j["fallback_embeddings"] = ws.fallback_embeddings;
    return j;
}

int cmd_ingest(const cc::config::EngineConfig& cfg, bool strict,
               const std::string& store_out) {
    auto ws = open_with_notice(cfg);
    if (strict) {
        if (!ws.corpus_report.rejections.empty()) {
            const auto& r = ws.corpus_report.rejections.front();
            throw cc::FormatError("strict ingest: corpus row " +
                                  std::to_string(r.line_number) + " rejected: " + r.reason);
        }
        if (!ws.edges_report.rejections.empty()) {
            const auto& r = ws.edges_report.rejections.front();
            throw cc::FormatError("strict ingest: edge row " +
                                  std::to_string(r.line_number) + " rejected: " + r.reason);
        }
    }
    if (!store_out.empty()) cc::workspace::save_store(*ws.corpus, *ws.graph, store_out);

    json j = ingest_report_json(ws);
    if (!store_out.empty()) j["store"] = store_out;
    j["config"] = cc::config::to_json(cfg);
    emit(j);
    return 0;
}

int cmd_pci(const cc::config::EngineConfig& cfg, const std::string& a,
            const std::string& b) {
    auto ws = open_with_notice(cfg);
    auto result = ws.engine->pci(a, b);
    json j = cc::serialize::to_json(result);
    j["config"] = cc::config::to_json(cfg);
    emit(j);
    return 0;
}

int cmd_impact(const cc::config::EngineConfig& cfg, const std::string& a, bool exact) {
    auto ws = open_with_notice(cfg);
    auto params = ws.sample_params();
    auto est = cc::indices::impact(*ws.engine, *ws.corpus, *ws.graph, a, params,
                                   cfg.effective_workers(), cfg.graph_influential_only,
                                   exact);
    json j = cc::serialize::to_json(est);
    j["config"] = cc::config::to_json(cfg);
    emit(j);
    return 0;
}

// Scores for one accuracy metric: overrides first, corpus/engine as the
// computed fallback. The workspace is opened only if actually needed.
std::vector<cc::eval::ScoredBatch> resolve_batches(
    const cc::config::EngineConfig& cfg, const std::vector<cc::eval::ReferenceBatch>& batches,
    const std::string& metric) {
    std::string override_key;
    bool override_only = false;
    if (metric == "pci" || metric == "citations") {
        override_key = metric;
    } else if (metric.rfind("column:", 0) == 0) {
        override_key = metric.substr(7);
        override_only = true;
        if (override_key.empty())
            throw cc::ContractError("metric column name must be non-empty");
    } else {
        throw cc::ContractError("unknown metric '" + metric +
                                "' (expected pci, citations, or column:NAME)");
    }

    std::optional<cc::workspace::Workspace> ws;
    auto lazy_ws = [&]() -> cc::workspace::Workspace& {
        if (!ws) ws = open_with_notice(cfg);
        return *ws;
    };

    std::vector<cc::eval::ScoredBatch> scored;
    scored.reserve(batches.size());
    for (const auto& batch : batches) {
        cc::eval::ScoredBatch sb;
        sb.pivot = batch.pivot;
        for (const auto& row : batch.rows) {
            double score = 0.0;
            if (auto it = row.score_overrides.find(override_key);
                it != row.score_overrides.end()) {
                score = it->second;
            } else if (override_only) {
                throw cc::FormatError("missing score override '" + override_key +
                                      "' for ref '" + row.id + "' at " +
                                      batch.source_location);
            } else if (metric == "citations") {
                score = static_cast<double>(lazy_ws().corpus->get(row.id).citation_count);
            } else {  // pci computed from the stores
                score = lazy_ws().engine->pci(row.id, batch.pivot).pci;
            }
            (row.label == cc::eval::RefLabel::Significant ? sb.sig_scores
                                                          : sb.nonsig_scores)
                .push_back(score);
        }
        scored.push_back(std::move(sb));
    }
    return scored;
}

int cmd_eval_accuracy(const cc::config::EngineConfig& cfg, const std::string& batches_path,
                      const std::string& metric, const std::string& mode_name) {
    cc::eval::AccuracyMode mode;
    if (mode_name == "pooled") mode = cc::eval::AccuracyMode::PooledRows;
    else if (mode_name == "batch-mean") mode = cc::eval::AccuracyMode::BatchMeans;
    else throw cc::ContractError("unknown accuracy mode '" + mode_name + "'");

    auto batches = cc::eval::load_batches(batches_path);
    auto scored = resolve_batches(cfg, batches, metric);
    auto report = cc::eval::dataset_accuracy(scored, mode);

    json j;
    j["schema"] = "causalcite/accuracy-report/1";
    j["metric"] = metric;
    j["mode"] = mode_name;
    j["accuracy"] = report.accuracy;
    j["batches_used"] = report.batches_used;
    j["rows_used"] = report.rows_used;
    j["skipped"] = json::array();
    for (const auto& [pivot, reason] : report.skipped)
        j["skipped"].push_back({{"pivot", pivot}, {"reason", reason}});
    j["config"] = cc::config::to_json(cfg);
    emit(j);
    return 0;
}

int cmd_eval_award(const cc::config::EngineConfig& cfg, const std::string& labels_path,
                   const std::string& scores_path) {
    auto labels = cc::eval::load_labels(labels_path);
    auto score_rows = cc::eval::load_scores(scores_path);
    std::map<std::string, double> by_id(score_rows.begin(), score_rows.end());

    std::vector<int> ls;
    std::vector<double> ss;
    ls.reserve(labels.size());
    ss.reserve(labels.size());
    for (const auto& [id, label] : labels) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw cc::FormatError("no score for labeled paper '" + id + "'");
        ls.push_back(label);
        ss.push_back(it->second);
    }
    double r = cc::eval::point_biserial(ls, ss);

    json j;
    j["schema"] = "causalcite/award-corr-report/1";
    j["r"] = r;
    j["n"] = ls.size();
    j["n_awarded"] = static_cast<std::size_t>(std::count(ls.begin(), ls.end(), 1));
    j["config"] = cc::config::to_json(cfg);
    emit(j);
    return 0;
}

void write_outlier_tsv(std::ostream& out, const cc::eval::OutlierReport& report) {
    out << "paper_id\tlog_tci\tlog_cit\tresidual\tcategory\n";
    for (const auto& row : report.rows)
        out << row.paper_id << '\t' << format_double(row.log_tci) << '\t'
            << format_double(row.log_cit) << '\t' << format_double(row.residual) << '\t'
            << cc::eval::to_string(row.category) << '\n';
}

int cmd_eval_outliers(const cc::config::EngineConfig& cfg, const std::string& points_path,
                      const std::string& report_path) {
    auto points = cc::eval::load_points(points_path);
    auto report = cc::eval::classify_outliers(points);

    std::map<std::string, std::size_t> counts;
    for (const auto& row : report.rows) ++counts[cc::eval::to_string(row.category)];

    json summary;
    summary["schema"] = "causalcite/outlier-report/1";
    summary["fit"]["slope"] = report.fit.slope;
    summary["fit"]["intercept"] = report.fit.intercept;
    summary["fit"]["rmse"] = report.fit.rmse;
    summary["fit"]["used"] = report.fit.used;
    summary["fit"]["dropped"] = report.fit.dropped;
    summary["fences"]["q1"] = report.q1;
    summary["fences"]["q3"] = report.q3;
    summary["fences"]["lower"] = report.lower_fence;
    summary["fences"]["upper"] = report.upper_fence;
    summary["categories"] = counts;
    summary["config"] = cc::config::to_json(cfg);

    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        if (!out) throw cc::IoError("cannot write report file: " + report_path);
        write_outlier_tsv(out, report);
        emit(summary);
    } else {
        write_outlier_tsv(std::cout, report);
        std::cerr << "fit: slope=" << format_double(report.fit.slope)
                  << " intercept=" << format_double(report.fit.intercept)
                  << " rmse=" << format_double(report.fit.rmse) << " over "
                  << report.fit.used << " points (" << report.fit.dropped
                  << " dropped)\n";
    }
    return 0;
}

int cmd_export_distribution(const cc::config::EngineConfig& cfg,
                            const std::string& papers_path) {
    std::ifstream probe(papers_path, std::ios::binary);
    if (!probe) throw cc::IoError("papers file not found: " + papers_path);
    std::string first_line;
    std::getline(probe, first_line);
    probe.close();

    struct Row {
        std::string id;
        std::int64_t citations = 0;
    };
    std::vector<Row> rows;

    auto first_content = first_line.find_first_not_of(" \t\r");
    if (first_content != std::string::npos && first_line[first_content] == '{') {
        // Self-contained JSONL in the corpus schema.
        cc::corpus::CorpusStore store;
        auto report = store.ingest_jsonl(papers_path);
        if (!report.rejections.empty()) {
            const auto& r = report.rejections.front();
            throw cc::FormatError("papers row " + std::to_string(r.line_number) +
                                  " rejected: " + r.reason);
        }
        for (const auto& id : store.all_ids())
            rows.push_back({id, store.get(id).citation_count});
    } else {
        // One paper_id per line, resolved against the configured corpus.
        auto ws = open_with_notice(cfg);
        std::ifstream in(papers_path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            auto end = line.find_last_not_of(" \t");
            std::string id = line.substr(start, end - start + 1);
            rows.push_back({id, ws.corpus->get(id).citation_count});
        }
    }
    if (rows.empty()) throw cc::FormatError("no papers in " + papers_path);

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.citations != b.citations) return a.citations > b.citations;
        return a.id < b.id;
    });

    std::cout << "rank\tpaper_id\tcitation_count\toutcome\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::cout << (i + 1) << '\t' << rows[i].id << '\t' << rows[i].citations << '\t'
                  << format_double(cc::textmatch::outcome(rows[i].citations)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal citation-impact indices (PCI / ACI / TCI) by "
                 "counterfactual synthesis over a citation corpus"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::size_t workers = 0;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "TOML-style config file");
    app.add_option("--set", sets, "config override, key=value (repeatable)")
        ->expected(1)
        ->allow_extra_args(false);
    auto* workers_opt =
        app.add_option("--workers", workers, "parallelism degree (0 = hardware)");
    auto* seed_opt = app.add_option("--seed", seed, "sampling RNG seed");

    auto* ingest = app.add_subcommand("ingest", "validate and report corpus + edges");
    ingest->fallthrough();
    bool strict = false;
    std::string store_out;
    ingest->add_flag("--strict", strict, "any rejected row is a fatal format error");
    ingest->add_option("--store", store_out, "also persist a store directory");

    auto* pci = app.add_subcommand("pci", "pairwise causal impact of a on follow-up b");
    pci->fallthrough();
    std::string pci_a, pci_b;
    pci->add_option("--a", pci_a, "treatment paper id")->required();
    pci->add_option("--b", pci_b, "follow-up paper id")->required();

    auto* impact = app.add_subcommand("impact", "ACI and TCI for a paper");
    impact->fallthrough();
    std::string impact_a;
    bool exact = false;
    impact->add_option("--a", impact_a, "paper id")->required();
    impact->add_flag("--exact", exact, "evaluate every follow-up (no sampling)");

    auto* eval = app.add_subcommand("eval", "evaluation harnesses");
    eval->fallthrough();
    eval->require_subcommand(1);

    auto* acc = eval->add_subcommand("accuracy", "reference-impact accuracy");
    acc->fallthrough();
    std::string batches_path, metric = "pci", acc_mode = "pooled";
    acc->add_option("--batches", batches_path, "reference-batch JSONL")->required();
    acc->add_option("--metric", metric, "pci | citations | column:NAME");
    acc->add_option("--mode", acc_mode, "pooled | batch-mean");

    auto* award = eval->add_subcommand("award-corr", "point-biserial award correlation");
    award->fallthrough();
    std::string labels_path, scores_path;
    award->add_option("--labels", labels_path, "award-label JSONL")->required();
    award->add_option("--scores", scores_path, "paper scores (TSV or JSONL)")->required();

    auto* outliers = eval->add_subcommand("outliers", "log-linear fit + IQR categories");
    outliers->fallthrough();
    std::string points_path, report_path;
    outliers->add_option("--points", points_path, "TSV paper_id, tci, citations")
        ->required();
    outliers->add_option("--report", report_path,
                         "write the TSV report here and print a JSON summary");

    auto* exportdist =
        app.add_subcommand("export-distribution", "rank/citation curve for plotting");
    exportdist->fallthrough();
    std::string papers_path;
    exportdist->add_option("--papers", papers_path, "corpus JSONL or id-per-line list")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems count as missing input
    }

    try {
        cc::config::EngineConfig cfg;
        if (!config_path.empty()) {
            cfg = cc::config::load_config(config_path);
        } else if (const char* env = std::getenv("CAUSALCITE_CONFIG");
                   env && *env != '\0') {
            cfg = cc::config::load_config(env);
        }
        for (const auto& assignment : sets) {
            auto eq = assignment.find('=');
            if (eq == std::string::npos)
                throw cc::ContractError("--set expects key=value, got '" + assignment +
                                        "'");
            cc::config::apply_assignment(cfg, assignment.substr(0, eq),
                                         assignment.substr(eq + 1));
        }
        if (workers_opt->count() > 0) cfg.workers = workers;
        if (seed_opt->count() > 0) cfg.sample_seed = seed;
        cfg.validate();

        if (app.got_subcommand(ingest)) return cmd_ingest(cfg, strict, store_out);
        if (app.got_subcommand(pci)) return cmd_pci(cfg, pci_a, pci_b);
        if (app.got_subcommand(impact)) return cmd_impact(cfg, impact_a, exact);
        if (app.got_subcommand(eval)) {
            if (eval->got_subcommand(acc))
                return cmd_eval_accuracy(cfg, batches_path, metric, acc_mode);
            if (eval->got_subcommand(award))
                return cmd_eval_award(cfg, labels_path, scores_path);
            if (eval->got_subcommand(outliers))
                return cmd_eval_outliers(cfg, points_path, report_path);
        }
        if (app.got_subcommand(exportdist))
            return cmd_export_distribution(cfg, papers_path);
        throw cc::InternalError("no subcommand dispatched");
    } catch (const cc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    }
}
