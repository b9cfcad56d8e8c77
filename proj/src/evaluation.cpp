#include "causalcite/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>

#include "causalcite/error.hpp"

namespace causalcite::eval {
namespace {

using nlohmann::json;

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw ContractError(what + " must be finite");
}

}  // namespace

double batch_accuracy(const ScoredBatch& batch) {
    if (batch.sig_scores.empty())
        throw ContractError("batch '" + batch.pivot + "' has no significant rows");
    if (batch.nonsig_scores.empty())
        throw ContractError("batch '" + batch.pivot + "' has no non-significant rows");
    for (double s : batch.sig_scores) require_finite(s, "significant score");
    for (double s : batch.nonsig_scores) require_finite(s, "non-significant score");

    double total = 0.0;
    for (double ns : batch.nonsig_scores) {
        std::size_t n_lower = 0;  // sig rows the non-sig row stays strictly below
        for (double s : batch.sig_scores)
            if (s > ns) ++n_lower;
        total += static_cast<double>(n_lower) / static_cast<double>(batch.sig_scores.size());
    }
    return total / static_cast<double>(batch.nonsig_scores.size());
}

AccuracyReport dataset_accuracy(const std::vector<ScoredBatch>& batches,
                                AccuracyMode mode) {
    AccuracyReport report;
    double pooled = 0.0;       // sum of per-row conformities
    double batch_means = 0.0;  // sum of per-batch accuracies
    for (const auto& batch : batches) {
        if (batch.sig_scores.empty()) {
            report.skipped.emplace_back(batch.pivot, "no significant rows");
            continue;
        }
        if (batch.nonsig_scores.empty()) {
            report.skipped.emplace_back(batch.pivot, "no non-significant rows");
            continue;
        }
        double acc = batch_accuracy(batch);
        batch_means += acc;
        pooled += acc * static_cast<double>(batch.nonsig_scores.size());
        report.rows_used += batch.nonsig_scores.size();
        ++report.batches_used;
    }
    if (report.batches_used == 0)
        throw ContractError("no batch has both significant and non-significant rows");
    report.accuracy = mode == AccuracyMode::PooledRows
                          ? pooled / static_cast<double>(report.rows_used)
                          : batch_means / static_cast<double>(report.batches_used);
    return report;
}

double point_biserial(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size())
        throw ContractError("point_biserial: labels and scores differ in length");
    if (labels.size() < 2)
        throw ContractError("point_biserial: need at least 2 observations");

    double sum1 = 0.0, sum0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require_finite(scores[i], "score");
        if (labels[i] == 1) {
            sum1 += scores[i];
            ++n1;
        } else if (labels[i] == 0) {
            sum0 += scores[i];
            ++n0;
        } else {
            throw ContractError("point_biserial: labels must be 0 or 1");
        }
    }
    if (n1 == 0 || n0 == 0)
        throw ContractError("point_biserial: both classes must be present");

    double n = static_cast<double>(labels.size());
    double mean = (sum1 + sum0) / n;
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    var /= n;  // population variance
    if (var == 0.0) throw ContractError("point_biserial: scores have zero variance");

    double m1 = sum1 / static_cast<double>(n1);
    double m0 = sum0 / static_cast<double>(n0);
    double p = static_cast<double>(n1) / n;
    double q = static_cast<double>(n0) / n;
    return (m1 - m0) / std::sqrt(var) * std::sqrt(p * q);
}

LinearFit fit_log_linear(const std::vector<PointRow>& points) {
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    LinearFit fit;
    for (const auto& pt : points) {
        require_finite(pt.tci, "tci");
        require_finite(pt.citations, "citations");
        if (pt.tci <= 0.0 || pt.citations <= 0.0) {
            ++fit.dropped;
            continue;
        }
        xs.push_back(std::log10(pt.citations));
        ys.push_back(std::log10(pt.tci));
    }
    if (xs.size() < 2)
        throw ContractError("fit_log_linear: need at least 2 points with positive "
                            "tci and citations");

    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw ContractError("fit_log_linear: zero variance in log citations");

    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        sse += r * r;
    }
    fit.rmse = std::sqrt(sse / n);
    fit.used = xs.size();
    return fit;
}

std::string to_string(OutlierCategory c) {
    switch (c) {
        case OutlierCategory::Overcited: return "overcited";
        case OutlierCategory::Aligned: return "aligned";
        case OutlierCategory::Undercited: return "undercited";
        case OutlierCategory::NegativeImpact: return "negative-impact";
    }
    return "aligned";
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ContractError("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("quantile p must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    double h = p * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

OutlierReport classify_outliers(const std::vector<PointRow>& points) {
    OutlierReport report;
    report.fit = fit_log_linear(points);

    std::vector<double> residuals;
    residuals.reserve(points.size());
    std::vector<bool> usable(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        if (pt.tci <= 0.0 || pt.citations <= 0.0) continue;
        usable[i] = true;
        double lx = std::log10(pt.citations);
        double ly = std::log10(pt.tci);
        residuals.push_back(ly - (report.fit.slope * lx + report.fit.intercept));
    }

    report.q1 = quantile(residuals, 0.25);
    report.q3 = quantile(residuals, 0.75);
    double iqr = report.q3 - report.q1;
    report.lower_fence = report.q1 - 1.5 * iqr;
    report.upper_fence = report.q3 + 1.5 * iqr;

    report.rows.reserve(points.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        OutlierRow row;
        row.paper_id = pt.paper_id;
        if (!usable[i]) {
            // Unusable in log space; reported, never classified against
            // the fences.
            row.log_tci = std::numeric_limits<double>::quiet_NaN();
            row.log_cit = pt.citations > 0.0 ? std::log10(pt.citations)
                                             : std::numeric_limits<double>::quiet_NaN();
            row.residual = std::numeric_limits<double>::quiet_NaN();
            row.category = OutlierCategory::NegativeImpact;
        } else {
            row.log_tci = std::log10(pt.tci);
            row.log_cit = std::log10(pt.citations);
            row.residual = residuals[r++];
            if (row.residual < report.lower_fence)
                row.category = OutlierCategory::Overcited;
            else if (row.residual > report.upper_fence)
                row.category = OutlierCategory::Undercited;
            else
                row.category = OutlierCategory::Aligned;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- file loaders ----------------------------------------------------

namespace {

json parse_jsonl_line(const std::string& line, std::size_t line_no,
                      const std::filesystem::path& path) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw FormatError("malformed JSON at " + path.filename().string() + ":" +
                          std::to_string(line_no));
    return j;
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fn(line, line_no);
    }
}

}  // namespace

std::vector<ReferenceBatch> load_batches(const std::filesystem::path& path) {
    std::vector<ReferenceBatch> batches;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        json j = parse_jsonl_line(line, line_no, path);
        auto where = path.filename().string() + ":" + std::to_string(line_no);
        if (!j.is_object() || !j.contains("pivot") || !j["pivot"].is_string() ||
            !j.contains("refs") || !j["refs"].is_array())
            throw FormatError("batch row needs {pivot, refs[]} at " + where);

        ReferenceBatch batch;
        batch.pivot = j["pivot"].get<std::string>();
        batch.source_location = where;
        for (const auto& ref : j["refs"]) {
            if (!ref.is_object() || !ref.contains("id") || !ref["id"].is_string() ||
                !ref.contains("label") || !ref["label"].is_string())
                throw FormatError("ref needs {id, label} at " + where);
            ReferenceRow row;
            row.id = ref["id"].get<std::string>();
            auto label = ref["label"].get<std::string>();
            if (label == "sig")
                row.label = RefLabel::Significant;
            else if (label == "nonsig")
                row.label = RefLabel::NonSignificant;
            else
                throw FormatError("label must be \"sig\" or \"nonsig\" at " + where);
            if (auto it = ref.find("score_overrides"); it != ref.end()) {
                if (!it->is_object())
                    throw FormatError("score_overrides must be an object at " + where);
                for (const auto& [key, value] : it->items()) {
                    if (!value.is_number())
                        throw FormatError("score override '" + key +
                                          "' must be numeric at " + where);
                    row.score_overrides[key] = value.get<double>();
                }
            }
            batch.rows.push_back(std::move(row));
        }
        batches.push_back(std::move(batch));
    });
    if (batches.empty()) throw FormatError("no batches in " + path.string());
    return batches;
}

std::vector<std::pair<std::string, int>> load_labels(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, int>> labels;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        json j = parse_jsonl_line(line, line_no, path);
        auto where = path.filename().string() + ":" + std::to_string(line_no);
        if (!j.is_object() || !j.contains("paper_id") || !j["paper_id"].is_string() ||
            !j.contains("label") || !j["label"].is_number_integer())
            throw FormatError("label row needs {paper_id, label} at " + where);
        int label = j["label"].get<int>();
        if (label != 0 && label != 1)
            throw FormatError("label must be 0 or 1 at " + where);
        labels.emplace_back(j["paper_id"].get<std::string>(), label);
    });
    if (labels.empty()) throw FormatError("no labels in " + path.string());
    return labels;
}

std::vector<std::pair<std::string, double>> load_scores(
    const std::filesystem::path& path) {
    std::vector<std::pair<std::string, double>> scores;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        auto where = path.filename().string() + ":" + std::to_string(line_no);
        if (line.front() == '{') {
            json j = parse_jsonl_line(line, line_no, path);
            if (!j.is_object() || !j.contains("paper_id") || !j["paper_id"].is_string() ||
                !j.contains("score") || !j["score"].is_number())
                throw FormatError("score row needs {paper_id, score} at " + where);
            scores.emplace_back(j["paper_id"].get<std::string>(),
                                j["score"].get<double>());
            return;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("score row needs paper_id<TAB>score at " + where);
        std::string id = line.substr(0, tab);
        if (id == "paper_id" || id.front() == '#') return;  // header
        try {
            scores.emplace_back(id, std::stod(line.substr(tab + 1)));
        } catch (const std::exception&) {
            throw FormatError("bad score number at " + where);
        }
    });
    if (scores.empty()) throw FormatError("no scores in " + path.string());
    return scores;
}

std::vector<PointRow> load_points(const std::filesystem::path& path) {
    std::vector<PointRow> points;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        auto where = path.filename().string() + ":" + std::to_string(line_no);
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw FormatError("point row needs paper_id<TAB>tci<TAB>citations at " + where);
        std::string id = line.substr(0, t1);
        if (id == "paper_id" || id.front() == '#') return;  // header
        try {
            points.push_back({id, std::stod(line.substr(t1 + 1, t2 - t1 - 1)),
                              std::stod(line.substr(t2 + 1))});
        } catch (const std::exception&) {
            throw FormatError("bad numeric column at " + where);
        }
    });
    if (points.empty()) throw FormatError("no points in " + path.string());
    return points;
}

}  // namespace causalcite::eval
