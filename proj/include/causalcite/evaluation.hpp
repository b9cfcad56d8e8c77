#pragma once
// The three evaluation harnesses: reference-impact accuracy,
// point-biserial award correlation, log-linear fit + IQR outliers.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace causalcite::eval {

// --- reference-impact accuracy ------------------------------------

enum class RefLabel { Significant, NonSignificant };

struct ReferenceRow {
    std::string id;
    RefLabel label = RefLabel::NonSignificant;
    std::map<std::string, double> score_overrides;  // metric name -> value
};

struct ReferenceBatch {
    std::string pivot;
    std::vector<ReferenceRow> rows;
    std::string source_location;  // "file:line" for error messages
};

// A batch with scores already resolved for one metric.
struct ScoredBatch {
    std::string pivot;
    std::vector<double> sig_scores;
    std::vector<double> nonsig_scores;
};

// Mean over non-significant rows of (significant scores strictly
// greater) / |Sig|. Requires both classes present.
double batch_accuracy(const ScoredBatch& batch);

enum class AccuracyMode { PooledRows, BatchMeans };

struct AccuracyReport {
    double accuracy = 0.0;
    std::size_t batches_used = 0;
    std::size_t rows_used = 0;  // non-significant rows contributing
    std::vector<std::pair<std::string, std::string>> skipped;  // pivot, reason
};

// Pools conformity over all non-significant rows by default; the
// batch-mean alternative averages per-batch accuracies instead.
AccuracyReport dataset_accuracy(const std::vector<ScoredBatch>& batches,
                                AccuracyMode mode = AccuracyMode::PooledRows);

// --- award correlation ---------------------------------------------

// r_pb = (M1 - M0) / s_pop * sqrt(p*q); labels are 0/1, both classes
// required, scores must vary.
double point_biserial(const std::vector<int>& labels, const std::vector<double>& scores);

// --- log-linear fit and outlier fences ------------------------------

struct PointRow {
    std::string paper_id;
    double tci = 0.0;
    double citations = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rmse = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;  // rows unusable in log space (tci or cit <= 0)
};

// OLS of log10(tci) on log10(citations) over rows with both positive.
LinearFit fit_log_linear(const std::vector<PointRow>& points);

enum class OutlierCategory { Overcited, Aligned, Undercited, NegativeImpact };

std::string to_string(OutlierCategory c);

struct OutlierRow {
    std::string paper_id;
    double log_tci = 0.0;
    double log_cit = 0.0;
    double residual = 0.0;
    OutlierCategory category = OutlierCategory::Aligned;
};

struct OutlierReport {
    LinearFit fit;
    double q1 = 0.0;
    double q3 = 0.0;
    double lower_fence = 0.0;  // Q1 - 1.5 IQR; residual strictly below -> overcited
    double upper_fence = 0.0;  // Q3 + 1.5 IQR; strictly above -> undercited
    std::vector<OutlierRow> rows;  // input order
};

OutlierReport classify_outliers(const std::vector<PointRow>& points);

// Type-7 (linear interpolation) quantile; values need not be sorted.
double quantile(std::vector<double> values, double p);

// --- file loaders ----------------------------------------------------

// JSON-lines {pivot, refs: [{id, label: "sig"|"nonsig", score_overrides?}]}
std::vector<ReferenceBatch> load_batches(const std::filesystem::path& path);

// JSON-lines {paper_id, label: 0|1}
std::vector<std::pair<std::string, int>> load_labels(const std::filesystem::path& path);

// TSV paper_id<TAB>score, or JSON-lines {paper_id, score}
std::vector<std::pair<std::string, double>> load_scores(const std::filesystem::path& path);

// TSV paper_id<TAB>tci<TAB>citations (header rows starting with '#' or
// 'paper_id' skipped)
std::vector<PointRow> load_points(const std::filesystem::path& path);

}  // namespace causalcite::eval
