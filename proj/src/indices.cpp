#include "causalcite/indices.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "causalcite/citation_graph.hpp"
#include "causalcite/corpus_store.hpp"
#include "causalcite/error.hpp"

namespace causalcite::indices {
namespace {

// Bounded draw via threshold rejection on mt19937_64 — unlike
// std::uniform_int_distribution, identical across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t threshold = (~std::uint64_t{0} - n + 1) % n;  // 2^64 mod n
    while (true) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

void fisher_yates(std::vector<std::string>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[bounded(rng, i)]);
}

// Type-7 quantile (linear interpolation) over ascending values.
double quantile7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ContractError("quantile of empty sample");
    if (sorted.size() == 1) return sorted.front();
    double h = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> bin_edges(const std::vector<double>& values, std::size_t bin_count,
                              BinMode mode) {
    auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo = *min_it, hi = *max_it;
    if (lo == hi) return {lo, hi};  // zero-width range collapses to one bin

    std::vector<double> edges;
    if (mode == BinMode::EqualWidth) {
        edges.reserve(bin_count + 1);
        for (std::size_t i = 0; i <= bin_count; ++i)
            edges.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(bin_count));
    } else {
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        edges.push_back(lo);
        for (std::size_t i = 1; i < bin_count; ++i) {
            double q = quantile7(sorted, static_cast<double>(i) /
                                             static_cast<double>(bin_count));
            if (q > edges.back()) edges.push_back(q);  // collapse duplicate edges
        }
        if (hi > edges.back()) edges.push_back(hi);
        else edges.back() = hi;
    }
    edges.front() = lo;
    edges.back() = hi;
    return edges;
}

std::size_t bin_of(double value, const std::vector<double>& edges) {
    // Half-open bins [e_i, e_{i+1}), last bin closed at the top.
    std::size_t bins = edges.size() - 1;
    if (bins == 1) return 0;
    auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, value);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

// Largest-remainder proportional quotas summing to target, honoring a
// floor of 1 for non-empty bins when target allows it.
std::vector<std::size_t> allocate_quotas(const std::vector<std::size_t>& sizes,
                                         std::size_t total, std::size_t target) {
    std::size_t bins = sizes.size();
    std::vector<std::size_t> quota(bins, 0);
    std::vector<double> remainder(bins, 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < bins; ++i) {
        if (sizes[i] == 0) continue;
        double share = static_cast<double>(target) * static_cast<double>(sizes[i]) /
                       static_cast<double>(total);
        quota[i] = static_cast<std::size_t>(std::floor(share));
        remainder[i] = share - std::floor(share);
        assigned += quota[i];
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < bins; ++i)
        if (sizes[i] > 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];  // ties keep ascending bin index
    });
    for (std::size_t idx = 0; assigned < target; idx = (idx + 1) % order.size()) {
        std::size_t i = order[idx];
        if (quota[i] < sizes[i]) {
            ++quota[i];
            ++assigned;
        }
    }

    // Floor of 1 per non-empty bin so every stratum is represented.
    std::size_t non_empty = order.size();
    if (target >= non_empty) {
        for (std::size_t i : order) {
            if (quota[i] > 0) continue;
            // Take one from the fullest bin that can spare it.
            std::size_t donor = bins;
            for (std::size_t j : order)
                if (quota[j] >= 2 && (donor == bins || quota[j] > quota[donor]))
                    donor = j;
            if (donor == bins) break;
            --quota[donor];
            quota[i] = 1;
        }
    }
    return quota;
}

}  // namespace

void SampleParams::validate() const {
    if (n == 0) throw ContractError("sample.n must be >= 1");
    if (bin_count == 0) throw ContractError("sample.bins must be >= 1");
}

SamplePlan plan_sample(const std::string& paper_a,
                       const std::vector<std::pair<std::string, double>>& children,
                       const SampleParams& params) {
    params.validate();
    if (children.empty())
        throw ContractError("paper has no follow-up studies: '" + paper_a + "'");
    for (const auto& [id, value] : children)
        if (!std::isfinite(value))
            throw ContractError("non-finite binning value for child '" + id + "'");

    std::vector<double> values;
    values.reserve(children.size());
    for (const auto& [id, value] : children) values.push_back(value);
    auto edges = bin_edges(values, params.bin_count, params.bin_mode);

    SamplePlan plan;
    plan.paper_a = paper_a;
    plan.children_count = children.size();
    plan.seed = params.seed;
    plan.n_requested = params.n;
    plan.bins.resize(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        plan.bins[i].lower = edges[i];
        plan.bins[i].upper = edges[i + 1];
    }

    // Members in ascending id order: input order must not leak into the
    // plan, or determinism would hinge on caller behavior.
    std::vector<std::pair<std::string, double>> sorted_children = children;
    std::sort(sorted_children.begin(), sorted_children.end());
    for (const auto& [id, value] : sorted_children)
        plan.bins[bin_of(value, edges)].member_ids.push_back(id);

    std::size_t target = std::min(params.n, children.size());
    std::vector<std::size_t> sizes;
    sizes.reserve(plan.bins.size());
    for (const auto& bin : plan.bins) sizes.push_back(bin.member_ids.size());
    auto quotas = allocate_quotas(sizes, children.size(), target);

    std::mt19937_64 rng(params.seed);
    for (std::size_t i = 0; i < plan.bins.size(); ++i) {
        auto& bin = plan.bins[i];
        bin.quota = quotas[i];
        bin.draw_order = bin.member_ids;
        fisher_yates(bin.draw_order, rng);
        for (std::size_t j = 0; j < bin.quota; ++j)
            plan.sampled_ids.push_back(bin.draw_order[j]);
    }
    return plan;
}

namespace {

// Runs jobs[0..n) across `workers` threads; results land by index, so
// completion order never matters.
void run_parallel(std::size_t job_count, std::size_t workers,
                  const std::function<void(std::size_t)>& job) {
    if (workers <= 1 || job_count <= 1) {
        for (std::size_t i = 0; i < job_count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= job_count) return;
            job(i);
        }
    };
    std::vector<std::thread> threads;
    std::size_t spawn = std::min(workers, job_count);
    threads.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

struct Job {
    std::string b_id;
    std::size_t bin = 0;
    std::size_t draw_pos = 0;  // position in the bin's draw_order
};

struct JobResult {
    bool ok = false;
    std::string reason;
    textmatch::PciResult result;
};

void run_wave(const std::vector<Job>& jobs, const PciFn& pci_fn, std::size_t workers,
              std::vector<JobResult>& out) {
    out.assign(jobs.size(), {});
    run_parallel(jobs.size(), workers, [&](std::size_t i) {
        try {
            out[i].result = pci_fn(jobs[i].b_id);
            out[i].ok = true;
        } catch (const Error& e) {
            out[i].reason = e.what();
        }
    });
}

}  // namespace

ImpactEstimate estimate_impact(const std::string& paper_a,
                               const std::vector<std::pair<std::string, double>>& children,
                               const SampleParams& params, const PciFn& pci_fn,
                               std::size_t workers) {
    ImpactEstimate est;
    est.paper_a = paper_a;
    est.children_count = children.size();
    est.plan = plan_sample(paper_a, children, params);

    // Per-bin cursors into draw_order: [0, quota) is the first wave,
    // failures advance the cursor to pull backfill candidates.
    struct BinState {
        std::size_t cursor = 0;  // next unused draw_order position
        std::vector<std::pair<std::size_t, SampleOutcome>> done;  // (draw_pos, outcome)
    };
    std::vector<BinState> state(est.plan.bins.size());
    std::vector<Job> wave;
    for (std::size_t i = 0; i < est.plan.bins.size(); ++i) {
        const auto& bin = est.plan.bins[i];
        for (std::size_t j = 0; j < bin.quota; ++j) wave.push_back({bin.draw_order[j], i, j});
        state[i].cursor = bin.quota;
    }

    bool first_wave = true;
    std::vector<JobResult> results;
    while (!wave.empty()) {
        run_wave(wave, pci_fn, workers, results);
        std::vector<Job> next_wave;
        for (std::size_t i = 0; i < wave.size(); ++i) {
            auto& bs = state[wave[i].bin];
            if (results[i].ok) {
                bs.done.emplace_back(
                    wave[i].draw_pos,
                    SampleOutcome{wave[i].b_id, wave[i].bin, !first_wave,
                                  std::move(results[i].result)});
            } else {
                est.failed.push_back({wave[i].b_id, wave[i].bin,
                                      std::move(results[i].reason)});
                const auto& order = est.plan.bins[wave[i].bin].draw_order;
                if (bs.cursor < order.size()) {
                    next_wave.push_back({order[bs.cursor], wave[i].bin, bs.cursor});
                    ++bs.cursor;
                }
                // else: bin exhausted; its quota shrinks and the bin mean
                // runs over whatever succeeded.
            }
        }
        wave = std::move(next_wave);
        first_wave = false;
    }

    // Deterministic aggregation in plan order (bin index, then draw
    // order within the bin).
    double aci = 0.0;
    const double total = static_cast<double>(est.children_count);
    double covered_weight = 0.0;  // for renormalization when a bin dies
    double plain_sum = 0.0;
    std::size_t plain_count = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        auto& bs = state[i];
        std::sort(bs.done.begin(), bs.done.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        if (!bs.done.empty()) {
            double bin_sum = 0.0;
            for (const auto& [pos, s] : bs.done) bin_sum += s.result.pci;
            double bin_mean = bin_sum / static_cast<double>(bs.done.size());
            double weight = static_cast<double>(est.plan.bins[i].member_ids.size()) / total;
            aci += weight * bin_mean;
            covered_weight += weight;
            plain_sum += bin_sum;
            plain_count += bs.done.size();
        }
        for (auto& [pos, s] : bs.done) est.per_sample.push_back(std::move(s));
    }
    if (est.per_sample.empty())
        throw ContractError("no sample produced a PCI for paper '" + paper_a + "'");

    if (params.estimator == Estimator::Plain) {
        aci = plain_sum / static_cast<double>(plain_count);
    } else if (covered_weight < 1.0 - 1e-12 && covered_weight > 0.0) {
        // A bin lost all its samples: renormalize over live bins so ACI
        // stays a weighted mean rather than shrinking toward zero.
        aci /= covered_weight;
    }
    est.aci = aci;
    est.tci = est.aci * static_cast<double>(est.children_count);
    return est;
}

ImpactEstimate impact(const textmatch::TextMatchEngine& engine,
                      const corpus::CorpusStore& store, const graph::CitationGraph& graph,
                      const std::string& paper_a, const SampleParams& params,
                      std::size_t workers, bool influential_only, bool exact) {
    auto child_ids = graph.children(paper_a, influential_only);
    if (child_ids.empty())
        throw ContractError("paper has no follow-up studies: '" + paper_a + "'");

    std::vector<std::pair<std::string, double>> children;
    children.reserve(child_ids.size());
    for (auto& id : child_ids) {
        const auto& rec = store.get(id);
        double value = params.bin_domain == BinDomain::RawCitations
                           ? static_cast<double>(rec.citation_count)
                           : textmatch::outcome(rec.citation_count);
        children.emplace_back(std::move(id), value);
    }

    SampleParams effective = params;
    if (exact) effective.n = std::max<std::size_t>(children.size(), 1);
    return estimate_impact(paper_a, children, effective,
                           [&](const std::string& b_id) { return engine.pci(paper_a, b_id); },
                           workers);
}

}  // namespace causalcite::indices
