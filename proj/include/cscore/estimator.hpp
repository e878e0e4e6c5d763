#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cscore/dataset.hpp"
#include "cscore/mat.hpp"
#include "cscore/trainer.hpp"

namespace cscore {

// Row i marks the training subset of run i: included.at(i, j) == 1 iff
// example j was trained on. Every row holds exactly subset_size ones.
struct MaskMatrix {
    std::size_t runs = 0;
    std::size_t examples = 0;
    std::size_t subset_size = 0;
    Mat<std::uint8_t> included;

    void validate() const;
};

// loss.at(i, j) == 1 iff run i misclassified example j. Rows cover all N
// examples, including those the run trained on; only held-out entries feed
// scores, but full rows keep the runs reusable for diagnostics.
struct LossMatrix {
    std::size_t runs = 0;
    std::size_t examples = 0;
    Mat<std::uint8_t> miss;
};

// All runs for one subset ratio.
struct RunBatch {
    double ratio = 0.0;
    MaskMatrix mask;
    LossMatrix loss;
    std::vector<std::uint64_t> run_seeds;
    std::string config_digest;
};

// Per-example holdout scores across subset ratios. NaN marks entries where an
// example was never held out.
struct ConsistencyProfile {
    std::vector<double> ratios;  // ascending
    MatD scores;                 // ratios x examples
};

struct ScoreProvenance {
    std::vector<double> ratios;
    std::size_t runs_per_ratio = 0;
    std::uint64_t master_seed = 0;
    std::string config_digest;
};

// The exportable artifact: one score per example, dataset order.
struct ScoreTable {
    std::vector<double> scores;  // in [0,1] or NaN
    std::vector<int> labels;
    ScoreProvenance provenance;

    std::size_t size() const { return scores.size(); }
};

// k uniform subsets of the given size, sampled without replacement within a
// row. Row seeds are derived per run index, so extending k never changes
// earlier rows.
MaskMatrix sample_subsets(std::size_t n_examples, std::size_t subset_size, std::size_t runs,
                          std::uint64_t seed);

// Trains one fresh model per sampled subset and records its 0-1 loss on all
// examples. Runs are independent and executed on a worker pool; results are
// deterministic in the seed regardless of the worker count.
RunBatch run_holdout(const Dataset& dataset, double ratio, std::size_t runs,
                     const TrainerConfig& config, std::uint64_t seed, unsigned jobs = 0);

// Algorithm core: score[j] = #(held out and correct) / #(held out), NaN when
// example j was never held out.
std::vector<double> aggregate_scores(const MaskMatrix& mask, const LossMatrix& loss);

// Stacks per-ratio score rows, sorted by ascending ratio.
ConsistencyProfile build_profile(std::span<const RunBatch> batches);

// Mean over the defined per-ratio entries of each example.
ScoreTable integral_cscore(const ConsistencyProfile& profile, std::span<const int> labels,
                           ScoreProvenance provenance = {});

// Spearman correlation of each profile row against the reference scores.
// A point is NaN when fewer than 3 examples are jointly defined (or the
// correlation is otherwise undefined, e.g. a constant row).
struct PointEstimatePoint {
    double ratio = 0.0;
    double rho = 0.0;
};
std::vector<PointEstimatePoint> point_estimate_curve(const ConsistencyProfile& profile,
                                                     const ScoreTable& reference);

// For each m: sample m runs (without replacement) from the batch `repeats`
// times, aggregate, and correlate against the reference scores. The reference
// must come from runs disjoint from the batch.
struct SensitivityPoint {
    std::size_t models = 0;
    double mean_rho = 0.0;
    double std_rho = 0.0;  // population SD over the repeats
};
std::vector<SensitivityPoint> sensitivity_curve(const RunBatch& batch,
                                                std::span<const std::size_t> m_list,
                                                std::size_t repeats,
                                                std::span<const double> reference_scores,
                                                std::uint64_t seed);

// Score CSV: index,label,score with undefined scores as empty fields.
void export_scores(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable import_scores(const std::filesystem::path& path);

// Batch archive: mask.csv / loss.csv (header row of example indices) plus
// meta.json with ratio, run count, seeds and the trainer config digest.
void save_run_batch(const RunBatch& batch, const std::filesystem::path& dir);
RunBatch load_run_batch(const std::filesystem::path& dir);

// Profile CSV: header "ratio,0,1,...", one row per ratio, undefined entries
// as empty fields.
void save_profile_csv(const ConsistencyProfile& profile, const std::filesystem::path& path);
ConsistencyProfile load_profile_csv(const std::filesystem::path& path);

RunBatch select_runs(const RunBatch& batch, std::span<const std::size_t> rows);

}  // namespace cscore
