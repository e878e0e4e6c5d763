#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cscore/analysis.hpp"
#include "cscore/dataset.hpp"
#include "cscore/estimator.hpp"
#include "cscore/trainer.hpp"

namespace cscore {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded uniform split; both halves are returned in ascending index order.
SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);

// Removing the lowest-ranked examples versus the same number of random ones.
// Both arms share per-(count, repeat) model-init seeds, making the comparison
// paired; accuracies are means over the repeats on the held-out test split.
struct RemovalPoint {
    std::size_t removed = 0;
    double ranked_accuracy = 0.0;
    double random_accuracy = 0.0;
    bool ranked_degenerate = false;  // removal emptied some class
    bool random_degenerate = false;
};

std::vector<RemovalPoint> removal_experiment(const Dataset& dataset, const ScoreTable& ranking,
                                             std::span<const std::size_t> removal_counts,
                                             const TrainerConfig& config, std::size_t repeats,
                                             std::uint64_t seed, double test_fraction = 0.2,
                                             unsigned jobs = 0);

// Value-range bins subsampled to a common size, then one training run on the
// union with per-bin learning curves.
struct EqualizedGroupResult {
    BinAssignment bins;
    std::vector<std::size_t> group_sizes;   // after subsampling
    std::vector<std::uint8_t> truncated;    // bin had fewer members than group_size
    std::vector<std::size_t> train_indices; // the union, ascending
    BinnedCurves curves;
};

EqualizedGroupResult equalized_group_experiment(const Dataset& dataset, const ScoreTable& scores,
                                                std::size_t bin_count, std::size_t group_size,
                                                const TrainerConfig& config, std::uint64_t seed);

// Trains on the full dataset with the given optimizer setup and returns the
// per-bin learning curves; used to compare optimizers on the same binning.
BinnedCurves optimizer_curves(const Dataset& dataset, const BinAssignment& bins,
                              const TrainerConfig& config, std::uint64_t seed);

}  // namespace cscore
