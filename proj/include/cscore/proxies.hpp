#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cscore/dataset.hpp"
#include "cscore/mat.hpp"
#include "cscore/model.hpp"
#include "cscore/trainer.hpp"

namespace cscore {

enum class FeatureSpace { input, hidden };

// Points to score: raw dataset features or penultimate-layer representations.
struct PointSet {
    MatD points;  // N x d
    std::vector<int> labels;
    FeatureSpace space = FeatureSpace::input;

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

PointSet input_point_set(const Dataset& dataset);
PointSet hidden_point_set(const Model& model, const Dataset& dataset);

enum class ProxyKind {
    kernel_density,        // label-blind local density
    kernel_same_class,     // same-class local density
    kernel_signed,         // same-class minus other-class local density
    lof,                   // negated local outlier factor
    cumulative_accuracy,
    cumulative_true_class_prob,
    cumulative_max_prob,
    cumulative_entropy,    // negated
    forgetting,            // negated forgetting-event count
};

// Wire names used in score CSVs.
std::string proxy_kind_name(ProxyKind kind);
ProxyKind proxy_kind_from_name(const std::string& name);

// A per-example proxy score vector. Values are stored so that a higher value
// always means "more consistent": statistics whose raw direction points the
// other way (entropy, forgetting counts) are multiplied by orientation = -1
// on ingestion.
struct ProxyScores {
    ProxyKind kind = ProxyKind::kernel_density;
    std::vector<std::size_t> indices;  // dataset example indices
    std::vector<double> values;        // oriented, same length as indices
    int orientation = +1;              // multiplier applied to the raw statistic
};

// --- pairwise-distance proxies -------------------------------------------

// Half the mean pairwise Euclidean distance. For more than sample_cap points
// the mean is estimated on a seeded uniform sample of sample_cap points.
// Throws if the points are all identical (degenerate kernel).
double rbf_bandwidth(const MatD& points, std::size_t sample_cap = 2000,
                     std::uint64_t seed = 0x5cba9d);

struct KernelScores {
    std::vector<double> density;      // (1/N) sum_i K(x_i, x)
    std::vector<double> same_class;   // same-class terms only
    std::vector<double> signed_diff;  // same-class minus other-class weighting
};

// RBF kernel K(x,x') = exp(-|x-x'|^2 / h^2); sums include the self term.
// The three scores are accumulated independently (signed_diff is not derived
// from the other two).
KernelScores kernel_scores(const PointSet& points, double bandwidth, unsigned jobs = 0);

// Negated LOF with k-distance neighborhoods expanded across ties. Duplicate
// stacks follow the documented convention: a zero reachability sum gives an
// infinite local reachability density, and the LOF of such a point is 1.
std::vector<double> lof_scores(const MatD& points, std::size_t k_neighbors = 3);

// --- learning-speed proxies ----------------------------------------------

// Mean of the chosen per-epoch statistic over epochs 1..up_to_epoch
// (up_to_epoch = 0 means the full trace). kind must be one of the
// cumulative_* statistics.
ProxyScores learning_speed_scores(const TrainingTrace& trace, ProxyKind kind,
                                  std::size_t up_to_epoch = 0);

// Count of learned -> forgotten transitions per example, negated. An example
// that is never learned has zero forgetting events, indistinguishable by this
// count from one that is never forgotten.
ProxyScores forgetting_counts(const TrainingTrace& trace);

ProxyScores kernel_proxy(ProxyKind kind, const KernelScores& scores, std::size_t n_examples);
ProxyScores lof_proxy(const std::vector<double>& negated_lof);

// Proxy score CSV: index,kind,score,orientation.
void save_proxy_csv(const ProxyScores& proxy, const std::filesystem::path& path);
ProxyScores load_proxy_csv(const std::filesystem::path& path);

}  // namespace cscore
