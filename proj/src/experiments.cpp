#include "cscore/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cscore/error.hpp"
#include "cscore/rng.hpp"
#include "cscore/score.hpp"
#include "cscore/thread_pool.hpp"

namespace cscore {

SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ValidationError("test_fraction must be in (0, 1)");
    const auto test_size =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (test_size == 0 || test_size >= n)
        throw ValidationError("test split would be empty or the whole dataset");

    Rng rng(seed);
    auto test = rng.sample_without_replacement(n, test_size);
    std::sort(test.begin(), test.end());

    SplitIndices split;
    split.test = std::move(test);
    std::size_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (t < split.test.size() && split.test[t] == i)
            ++t;
        else
            split.train.push_back(i);
    }
    return split;
}

namespace {

// ranking positions of `eligible`, least consistent first, ties by index;
// undefined scores rank lowest of all
std::vector<std::size_t> ascending_by_score(const ScoreTable& ranking,
                                            std::span<const std::size_t> eligible) {
    std::vector<std::size_t> order(eligible.begin(), eligible.end());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = ranking.scores[a];
        const double sb = ranking.scores[b];
        const bool da = score_defined(sa);
        const bool db = score_defined(sb);
        if (da != db) return !da;
        if (da && sa != sb) return sa < sb;
        return a < b;
    });
    return order;
}

bool leaves_class_empty(const Dataset& dataset, std::span<const std::size_t> kept) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(dataset.num_classes), 0);
    for (std::size_t i : kept) ++counts[static_cast<std::size_t>(dataset.labels[i])];
    return std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; });
}

double test_accuracy(const Model& model, const Dataset& dataset,
                     std::span<const std::size_t> test_indices) {
    MatF features(test_indices.size(), dataset.dim());
    for (std::size_t i = 0; i < test_indices.size(); ++i) {
        auto src = dataset.features.row(test_indices[i]);
        std::copy(src.begin(), src.end(), features.row(i).begin());
    }
    const Prediction pred = predict(model, features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_indices.size(); ++i)
        if (pred.labels[i] == dataset.labels[test_indices[i]]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test_indices.size());
}

}  // namespace

std::vector<RemovalPoint> removal_experiment(const Dataset& dataset, const ScoreTable& ranking,
                                             std::span<const std::size_t> removal_counts,
                                             const TrainerConfig& config, std::size_t repeats,
                                             std::uint64_t seed, double test_fraction,
                                             unsigned jobs) {
    dataset.validate();
    if (ranking.size() != dataset.size())
        throw ValidationError("ranking does not cover the dataset");
    if (repeats == 0) throw ValidationError("repeats must be >= 1");

    const SplitIndices split =
        train_test_split(dataset.size(), test_fraction, derive_seed(seed, "split", 0));
    const auto ranked_order = ascending_by_score(ranking, split.train);
    for (std::size_t count : removal_counts)
        if (count >= split.train.size())
            throw ValidationError("removal count " + std::to_string(count) +
                                  " leaves no training data");

    const ArchSpec arch = resolved_arch(config, dataset);

    struct Task {
        std::size_t point;
        std::size_t repeat;
        bool random_arm;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < removal_counts.size(); ++p)
        for (std::size_t r = 0; r < repeats; ++r)
            for (bool random_arm : {false, true}) tasks.push_back({p, r, random_arm});

    MatD accuracy(removal_counts.size(), 2 * repeats, 0.0);
    std::vector<std::uint8_t> degenerate(removal_counts.size() * 2, 0);

    parallel_for(tasks.size(), jobs, [&](std::size_t t) {
        const Task& task = tasks[t];
        const std::size_t count = removal_counts[task.point];

        std::vector<std::size_t> kept;
        if (task.random_arm) {
            Rng rng(derive_seed(seed, "random-removal", task.point * 1000003 + task.repeat));
            auto removed = rng.sample_without_replacement(split.train.size(), count);
            std::vector<std::uint8_t> drop(split.train.size(), 0);
            for (std::size_t r : removed) drop[r] = 1;
            for (std::size_t i = 0; i < split.train.size(); ++i)
                if (!drop[i]) kept.push_back(split.train[i]);
        } else {
            kept.assign(ranked_order.begin() + static_cast<std::ptrdiff_t>(count),
                        ranked_order.end());
            std::sort(kept.begin(), kept.end());
        }

        if (leaves_class_empty(dataset, kept))
            degenerate[task.point * 2 + (task.random_arm ? 1 : 0)] = 1;

        // paired across arms: same init / shuffle seeds per (point, repeat)
        const std::uint64_t pair_seed =
            derive_seed(seed, "removal-model", task.point * 1000003 + task.repeat);
        OptimizerConfig optimizer = config.optimizer;
        optimizer.seed = derive_seed(pair_seed, "train", 0);
        const Model initial = init_model(arch, derive_seed(pair_seed, "init", 0));
        const TrainResult trained =
            train(initial, dataset, kept, optimizer, config.schedule, {});

        accuracy.at(task.point, task.repeat * 2 + (task.random_arm ? 1 : 0)) =
            test_accuracy(trained.model, dataset, split.test);
    });

    std::vector<RemovalPoint> points;
    for (std::size_t p = 0; p < removal_counts.size(); ++p) {
        RemovalPoint point;
        point.removed = removal_counts[p];
        for (std::size_t r = 0; r < repeats; ++r) {
            point.ranked_accuracy += accuracy.at(p, r * 2);
            point.random_accuracy += accuracy.at(p, r * 2 + 1);
        }
        point.ranked_accuracy /= static_cast<double>(repeats);
        point.random_accuracy /= static_cast<double>(repeats);
        point.ranked_degenerate = degenerate[p * 2] != 0;
        point.random_degenerate = degenerate[p * 2 + 1] != 0;
        points.push_back(point);
    }
    return points;
}

EqualizedGroupResult equalized_group_experiment(const Dataset& dataset, const ScoreTable& scores,
                                                std::size_t bin_count, std::size_t group_size,
                                                const TrainerConfig& config, std::uint64_t seed) {
    dataset.validate();
    if (scores.size() != dataset.size())
        throw ValidationError("scores do not cover the dataset");
    if (group_size == 0) throw ValidationError("group_size must be >= 1");

    EqualizedGroupResult result;
    result.bins = bin_by_score(scores, bin_count, BinScheme::value_range);

    std::vector<std::vector<std::size_t>> members(bin_count);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (result.bins.bins[i] >= 0)
            members[static_cast<std::size_t>(result.bins.bins[i])].push_back(i);

    result.group_sizes.assign(bin_count, 0);
    result.truncated.assign(bin_count, 0);
    for (std::size_t b = 0; b < bin_count; ++b) {
        if (members[b].empty()) continue;
        std::size_t take = group_size;
        if (members[b].size() < group_size) {
            take = members[b].size();
            result.truncated[b] = 1;
        }
        Rng rng(derive_seed(seed, "equalize", b));
        auto picks = rng.sample_without_replacement(members[b].size(), take);
        for (std::size_t p : picks) result.train_indices.push_back(members[b][p]);
        result.group_sizes[b] = take;
    }
    std::sort(result.train_indices.begin(), result.train_indices.end());

    const ArchSpec arch = resolved_arch(config, dataset);
    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = derive_seed(seed, "train", 0);
    const Model initial = init_model(arch, derive_seed(seed, "init", 0));
    const TrainResult trained = train(initial, dataset, result.train_indices, optimizer,
                                      config.schedule, result.train_indices);
    result.curves = learning_curves_by_bin(trained.trace, result.bins);
    return result;
}

BinnedCurves optimizer_curves(const Dataset& dataset, const BinAssignment& bins,
                              const TrainerConfig& config, std::uint64_t seed) {
    dataset.validate();
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), 0);

    const ArchSpec arch = resolved_arch(config, dataset);
    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = derive_seed(seed, "train", 0);
    const Model initial = init_model(arch, derive_seed(seed, "init", 0));
    const TrainResult trained = train(initial, dataset, all, optimizer, config.schedule, all);
    return learning_curves_by_bin(trained.trace, bins);
}

}  // namespace cscore
