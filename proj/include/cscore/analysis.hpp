#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cscore/estimator.hpp"
#include "cscore/proxies.hpp"
#include "cscore/trainer.hpp"

namespace cscore {

// Fraction of the round(gamma * N) least-consistent examples (by the proxy's
// oriented scores, ties broken by example index) that are truly corrupted.
double detection_rate(const ProxyScores& proxy, std::span<const std::uint8_t> truth, double gamma);

enum class BinScheme {
    value_range,  // equal-width bins on [min, max]; interior edges belong to
                  // the lower bin, the global minimum to bin 0
    equal_count,  // quantile bins; tied values share the lower bin
};

struct BinAssignment {
    std::size_t bin_count = 0;
    std::vector<int> bins;  // per example; -1 for undefined scores
};

BinAssignment bin_by_score(const ScoreTable& scores, std::size_t bin_count, BinScheme scheme);

// accuracy.at(b, e) = mean correctness of bin b's examples at epoch e+1
// (NaN rows for empty bins), plus the overall mean curve.
struct BinnedCurves {
    MatD accuracy;                      // bins x epochs
    std::vector<double> overall;        // epochs
    std::vector<std::size_t> bin_sizes; // examples per bin within the trace
};

BinnedCurves learning_curves_by_bin(const TrainingTrace& trace, const BinAssignment& bins);

struct ClassStats {
    double mean = 0.0;
    double stddev = 0.0;  // population SD
    std::size_t count = 0;  // 0 marks a class with no defined score
};

std::vector<ClassStats> per_class_stats(std::span<const double> scores,
                                        std::span<const int> labels, int num_classes);

// Equal-width bins over [0, 1], top edge inclusive. Undefined scores are
// excluded from the counts and reported separately.
struct ScoreHistogram {
    std::vector<std::size_t> counts;
    std::size_t undefined = 0;
};

ScoreHistogram histogram(std::span<const double> scores, std::size_t bin_count);

}  // namespace cscore
