#include "cscore/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cscore/error.hpp"
#include "cscore/score.hpp"

namespace cscore {

double detection_rate(const ProxyScores& proxy, std::span<const std::uint8_t> truth, double gamma) {
    if (truth.empty()) throw ValidationError("corruption mask required for detection rate");
    if (proxy.values.size() != proxy.indices.size())
        throw ValidationError("proxy indices and values differ in length");
    if (gamma <= 0.0 || gamma >= 1.0) throw ValidationError("gamma must be in (0, 1)");
    for (std::size_t idx : proxy.indices)
        if (idx >= truth.size()) throw ValidationError("proxy index out of mask range");

    const std::size_t n = proxy.values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (proxy.values[a] != proxy.values[b]) return proxy.values[a] < proxy.values[b];
        return proxy.indices[a] < proxy.indices[b];
    });

    const auto take = static_cast<std::size_t>(std::llround(gamma * static_cast<double>(n)));
    if (take == 0) throw ValidationError("gamma selects no examples");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take && i < n; ++i)
        if (truth[proxy.indices[order[i]]]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(std::min(take, n));
}

BinAssignment bin_by_score(const ScoreTable& scores, std::size_t bin_count, BinScheme scheme) {
    if (bin_count < 1) throw ValidationError("bin_count must be >= 1");

    std::vector<std::size_t> defined;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (score_defined(scores.scores[i])) defined.push_back(i);
    if (defined.empty()) throw ValidationError("all scores undefined");

    BinAssignment assignment;
    assignment.bin_count = bin_count;
    assignment.bins.assign(scores.size(), -1);

    if (scheme == BinScheme::value_range) {
        double lo = scores.scores[defined.front()];
        double hi = lo;
        for (std::size_t i : defined) {
            lo = std::min(lo, scores.scores[i]);
            hi = std::max(hi, scores.scores[i]);
        }
        const double range = hi - lo;
        for (std::size_t i : defined) {
            int bin = 0;
            if (range > 0.0) {
                // intervals (lo, hi] except the first, which also takes the minimum
                const double scaled =
                    (scores.scores[i] - lo) / range * static_cast<double>(bin_count);
                bin = static_cast<int>(std::ceil(scaled)) - 1;
                bin = std::clamp(bin, 0, static_cast<int>(bin_count) - 1);
            }
            assignment.bins[i] = bin;
        }
    } else {
        std::sort(defined.begin(), defined.end(), [&](std::size_t a, std::size_t b) {
            if (scores.scores[a] != scores.scores[b]) return scores.scores[a] < scores.scores[b];
            return a < b;
        });
        const std::size_t n = defined.size();
        std::size_t i = 0;
        while (i < n) {
            // tied values all land in the bin of the group's lowest rank
            std::size_t j = i;
            while (j + 1 < n && scores.scores[defined[j + 1]] == scores.scores[defined[i]]) ++j;
            const int bin = static_cast<int>(i * bin_count / n);
            for (std::size_t k = i; k <= j; ++k) assignment.bins[defined[k]] = bin;
            i = j + 1;
        }
    }
    return assignment;
}

BinnedCurves learning_curves_by_bin(const TrainingTrace& trace, const BinAssignment& bins) {
    for (std::size_t idx : trace.eval_indices) {
        if (idx >= bins.bins.size() || bins.bins[idx] < 0)
            throw ValidationError("bins do not cover trace example " + std::to_string(idx));
    }

    const std::size_t epochs = trace.epochs();
    BinnedCurves curves;
    curves.accuracy = MatD(bins.bin_count, epochs, 0.0);
    curves.overall.assign(epochs, 0.0);
    curves.bin_sizes.assign(bins.bin_count, 0);

    for (std::size_t j = 0; j < trace.eval_indices.size(); ++j)
        ++curves.bin_sizes[static_cast<std::size_t>(bins.bins[trace.eval_indices[j]])];

    for (std::size_t e = 0; e < epochs; ++e) {
        std::size_t total_correct = 0;
        for (std::size_t j = 0; j < trace.eval_indices.size(); ++j) {
            const auto b = static_cast<std::size_t>(bins.bins[trace.eval_indices[j]]);
            curves.accuracy.at(b, e) += trace.correct.at(e, j);
            total_correct += trace.correct.at(e, j);
        }
        for (std::size_t b = 0; b < bins.bin_count; ++b) {
            curves.accuracy.at(b, e) = curves.bin_sizes[b] == 0
                                           ? undefined_score()
                                           : curves.accuracy.at(b, e) /
                                                 static_cast<double>(curves.bin_sizes[b]);
        }
        curves.overall[e] = trace.eval_indices.empty()
                                ? undefined_score()
                                : static_cast<double>(total_correct) /
                                      static_cast<double>(trace.eval_indices.size());
    }
    return curves;
}

std::vector<ClassStats> per_class_stats(std::span<const double> scores,
                                        std::span<const int> labels, int num_classes) {
    if (scores.size() != labels.size())
        throw ValidationError("scores and labels differ in length");
    if (num_classes < 1) throw ValidationError("num_classes must be >= 1");

    std::vector<ClassStats> stats(static_cast<std::size_t>(num_classes));
    std::vector<double> sums(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!score_defined(scores[i])) continue;
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= stats.size()) throw ValidationError("label out of range");
        sums[c] += scores[i];
        ++stats[c].count;
    }
    for (std::size_t c = 0; c < stats.size(); ++c)
        if (stats[c].count > 0) stats[c].mean = sums[c] / static_cast<double>(stats[c].count);

    std::vector<double> sq(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!score_defined(scores[i])) continue;
        const auto c = static_cast<std::size_t>(labels[i]);
        const double d = scores[i] - stats[c].mean;
        sq[c] += d * d;
    }
    for (std::size_t c = 0; c < stats.size(); ++c)
        if (stats[c].count > 0)
            stats[c].stddev = std::sqrt(sq[c] / static_cast<double>(stats[c].count));
    return stats;
}

ScoreHistogram histogram(std::span<const double> scores, std::size_t bin_count) {
    if (bin_count < 1) throw ValidationError("bin_count must be >= 1");

    ScoreHistogram hist;
    hist.counts.assign(bin_count, 0);
    for (double s : scores) {
        if (!score_defined(s)) {
            ++hist.undefined;
            continue;
        }
        if (s < 0.0 || s > 1.0) throw ValidationError("histogram scores must lie in [0, 1]");
        auto bin = static_cast<std::size_t>(s * static_cast<double>(bin_count));
        if (bin >= bin_count) bin = bin_count - 1;  // top edge inclusive
        ++hist.counts[bin];
    }
    return hist;
}

}  // namespace cscore
