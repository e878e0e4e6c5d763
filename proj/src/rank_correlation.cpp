#include "cscore/rank_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cscore/error.hpp"
#include "cscore/score.hpp"

namespace cscore {

namespace {

// keeps only pairs defined on both sides
void gather_defined(std::span<const double> a, std::span<const double> b, std::vector<double>& xs,
                    std::vector<double>& ys) {
    if (a.size() != b.size()) throw ValidationError("rank correlation inputs differ in length");
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (score_defined(a[i]) && score_defined(b[i])) {
            xs.push_back(a[i]);
            ys.push_back(b[i]);
        }
    }
    if (xs.size() < 3)
        throw ValidationError("rank correlation needs at least 3 jointly defined pairs");
}

// fractional ranks, ties averaged
std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

// merge sort counting inversions (strict b_i > b_j for i < j)
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            count += mid - i;
            scratch[k++] = v[j++];
        } else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

std::uint64_t tied_pair_sum(std::uint64_t run) { return run * (run - 1) / 2; }

}  // namespace

RankCorrelation spearman(std::span<const double> a, std::span<const double> b) {
    std::vector<double> xs, ys;
    gather_defined(a, b, xs, ys);
    const auto ra = average_ranks(xs);
    const auto rb = average_ranks(ys);

    const double n = static_cast<double>(ra.size());
    double sum_a = 0, sum_b = 0, sum_ab = 0, sum_aa = 0, sum_bb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sum_a += ra[i];
        sum_b += rb[i];
        sum_ab += ra[i] * rb[i];
        sum_aa += ra[i] * ra[i];
        sum_bb += rb[i] * rb[i];
    }
    const double var_a = n * sum_aa - sum_a * sum_a;
    const double var_b = n * sum_bb - sum_b * sum_b;
    if (var_a <= 0.0 || var_b <= 0.0)
        throw ValidationError("spearman is undefined for a constant vector");

    return {(n * sum_ab - sum_a * sum_b) / std::sqrt(var_a * var_b),
            RankCorrelation::Kind::spearman, ra.size()};
}

RankCorrelation kendall(std::span<const double> a, std::span<const double> b) {
    std::vector<double> xs, ys;
    gather_defined(a, b, xs, ys);
    const std::size_t n = xs.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (xs[i] != xs[j]) return xs[i] < xs[j];
        return ys[i] < ys[j];
    });

    // tie runs in x, and joint (x, y) ties, over the sorted order
    std::uint64_t ties_x = 0, ties_joint = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        ties_x += tied_pair_sum(j - i + 1);
        // y is sorted within an x-run, so joint ties are sub-runs
        std::size_t p = i;
        while (p <= j) {
            std::size_t q = p;
            while (q + 1 <= j && ys[order[q + 1]] == ys[order[p]]) ++q;
            ties_joint += tied_pair_sum(q - p + 1);
            p = q + 1;
        }
        i = j + 1;
    }

    // tie runs in y over the whole vector
    std::vector<double> sorted_y = ys;
    std::sort(sorted_y.begin(), sorted_y.end());
    std::uint64_t ties_y = 0;
    i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted_y[j + 1] == sorted_y[i]) ++j;
        ties_y += tied_pair_sum(j - i + 1);
        i = j + 1;
    }

    std::vector<double> y_by_x(n);
    for (std::size_t k = 0; k < n; ++k) y_by_x[k] = ys[order[k]];
    std::vector<double> scratch(n);
    const std::uint64_t discordant = count_inversions(y_by_x, scratch, 0, n);

    const std::uint64_t total = tied_pair_sum(n);
    if (total == ties_x || total == ties_y)
        throw ValidationError("kendall is undefined for a constant vector");

    // concordant + discordant = pairs untied in both coordinates
    const std::uint64_t comparable = total - ties_x - ties_y + ties_joint;
    const double numerator =
        static_cast<double>(static_cast<std::int64_t>(comparable) -
                            2 * static_cast<std::int64_t>(discordant));
    const double denominator =
        std::sqrt(static_cast<double>(total - ties_x) * static_cast<double>(total - ties_y));
    return {numerator / denominator, RankCorrelation::Kind::kendall, n};
}

}  // namespace cscore
