#include <algorithm>
#include <cmath>

#include "cscore/error.hpp"
#include "cscore/proxies.hpp"
#include "cscore/rng.hpp"
#include "cscore/thread_pool.hpp"

namespace cscore {

void PointSet::validate() const {
    if (points.rows != labels.size())
        throw ValidationError("point count does not match label count");
    if (points.rows == 0) throw ValidationError("empty point set");
}

PointSet input_point_set(const Dataset& dataset) {
    dataset.validate();
    PointSet set;
    set.points = to_double(dataset.features);
    set.labels = dataset.labels;
    set.space = FeatureSpace::input;
    return set;
}

PointSet hidden_point_set(const Model& model, const Dataset& dataset) {
    dataset.validate();
    PointSet set;
    set.points = penultimate(model, dataset.features);
    set.labels = dataset.labels;
    set.space = FeatureSpace::hidden;
    return set;
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

}  // namespace

double rbf_bandwidth(const MatD& points, std::size_t sample_cap, std::uint64_t seed) {
    if (points.rows < 2) throw ValidationError("bandwidth needs at least 2 points");
    if (sample_cap < 2) throw ValidationError("bandwidth sample cap must be >= 2");

    std::vector<std::size_t> ids;
    if (points.rows > sample_cap) {
        Rng rng(seed);
        ids = rng.sample_without_replacement(points.rows, sample_cap);
        std::sort(ids.begin(), ids.end());
    } else {
        ids.resize(points.rows);
        for (std::size_t i = 0; i < points.rows; ++i) ids[i] = i;
    }

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            sum += euclidean(points.row(ids[i]), points.row(ids[j]));
            ++pairs;
        }
    }
    const double h = 0.5 * sum / static_cast<double>(pairs);
    if (h <= 0.0) throw ValidationError("degenerate kernel: all points identical");
    return h;
}

KernelScores kernel_scores(const PointSet& points, double bandwidth, unsigned jobs) {
    points.validate();
    if (bandwidth <= 0.0) throw ValidationError("bandwidth must be positive");

    const std::size_t n = points.size();
    KernelScores out;
    out.density.resize(n);
    out.same_class.resize(n);
    out.signed_diff.resize(n);

    const double inv_h2 = 1.0 / (bandwidth * bandwidth);
    const double inv_n = 1.0 / static_cast<double>(n);

    // Each example owns its own output slots; inner sums run over ascending i
    // so results do not depend on the worker count.
    parallel_for(n, jobs, [&](std::size_t j) {
        auto x = points.points.row(j);
        const int label = points.labels[j];
        double all = 0.0, same = 0.0, signed_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = points.points.row(i);
            double sq = 0.0;
            for (std::size_t k = 0; k < xi.size(); ++k) {
                const double delta = xi[k] - x[k];
                sq += delta * delta;
            }
            const double kernel = std::exp(-sq * inv_h2);
            all += kernel;
            if (points.labels[i] == label) same += kernel;
            signed_sum += points.labels[i] == label ? kernel : -kernel;
        }
        out.density[j] = all * inv_n;
        out.same_class[j] = same * inv_n;
        out.signed_diff[j] = signed_sum * inv_n;
    });
    return out;
}

}  // namespace cscore
