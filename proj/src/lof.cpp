#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cscore/error.hpp"
#include "cscore/proxies.hpp"

namespace cscore {

// Local outlier factor (Breunig et al.):
//   k-distance(p): distance to the k-th nearest other point; the neighborhood
//   N(p) contains every other point within that distance, so ties at the k-th
//   distance expand it beyond k members.
//   reach-dist(p, o) = max(k-distance(o), d(p, o))
//   lrd(p) = |N(p)| / sum_{o in N(p)} reach-dist(p, o)   (inf if the sum is 0)
//   LOF(p) = mean_{o in N(p)} lrd(o) / lrd(p),           (1 if lrd(p) is inf)
// All neighbor sums run in ascending index order.
std::vector<double> lof_scores(const MatD& points, std::size_t k_neighbors) {
    const std::size_t n = points.rows;
    if (k_neighbors < 1) throw ValidationError("k_neighbors must be >= 1");
    if (n <= k_neighbors) throw ValidationError("need more points than k_neighbors");

    MatD dist(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        dist.at(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            auto a = points.row(i);
            auto b = points.row(j);
            double sq = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double delta = a[k] - b[k];
                sq += delta * delta;
            }
            const double d = std::sqrt(sq);
            dist.at(i, j) = d;
            dist.at(j, i) = d;
        }
    }

    std::vector<double> k_distance(n);
    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<std::size_t> order(n - 1);
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t m = 0;
        for (std::size_t o = 0; o < n; ++o)
            if (o != p) order[m++] = o;
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_neighbors - 1),
                         order.end(),
                         [&](std::size_t a, std::size_t b) { return dist.at(p, a) < dist.at(p, b); });
        k_distance[p] = dist.at(p, order[k_neighbors - 1]);
        auto& nbrs = neighbors[p];
        for (std::size_t o = 0; o < n; ++o)
            if (o != p && dist.at(p, o) <= k_distance[p]) nbrs.push_back(o);
    }

    std::vector<double> lrd(n);
    for (std::size_t p = 0; p < n; ++p) {
        double reach_sum = 0.0;
        for (std::size_t o : neighbors[p]) reach_sum += std::max(k_distance[o], dist.at(p, o));
        lrd[p] = reach_sum == 0.0 ? std::numeric_limits<double>::infinity()
                                  : static_cast<double>(neighbors[p].size()) / reach_sum;
    }

    std::vector<double> scores(n);
    for (std::size_t p = 0; p < n; ++p) {
        double lof;
        if (std::isinf(lrd[p])) {
            lof = 1.0;
        } else {
            double ratio_sum = 0.0;
            for (std::size_t o : neighbors[p]) ratio_sum += lrd[o] / lrd[p];
            lof = ratio_sum / static_cast<double>(neighbors[p].size());
        }
        scores[p] = -lof;
    }
    return scores;
}

}  // namespace cscore
