#pragma once

#include <cstddef>
#include <span>

namespace cscore {

struct RankCorrelation {
    enum class Kind { spearman, kendall };

    double value = 0.0;
    Kind kind = Kind::spearman;
    std::size_t samples = 0;  // pairs used after dropping undefined entries
};

// Pearson correlation of fractional (average-tie) ranks. Pairs with an
// undefined entry on either side are dropped first; at least 3 pairs must
// remain and neither side may be constant.
RankCorrelation spearman(std::span<const double> a, std::span<const double> b);

// Kendall's tau-b (tie corrected), computed by sorting and merge-counting
// discordant pairs rather than enumerating all pairs.
RankCorrelation kendall(std::span<const double> a, std::span<const double> b);

}  // namespace cscore
