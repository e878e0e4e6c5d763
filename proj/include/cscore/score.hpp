#pragma once

#include <cmath>
#include <limits>

namespace cscore {

// An example that was never held out (or never scored) has an undefined score.
// Undefined is a value, not an error; quiet NaN encodes it throughout.
inline double undefined_score() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool score_defined(double s) { return !std::isnan(s); }

}  // namespace cscore
