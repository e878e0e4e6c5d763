#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cscore/error.hpp"

namespace cscore {

// Dense row-major matrix. Deliberately minimal: contiguous storage plus row
// views, which is all the numeric code here needs.
template <typename T>
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }

    bool operator==(const Mat&) const = default;
};

using MatD = Mat<double>;
using MatF = Mat<float>;

inline MatD to_double(const MatF& m) {
    MatD out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<double>(m.data[i]);
    return out;
}

}  // namespace cscore
