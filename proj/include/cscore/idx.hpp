#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cscore/dataset.hpp"

namespace cscore {

// Contents of one IDX file: unsigned bytes with the shape declared in the
// header. Supported magics are 0x00000801 (1-D label vectors) and
// 0x00000803 (3-D image stacks).
struct IdxTensor {
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> values;  // row-major

    std::size_t count() const { return shape.empty() ? 0 : shape[0]; }
};

IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
IdxTensor load_idx_file(const std::filesystem::path& path);

// Pairs an image stack with a label vector: images are flattened row-major
// and scaled to [0, 1] by division by 255.
Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels);

}  // namespace cscore
