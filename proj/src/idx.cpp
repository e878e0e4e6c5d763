#include "cscore/idx.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"

namespace cscore {

namespace {

constexpr std::uint32_t kLabelMagic = 0x00000801;  // unsigned byte, 1-D
constexpr std::uint32_t kImageMagic = 0x00000803;  // unsigned byte, 3-D

std::uint32_t get_u32_be(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + 4 > bytes.size())
        throw ParseError("unexpected end of IDX data while reading a 32-bit field", bytes.size());
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
    const std::uint32_t magic = get_u32_be(bytes, 0);
    std::size_t ndim = 0;
    if (magic == kLabelMagic) {
        ndim = 1;
    } else if (magic == kImageMagic) {
        ndim = 3;
    } else {
        throw ParseError("bad IDX magic 0x" + to_hex(magic).substr(8), 0);
    }

    IdxTensor tensor;
    tensor.shape.resize(ndim);
    std::size_t expected = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        const std::size_t offset = 4 + 4 * i;
        const std::uint32_t dim = get_u32_be(bytes, offset);
        tensor.shape[i] = dim;
        if (dim != 0 && expected > std::numeric_limits<std::size_t>::max() / dim)
            throw ParseError("IDX dimensions overflow", offset);
        expected *= dim;
    }

    const std::size_t header = 4 + 4 * ndim;
    const std::size_t available = bytes.size() - header;
    if (available < expected)
        throw ParseError("truncated IDX payload: expected " + std::to_string(expected) +
                             " bytes, got " + std::to_string(available),
                         bytes.size());
    if (available > expected)
        throw ParseError("trailing bytes after IDX payload", header + expected);

    tensor.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
    return tensor;
}

IdxTensor load_idx_file(const std::filesystem::path& path) {
    return parse_idx(read_binary_file(path));
}

Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels) {
    if (images.shape.size() != 3) throw ValidationError("image tensor must be 3-D");
    if (labels.shape.size() != 1) throw ValidationError("label tensor must be 1-D");
    if (images.count() != labels.count())
        throw ValidationError("image and label counts differ");
    if (images.count() == 0) throw ValidationError("empty IDX dataset");

    const std::size_t n = images.count();
    const std::size_t d = images.shape[1] * images.shape[2];

    Dataset out;
    out.features = MatF(n, d);
    for (std::size_t i = 0; i < n * d; ++i)
        out.features.data[i] = static_cast<float>(images.values[i]) / 255.0f;

    out.labels.resize(n);
    int max_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.labels[i] = labels.values[i];
        max_label = std::max(max_label, out.labels[i]);
    }
    out.num_classes = max_label + 1;
    out.validate();
    return out;
}

}  // namespace cscore
