#include "cscore/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/rng.hpp"

namespace cscore {

void Dataset::validate() const {
    if (labels.empty()) throw ValidationError("dataset must contain at least one example");
    if (features.rows != labels.size())
        throw ValidationError("feature row count does not match label count");
    if (num_classes < 1) throw ValidationError("num_classes must be >= 1");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes)
            throw ValidationError("label out of range at index " + std::to_string(i));
    }
    if (corruption_mask && corruption_mask->size() != labels.size())
        throw ValidationError("corruption mask length does not match example count");
}

std::size_t SyntheticSpec::total_count() const {
    std::size_t n = 0;
    for (const auto& modes : modes_per_class)
        for (const auto& mode : modes) n += mode.count;
    return n;
}

std::size_t SyntheticSpec::dim() const {
    for (const auto& modes : modes_per_class)
        for (const auto& mode : modes)
            if (mode.count > 0) return mode.mean.size();
    return 0;
}

void SyntheticSpec::validate() const {
    if (modes_per_class.empty()) throw ValidationError("synthetic spec has no classes");
    if (flip_fraction < 0.0 || flip_fraction >= 1.0)
        throw ValidationError("flip_fraction must be in [0, 1)");
    const std::size_t d = dim();
    if (total_count() == 0) throw ValidationError("synthetic spec has no nonempty mode");
    for (std::size_t c = 0; c < modes_per_class.size(); ++c) {
        for (std::size_t m = 0; m < modes_per_class[c].size(); ++m) {
            const auto& mode = modes_per_class[c][m];
            if (mode.stddev < 0.0)
                throw ValidationError("negative stddev in class " + std::to_string(c));
            if (mode.count > 0 && mode.mean.size() != d)
                throw ValidationError("inconsistent mode dimension in class " + std::to_string(c));
        }
    }
}

std::vector<ModeSpan> mode_layout(const SyntheticSpec& spec) {
    std::vector<ModeSpan> layout;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < spec.modes_per_class.size(); ++c) {
        for (std::size_t m = 0; m < spec.modes_per_class[c].size(); ++m) {
            const auto& mode = spec.modes_per_class[c][m];
            layout.push_back({static_cast<int>(c), m, offset, mode.count});
            offset += mode.count;
        }
    }
    return layout;
}

namespace {

// round to nearest, ties to even (llrint under the default FP rounding mode)
std::size_t flip_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::llrint(fraction * static_cast<double>(n)));
}

// Flips `count` uniformly chosen labels in place and returns the mask.
std::vector<std::uint8_t> flip_in_place(std::vector<int>& labels, int num_classes,
                                        std::size_t count, std::uint64_t seed) {
    std::vector<std::uint8_t> mask(labels.size(), 0);
    if (count == 0) return mask;
    if (num_classes < 2)
        throw ValidationError("cannot flip labels with fewer than two classes");
    Rng rng(seed);
    auto chosen = rng.sample_without_replacement(labels.size(), count);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t idx : chosen) {
        int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes - 1)));
        if (other >= labels[idx]) ++other;
        labels[idx] = other;
        mask[idx] = 1;
    }
    return mask;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.total_count();
    const std::size_t d = spec.dim();

    Dataset out;
    out.features = MatF(n, d);
    out.labels.resize(n);
    out.num_classes = static_cast<int>(spec.modes_per_class.size());

    Rng sample_rng(derive_seed(spec.seed, "synthetic-sample", 0));
    std::size_t row = 0;
    for (std::size_t c = 0; c < spec.modes_per_class.size(); ++c) {
        for (const auto& mode : spec.modes_per_class[c]) {
            for (std::size_t i = 0; i < mode.count; ++i, ++row) {
                auto dst = out.features.row(row);
                for (std::size_t k = 0; k < d; ++k)
                    dst[k] = static_cast<float>(sample_rng.normal(mode.mean[k], mode.stddev));
                out.labels[row] = static_cast<int>(c);
            }
        }
    }

    out.corruption_mask = flip_in_place(out.labels, out.num_classes,
                                        flip_count(spec.flip_fraction, n),
                                        derive_seed(spec.seed, "synthetic-flip", 0));
    out.validate();
    return out;
}

Dataset flip_labels(const Dataset& dataset, double flip_fraction, std::uint64_t seed) {
    dataset.validate();
    if (dataset.corruption_mask)
        throw ValidationError("dataset already carries a corruption mask");
    if (flip_fraction < 0.0 || flip_fraction >= 1.0)
        throw ValidationError("flip_fraction must be in [0, 1)");

    Dataset out = dataset;
    out.corruption_mask = flip_in_place(out.labels, out.num_classes,
                                        flip_count(flip_fraction, out.size()), seed);
    return out;
}

namespace {

constexpr char kFeatureMagic[4] = {'C', 'S', 'C', 'D'};
constexpr std::uint32_t kFeatureVersion = 1;

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void save_snapshot(const Dataset& dataset, const std::filesystem::path& csv_path,
                   const std::filesystem::path& features_path) {
    dataset.validate();

    std::string csv = "index,label,flipped\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        csv += std::to_string(i);
        csv += ',';
        csv += std::to_string(dataset.labels[i]);
        csv += ',';
        csv += (dataset.corruption_mask && (*dataset.corruption_mask)[i]) ? '1' : '0';
        csv += '\n';
    }
    write_text_file(csv_path, csv);

    // 16-byte header: magic, version, N, d; then row-major float32, little endian.
    std::vector<std::uint8_t> bin;
    bin.reserve(16 + dataset.features.data.size() * 4);
    bin.insert(bin.end(), kFeatureMagic, kFeatureMagic + 4);
    put_u32_le(bin, kFeatureVersion);
    put_u32_le(bin, static_cast<std::uint32_t>(dataset.size()));
    put_u32_le(bin, static_cast<std::uint32_t>(dataset.dim()));
    for (float f : dataset.features.data) {
        std::uint32_t raw;
        std::memcpy(&raw, &f, 4);
        put_u32_le(bin, raw);
    }
    write_binary_file(features_path, bin);
}

Dataset load_snapshot(const std::filesystem::path& csv_path,
                      const std::filesystem::path& features_path) {
    const auto bin = read_binary_file(features_path);
    if (bin.size() < 16 || std::memcmp(bin.data(), kFeatureMagic, 4) != 0)
        throw ParseError("bad feature sidecar header in " + features_path.string(), 0);
    const std::uint32_t version = get_u32_le(bin.data() + 4);
    if (version != kFeatureVersion)
        throw ParseError("unsupported feature sidecar version " + std::to_string(version), 4);
    const std::size_t n = get_u32_le(bin.data() + 8);
    const std::size_t d = get_u32_le(bin.data() + 12);
    if (bin.size() != 16 + n * d * 4)
        throw ParseError("feature sidecar payload size mismatch in " + features_path.string(),
                         bin.size());

    Dataset out;
    out.features = MatF(n, d);
    for (std::size_t i = 0; i < n * d; ++i) {
        std::uint32_t raw = get_u32_le(bin.data() + 16 + i * 4);
        float f;
        std::memcpy(&f, &raw, 4);
        out.features.data[i] = f;
    }

    const std::string text = read_text_file(csv_path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "index,label,flipped")
        throw ParseError("snapshot CSV missing 'index,label,flipped' header", 1);
    if (lines.size() != n + 1)
        throw ParseError("snapshot CSV row count does not match sidecar", lines.size());

    out.labels.resize(n);
    std::vector<std::uint8_t> mask(n, 0);
    bool any_flip = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto fields = split_csv_line(lines[i + 1]);
        if (fields.size() != 3) throw ParseError("expected 3 fields", i + 2);
        if (parse_int_field(fields[0], i + 2) != static_cast<long long>(i))
            throw ParseError("snapshot rows out of order", i + 2);
        out.labels[i] = static_cast<int>(parse_int_field(fields[1], i + 2));
        const long long flipped = parse_int_field(fields[2], i + 2);
        if (flipped != 0 && flipped != 1) throw ParseError("flipped must be 0 or 1", i + 2);
        mask[i] = static_cast<std::uint8_t>(flipped);
        any_flip = any_flip || flipped;
    }
    out.num_classes = *std::max_element(out.labels.begin(), out.labels.end()) + 1;
    if (any_flip) out.corruption_mask = std::move(mask);
    out.validate();
    return out;
}

}  // namespace cscore
