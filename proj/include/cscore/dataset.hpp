#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cscore/mat.hpp"

namespace cscore {

struct ExampleView {
    std::span<const float> features;
    int label;
};

// A labeled dataset. The example order is canonical: it is the index space
// shared by every mask, loss and score artifact derived from the dataset.
struct Dataset {
    MatF features;               // N x d
    std::vector<int> labels;     // N, each in [0, num_classes)
    int num_classes = 0;
    // Present iff labels were deliberately corrupted; true = label was flipped.
    std::optional<std::vector<std::uint8_t>> corruption_mask;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols; }

    ExampleView example(std::size_t i) const { return {features.row(i), labels[i]}; }

    void validate() const;  // throws ValidationError on broken invariants
};

// One isotropic Gaussian component of a synthetic class.
struct GaussianMode {
    std::vector<double> mean;
    double stddev = 1.0;
    std::size_t count = 0;
};

// Synthetic benchmark recipe: per-class mixture modes plus label corruption.
// Densely and thinly populated modes give the generated data a planted
// regularity structure that downstream scoring should recover.
struct SyntheticSpec {
    std::vector<std::vector<GaussianMode>> modes_per_class;  // index = class id
    double flip_fraction = 0.0;                              // in [0, 1)
    std::uint64_t seed = 0;

    std::size_t total_count() const;
    std::size_t dim() const;  // 0 when no mode present
    void validate() const;
};

// Layout of the generated examples: one contiguous span per (class, mode),
// in generation order. Computable from the spec alone.
struct ModeSpan {
    int class_id = 0;
    std::size_t mode_id = 0;
    std::size_t begin = 0;
    std::size_t count = 0;
};

std::vector<ModeSpan> mode_layout(const SyntheticSpec& spec);

// Samples every mode, then flips a flip_fraction share of labels uniformly to
// some other class. Pure function of the spec (including its seed).
Dataset generate_synthetic(const SyntheticSpec& spec);

// Returns a copy with round(flip_fraction * N) labels (ties to even)
// reassigned uniformly to a different class, and a corruption mask marking
// exactly those examples. The input must not already carry a mask.
Dataset flip_labels(const Dataset& dataset, double flip_fraction, std::uint64_t seed);

// Snapshot files: index/label/flipped CSV plus a little-endian float32
// feature sidecar ("CSCD" header). num_classes is reconstructed as
// max(label) + 1 on load, since the format does not store it.
void save_snapshot(const Dataset& dataset, const std::filesystem::path& csv_path,
                   const std::filesystem::path& features_path);
Dataset load_snapshot(const std::filesystem::path& csv_path,
                      const std::filesystem::path& features_path);

}  // namespace cscore
