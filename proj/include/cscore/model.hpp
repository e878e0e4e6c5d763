#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cscore/mat.hpp"

namespace cscore {

// Feedforward net: rectified hidden layers, softmax output.
struct ArchSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;  // at least one hidden layer
    std::size_t num_classes = 0;

    void validate() const;
};

struct Layer {
    MatD weights;              // out x in, row-major
    std::vector<double> bias;  // out
};

struct Model {
    ArchSpec arch;
    std::vector<Layer> layers;  // hidden layers + output layer

    std::size_t parameter_count() const;
    void validate() const;

    bool operator==(const Model&) const;
};

// Fan-in scaled uniform init: weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
// biases zero. Deterministic in the seed.
Model init_model(const ArchSpec& arch, std::uint64_t seed);

struct Prediction {
    std::vector<int> labels;  // argmax, ties to the lowest class id
    MatD probabilities;       // N x C, rows sum to 1 within 1e-6
};

// Softmax evaluated with max-subtraction stabilization; input is processed in
// fixed-size chunks so large datasets do not blow up activation memory.
Prediction predict(const Model& model, const MatF& features);

// Post-activation outputs of the last hidden layer, one row per example.
MatD penultimate(const Model& model, const MatF& features);

// All layer outputs for a (double precision) input batch; the final entry
// holds softmax probabilities. Shared by predict and the trainer.
std::vector<MatD> forward_all(const Model& model, const MatD& inputs);

// Checkpoint: "CSCM" header with layer shapes, parameters as little-endian
// float32 (lossy from the double-precision in-memory weights).
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace cscore
