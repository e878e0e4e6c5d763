#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cscore/dataset.hpp"
#include "cscore/mat.hpp"
#include "cscore/model.hpp"
#include "cscore/schedule.hpp"

namespace cscore {

enum class OptimizerKind { sgd_momentum, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::sgd_momentum;
    double learning_rate = 0.1;
    double momentum = 0.9;  // SGD only; Nesterov update
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;  // L2 on weights (not biases), added to the gradient
    std::size_t batch_size = 32;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// Everything needed to train one model. input_dim / num_classes of 0 mean
// "take it from the dataset".
struct TrainerConfig {
    ArchSpec arch{0, {32}, 0};
    OptimizerConfig optimizer;
    ScheduleSpec schedule;
};

ArchSpec resolved_arch(const TrainerConfig& config, const Dataset& dataset);

// Per-epoch statistics over a designated evaluation index set, measured with
// end-of-epoch weights. Row e covers epoch e+1.
struct TrainingTrace {
    std::vector<std::size_t> eval_indices;
    Mat<std::uint8_t> correct;  // epochs x |eval|
    MatD prob_correct;          // softmax probability of the true class
    MatD prob_max;
    MatD entropy;

    std::size_t epochs() const { return correct.rows; }
};

struct TrainResult {
    Model model;
    TrainingTrace trace;
};

// Mini-batch softmax cross-entropy training on train_indices. Epoch-level
// shuffling, batching, and updates are fully determined by the optimizer seed;
// the schedule supplies a per-step learning rate.
TrainResult train(const Model& model, const Dataset& dataset,
                  std::span<const std::size_t> train_indices, const OptimizerConfig& optimizer,
                  const ScheduleSpec& schedule, std::span<const std::size_t> eval_indices);

// Loss (mean cross entropy + 0.5 * weight_decay * ||W||^2) with analytic
// gradients on one fixed batch. Used by the finite-difference checks and the
// optimizer inner loop.
struct LossGradient {
    double loss = 0.0;
    std::vector<MatD> weight_grads;
    std::vector<std::vector<double>> bias_grads;
};

LossGradient loss_and_gradient(const Model& model, const MatD& inputs, std::span<const int> labels,
                               double weight_decay = 0.0);

// Trace file: epoch,example_index,correct,prob_correct,prob_max,entropy.
void save_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path);
TrainingTrace load_trace_csv(const std::filesystem::path& path);

}  // namespace cscore
