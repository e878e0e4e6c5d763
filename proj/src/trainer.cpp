#include "cscore/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/rng.hpp"

namespace cscore {

void OptimizerConfig::validate() const {
    if (learning_rate <= 0.0) throw ValidationError("learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ValidationError("momentum must be in [0, 1)");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw ValidationError("adam betas must be in [0, 1)");
    if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
    if (weight_decay < 0.0) throw ValidationError("weight_decay must be nonnegative");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
}

ArchSpec resolved_arch(const TrainerConfig& config, const Dataset& dataset) {
    ArchSpec arch = config.arch;
    if (arch.input_dim == 0) arch.input_dim = dataset.dim();
    if (arch.num_classes == 0) arch.num_classes = static_cast<std::size_t>(dataset.num_classes);
    arch.validate();
    return arch;
}

LossGradient loss_and_gradient(const Model& model, const MatD& inputs, std::span<const int> labels,
                               double weight_decay) {
    if (inputs.rows != labels.size())
        throw ValidationError("batch size does not match label count");
    if (inputs.rows == 0) throw ValidationError("empty batch");

    const auto outputs = forward_all(model, inputs);
    const MatD& probs = outputs.back();
    const double inv_batch = 1.0 / static_cast<double>(inputs.rows);

    LossGradient grad;
    grad.weight_grads.reserve(model.layers.size());
    grad.bias_grads.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        grad.weight_grads.emplace_back(layer.weights.rows, layer.weights.cols);
        grad.bias_grads.emplace_back(layer.bias.size(), 0.0);
    }

    // cross entropy from the probabilities (already softmax-stabilized)
    double loss = 0.0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= probs.cols)
            throw ValidationError("label out of range in batch");
        loss -= std::log(std::max(probs.at(i, static_cast<std::size_t>(y)), 1e-300));
    }
    loss *= inv_batch;

    // delta for the output layer: (p - onehot) / B
    MatD delta(probs.rows, probs.cols);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        for (std::size_t c = 0; c < probs.cols; ++c)
            delta.at(i, c) = probs.at(i, c) * inv_batch;
        delta.at(i, static_cast<std::size_t>(labels[i])) -= inv_batch;
    }

    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const Layer& layer = model.layers[l];
        const MatD& input = l == 0 ? inputs : outputs[l - 1];

        MatD& dw = grad.weight_grads[l];
        auto& db = grad.bias_grads[l];
        for (std::size_t i = 0; i < delta.rows; ++i) {
            auto d_row = delta.row(i);
            auto in_row = input.row(i);
            for (std::size_t o = 0; o < dw.rows; ++o) {
                const double d = d_row[o];
                if (d == 0.0) continue;
                auto dst = dw.row(o);
                for (std::size_t k = 0; k < dw.cols; ++k) dst[k] += d * in_row[k];
                db[o] += d;
            }
        }

        if (l > 0) {
            // propagate through the weights, then the rectifier
            MatD next(delta.rows, layer.weights.cols, 0.0);
            for (std::size_t i = 0; i < delta.rows; ++i) {
                auto d_row = delta.row(i);
                auto dst = next.row(i);
                for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                    const double d = d_row[o];
                    if (d == 0.0) continue;
                    auto w = layer.weights.row(o);
                    for (std::size_t k = 0; k < w.size(); ++k) dst[k] += d * w[k];
                }
                auto act = input.row(i);
                for (std::size_t k = 0; k < dst.size(); ++k)
                    if (act[k] <= 0.0) dst[k] = 0.0;
            }
            delta = std::move(next);
        }
    }

    if (weight_decay > 0.0) {
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            const auto& w = model.layers[l].weights.data;
            auto& dw = grad.weight_grads[l].data;
            double sq = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                dw[k] += weight_decay * w[k];
                sq += w[k] * w[k];
            }
            loss += 0.5 * weight_decay * sq;
        }
    }

    grad.loss = loss;
    return grad;
}

namespace {

struct OptimizerState {
    // one slot per layer: weights buffer + bias buffer
    std::vector<MatD> w_momentum, w_second;
    std::vector<std::vector<double>> b_momentum, b_second;
    std::size_t adam_step = 0;

    explicit OptimizerState(const Model& model) {
        for (const auto& layer : model.layers) {
            w_momentum.emplace_back(layer.weights.rows, layer.weights.cols);
            w_second.emplace_back(layer.weights.rows, layer.weights.cols);
            b_momentum.emplace_back(layer.bias.size(), 0.0);
            b_second.emplace_back(layer.bias.size(), 0.0);
        }
    }
};

void sgd_update(std::span<double> params, std::span<const double> grads, std::span<double> momentum,
                double lr, double mu) {
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        if (mu > 0.0) {
            momentum[k] = mu * momentum[k] + g;
            params[k] -= lr * (g + mu * momentum[k]);  // Nesterov
        } else {
            params[k] -= lr * g;
        }
    }
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, double lr, const OptimizerConfig& cfg, std::size_t t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
        params[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg.epsilon);
    }
}

void apply_update(Model& model, const LossGradient& grad, OptimizerState& state,
                  const OptimizerConfig& cfg, double lr) {
    if (cfg.kind == OptimizerKind::adam) ++state.adam_step;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        if (cfg.kind == OptimizerKind::sgd_momentum) {
            sgd_update(layer.weights.data, grad.weight_grads[l].data, state.w_momentum[l].data, lr,
                       cfg.momentum);
            sgd_update(layer.bias, grad.bias_grads[l], state.b_momentum[l], lr, cfg.momentum);
        } else {
            adam_update(layer.weights.data, grad.weight_grads[l].data, state.w_momentum[l].data,
                        state.w_second[l].data, lr, cfg, state.adam_step);
            adam_update(layer.bias, grad.bias_grads[l], state.b_momentum[l], state.b_second[l], lr,
                        cfg, state.adam_step);
        }
    }
}

MatD gather_rows(const MatF& features, std::span<const std::size_t> indices) {
    MatD out(indices.size(), features.cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = features.row(indices[i]);
        auto dst = out.row(i);
        for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<double>(src[k]);
    }
    return out;
}

constexpr std::size_t kEvalChunk = 512;

void append_trace_row(TrainingTrace& trace, const Model& model, const Dataset& dataset) {
    const std::size_t row = trace.correct.rows;
    const std::size_t width = trace.eval_indices.size();
    auto grow = [&](auto& mat) {
        mat.data.resize(mat.data.size() + width);
        ++mat.rows;
    };
    grow(trace.correct);
    grow(trace.prob_correct);
    grow(trace.prob_max);
    grow(trace.entropy);

    for (std::size_t begin = 0; begin < width; begin += kEvalChunk) {
        const std::size_t end = std::min(width, begin + kEvalChunk);
        const MatD batch = gather_rows(
            dataset.features, std::span(trace.eval_indices).subspan(begin, end - begin));
        const auto outputs = forward_all(model, batch);
        const MatD& probs = outputs.back();
        for (std::size_t i = 0; i < probs.rows; ++i) {
            auto p = probs.row(i);
            int best = 0;
            double entropy = 0.0;
            for (std::size_t c = 0; c < p.size(); ++c) {
                if (p[c] > p[best]) best = static_cast<int>(c);
                if (p[c] > 0.0) entropy -= p[c] * std::log(p[c]);
            }
            const int label = dataset.labels[trace.eval_indices[begin + i]];
            const std::size_t col = begin + i;
            trace.correct.at(row, col) = best == label ? 1 : 0;
            trace.prob_correct.at(row, col) = p[static_cast<std::size_t>(label)];
            trace.prob_max.at(row, col) = p[static_cast<std::size_t>(best)];
            trace.entropy.at(row, col) = entropy;
        }
    }
}

}  // namespace

TrainResult train(const Model& model, const Dataset& dataset,
                  std::span<const std::size_t> train_indices, const OptimizerConfig& optimizer,
                  const ScheduleSpec& schedule, std::span<const std::size_t> eval_indices) {
    model.validate();
    dataset.validate();
    optimizer.validate();
    schedule.validate();
    for (std::size_t idx : train_indices)
        if (idx >= dataset.size()) throw ValidationError("train index out of range");
    for (std::size_t idx : eval_indices)
        if (idx >= dataset.size()) throw ValidationError("eval index out of range");
    if (dataset.dim() != model.arch.input_dim ||
        static_cast<std::size_t>(dataset.num_classes) > model.arch.num_classes)
        throw ValidationError("dataset does not match model architecture");

    TrainResult result;
    result.model = model;
    result.trace.eval_indices.assign(eval_indices.begin(), eval_indices.end());
    result.trace.correct = Mat<std::uint8_t>(0, eval_indices.size());
    result.trace.prob_correct = MatD(0, eval_indices.size());
    result.trace.prob_max = MatD(0, eval_indices.size());
    result.trace.entropy = MatD(0, eval_indices.size());

    if (optimizer.epochs == 0) return result;
    if (train_indices.empty())
        throw ValidationError("cannot train for > 0 epochs with no training examples");

    const std::size_t n = train_indices.size();
    const std::size_t steps_per_epoch = (n + optimizer.batch_size - 1) / optimizer.batch_size;
    const std::size_t total_steps = steps_per_epoch * optimizer.epochs;

    OptimizerState state(result.model);
    std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
    std::vector<int> batch_labels;
    std::size_t global_step = 0;

    for (std::size_t epoch = 0; epoch < optimizer.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(optimizer.seed, "epoch-shuffle", epoch));
        shuffle_rng.shuffle(order);

        for (std::size_t start = 0; start < n; start += optimizer.batch_size) {
            const std::size_t stop = std::min(n, start + optimizer.batch_size);
            std::span<const std::size_t> batch_ids(order.data() + start, stop - start);
            const MatD inputs = gather_rows(dataset.features, batch_ids);
            batch_labels.resize(batch_ids.size());
            for (std::size_t i = 0; i < batch_ids.size(); ++i)
                batch_labels[i] = dataset.labels[batch_ids[i]];

            const auto grad =
                loss_and_gradient(result.model, inputs, batch_labels, optimizer.weight_decay);
            const double lr =
                lr_at(schedule, global_step, total_steps, optimizer.learning_rate);
            apply_update(result.model, grad, state, optimizer, lr);
            ++global_step;
        }

        append_trace_row(result.trace, result.model, dataset);
    }
    return result;
}

void save_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path) {
    std::string csv = "epoch,example_index,correct,prob_correct,prob_max,entropy\n";
    for (std::size_t e = 0; e < trace.epochs(); ++e) {
        for (std::size_t j = 0; j < trace.eval_indices.size(); ++j) {
            csv += std::to_string(e + 1);
            csv += ',';
            csv += std::to_string(trace.eval_indices[j]);
            csv += ',';
            csv += trace.correct.at(e, j) ? '1' : '0';
            csv += ',';
            csv += format_double(trace.prob_correct.at(e, j));
            csv += ',';
            csv += format_double(trace.prob_max.at(e, j));
            csv += ',';
            csv += format_double(trace.entropy.at(e, j));
            csv += '\n';
        }
    }
    write_text_file(path, csv);
}

TrainingTrace load_trace_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "epoch,example_index,correct,prob_correct,prob_max,entropy")
        throw ParseError("trace CSV missing header", 1);

    TrainingTrace trace;
    std::size_t width = 0;
    // first pass over epoch 1 rows to learn the eval set
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 6) throw ParseError("expected 6 fields", i + 1);
        if (parse_int_field(fields[0], i + 1) != 1) break;
        trace.eval_indices.push_back(
            static_cast<std::size_t>(parse_int_field(fields[1], i + 1)));
        ++width;
    }
    if (width == 0) {
        if (lines.size() > 1) throw ParseError("trace rows do not start at epoch 1", 2);
        return trace;
    }
    const std::size_t rows = (lines.size() - 1) / width;
    if (rows * width != lines.size() - 1)
        throw ParseError("trace row count is not a multiple of the eval set size", lines.size());

    trace.correct = Mat<std::uint8_t>(rows, width);
    trace.prob_correct = MatD(rows, width);
    trace.prob_max = MatD(rows, width);
    trace.entropy = MatD(rows, width);
    for (std::size_t e = 0; e < rows; ++e) {
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t line_no = 1 + e * width + j;
            const auto fields = split_csv_line(lines[line_no]);
            if (fields.size() != 6) throw ParseError("expected 6 fields", line_no + 1);
            if (parse_int_field(fields[0], line_no + 1) != static_cast<long long>(e + 1) ||
                parse_int_field(fields[1], line_no + 1) !=
                    static_cast<long long>(trace.eval_indices[j]))
                throw ParseError("trace rows out of order", line_no + 1);
            trace.correct.at(e, j) =
                static_cast<std::uint8_t>(parse_int_field(fields[2], line_no + 1));
            trace.prob_correct.at(e, j) = parse_double_field(fields[3], line_no + 1);
            trace.prob_max.at(e, j) = parse_double_field(fields[4], line_no + 1);
            trace.entropy.at(e, j) = parse_double_field(fields[5], line_no + 1);
        }
    }
    return trace;
}

}  // namespace cscore
