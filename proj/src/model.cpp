#include "cscore/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/rng.hpp"

namespace cscore {

void ArchSpec::validate() const {
    if (input_dim == 0) throw ValidationError("input_dim must be positive");
    if (hidden.empty()) throw ValidationError("at least one hidden layer required");
    for (std::size_t w : hidden)
        if (w == 0) throw ValidationError("hidden layer width must be positive");
    if (num_classes < 2) throw ValidationError("num_classes must be >= 2");
}

std::size_t Model::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.data.size() + layer.bias.size();
    return n;
}

void Model::validate() const {
    arch.validate();
    if (layers.size() != arch.hidden.size() + 1)
        throw ValidationError("layer count does not match architecture");
    std::size_t in = arch.input_dim;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::size_t out = l < arch.hidden.size() ? arch.hidden[l] : arch.num_classes;
        if (layers[l].weights.rows != out || layers[l].weights.cols != in ||
            layers[l].bias.size() != out)
            throw ValidationError("layer " + std::to_string(l) + " shape mismatch");
        in = out;
    }
}

bool Model::operator==(const Model& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].weights != other.layers[l].weights) return false;
        if (layers[l].bias != other.layers[l].bias) return false;
    }
    return true;
}

Model init_model(const ArchSpec& arch, std::uint64_t seed) {
    arch.validate();
    Model model;
    model.arch = arch;
    Rng rng(seed);
    std::size_t in = arch.input_dim;
    for (std::size_t l = 0; l <= arch.hidden.size(); ++l) {
        const std::size_t out = l < arch.hidden.size() ? arch.hidden[l] : arch.num_classes;
        Layer layer;
        layer.weights = MatD(out, in);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
        layer.bias.assign(out, 0.0);
        model.layers.push_back(std::move(layer));
        in = out;
    }
    return model;
}

std::vector<MatD> forward_all(const Model& model, const MatD& inputs) {
    if (inputs.cols != model.arch.input_dim)
        throw ValidationError("feature dimension does not match architecture");

    std::vector<MatD> outputs;
    outputs.reserve(model.layers.size());
    const MatD* current = &inputs;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        const bool is_output = l + 1 == model.layers.size();
        MatD z(current->rows, layer.weights.rows);
        for (std::size_t i = 0; i < current->rows; ++i) {
            auto in_row = current->row(i);
            auto out_row = z.row(i);
            for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                auto w = layer.weights.row(o);
                double acc = layer.bias[o];
                for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * in_row[k];
                out_row[o] = acc;
            }
            if (is_output) {
                // stabilized softmax
                double mx = out_row[0];
                for (double v : out_row) mx = std::max(mx, v);
                double sum = 0.0;
                for (double& v : out_row) {
                    v = std::exp(v - mx);
                    sum += v;
                }
                for (double& v : out_row) v /= sum;
            } else {
                for (double& v : out_row) v = std::max(v, 0.0);
            }
        }
        outputs.push_back(std::move(z));
        current = &outputs.back();
    }
    return outputs;
}

namespace {

constexpr std::size_t kPredictChunk = 1024;

int argmax_lowest(std::span<const double> row) {
    int best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
        if (row[c] > row[best]) best = static_cast<int>(c);
    return best;
}

MatD gather_rows_double(const MatF& features, std::size_t begin, std::size_t end) {
    MatD out(end - begin, features.cols);
    for (std::size_t i = begin; i < end; ++i) {
        auto src = features.row(i);
        auto dst = out.row(i - begin);
        for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<double>(src[k]);
    }
    return out;
}

}  // namespace

Prediction predict(const Model& model, const MatF& features) {
    model.validate();
    Prediction pred;
    pred.labels.resize(features.rows);
    pred.probabilities = MatD(features.rows, model.arch.num_classes);
    for (std::size_t begin = 0; begin < features.rows; begin += kPredictChunk) {
        const std::size_t end = std::min(features.rows, begin + kPredictChunk);
        const auto outputs = forward_all(model, gather_rows_double(features, begin, end));
        const MatD& probs = outputs.back();
        for (std::size_t i = 0; i < probs.rows; ++i) {
            auto row = probs.row(i);
            std::copy(row.begin(), row.end(), pred.probabilities.row(begin + i).begin());
            pred.labels[begin + i] = argmax_lowest(row);
        }
    }
    return pred;
}

MatD penultimate(const Model& model, const MatF& features) {
    model.validate();
    const std::size_t width = model.arch.hidden.back();
    MatD out(features.rows, width);
    for (std::size_t begin = 0; begin < features.rows; begin += kPredictChunk) {
        const std::size_t end = std::min(features.rows, begin + kPredictChunk);
        const auto outputs = forward_all(model, gather_rows_double(features, begin, end));
        const MatD& hidden = outputs[outputs.size() - 2];
        for (std::size_t i = 0; i < hidden.rows; ++i) {
            auto row = hidden.row(i);
            std::copy(row.begin(), row.end(), out.row(begin + i).begin());
        }
    }
    return out;
}

namespace {

constexpr char kModelMagic[4] = {'C', 'S', 'C', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32_le(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t raw;
    std::memcpy(&raw, &f, 4);
    put_u32_le(out, raw);
}

std::uint32_t get_u32_le(const std::vector<std::uint8_t>& bytes, std::size_t& offset) {
    if (offset + 4 > bytes.size()) throw ParseError("truncated model checkpoint", bytes.size());
    std::uint32_t v = static_cast<std::uint32_t>(bytes[offset]) |
                      (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
    offset += 4;
    return v;
}

float get_f32_le(const std::vector<std::uint8_t>& bytes, std::size_t& offset) {
    std::uint32_t raw = get_u32_le(bytes, offset);
    float f;
    std::memcpy(&f, &raw, 4);
    return f;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
    model.validate();
    std::vector<std::uint8_t> bytes;
    bytes.insert(bytes.end(), kModelMagic, kModelMagic + 4);
    put_u32_le(bytes, kModelVersion);
    put_u32_le(bytes, static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        put_u32_le(bytes, static_cast<std::uint32_t>(layer.weights.rows));
        put_u32_le(bytes, static_cast<std::uint32_t>(layer.weights.cols));
    }
    for (const auto& layer : model.layers) {
        for (double w : layer.weights.data) put_f32_le(bytes, static_cast<float>(w));
        for (double b : layer.bias) put_f32_le(bytes, static_cast<float>(b));
    }
    write_binary_file(path, bytes);
}

Model load_model(const std::filesystem::path& path) {
    const auto bytes = read_binary_file(path);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0)
        throw ParseError("bad model checkpoint magic in " + path.string(), 0);
    std::size_t offset = 4;
    const std::uint32_t version = get_u32_le(bytes, offset);
    if (version != kModelVersion)
        throw ParseError("unsupported checkpoint version " + std::to_string(version), 4);
    const std::uint32_t layer_count = get_u32_le(bytes, offset);
    if (layer_count < 2) throw ParseError("checkpoint needs at least two layers", offset);

    std::vector<std::pair<std::size_t, std::size_t>> shapes(layer_count);
    for (auto& [rows, cols] : shapes) {
        rows = get_u32_le(bytes, offset);
        cols = get_u32_le(bytes, offset);
    }

    Model model;
    model.arch.input_dim = shapes.front().second;
    for (std::size_t l = 0; l + 1 < layer_count; ++l) model.arch.hidden.push_back(shapes[l].first);
    model.arch.num_classes = shapes.back().first;
    for (const auto& [rows, cols] : shapes) {
        Layer layer;
        layer.weights = MatD(rows, cols);
        for (double& w : layer.weights.data) w = get_f32_le(bytes, offset);
        layer.bias.resize(rows);
        for (double& b : layer.bias) b = get_f32_le(bytes, offset);
        model.layers.push_back(std::move(layer));
    }
    if (offset != bytes.size()) throw ParseError("trailing bytes in model checkpoint", offset);
    model.validate();
    return model;
}

}  // namespace cscore
