#include <string>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/proxies.hpp"

namespace cscore {

std::string proxy_kind_name(ProxyKind kind) {
    switch (kind) {
        case ProxyKind::kernel_density: return "C_plain";
        case ProxyKind::kernel_same_class: return "C_L";
        case ProxyKind::kernel_signed: return "C_pm_L";
        case ProxyKind::lof: return "C_LOF";
        case ProxyKind::cumulative_accuracy: return "cum_acc";
        case ProxyKind::cumulative_true_class_prob: return "cum_pL";
        case ProxyKind::cumulative_max_prob: return "cum_pmax";
        case ProxyKind::cumulative_entropy: return "cum_entropy";
        case ProxyKind::forgetting: return "forgetting";
    }
    throw ValidationError("unknown proxy kind");
}

ProxyKind proxy_kind_from_name(const std::string& name) {
    for (ProxyKind kind : {ProxyKind::kernel_density, ProxyKind::kernel_same_class,
                           ProxyKind::kernel_signed, ProxyKind::lof,
                           ProxyKind::cumulative_accuracy, ProxyKind::cumulative_true_class_prob,
                           ProxyKind::cumulative_max_prob, ProxyKind::cumulative_entropy,
                           ProxyKind::forgetting}) {
        if (proxy_kind_name(kind) == name) return kind;
    }
    throw ValidationError("unknown proxy kind name '" + name + "'");
}

ProxyScores learning_speed_scores(const TrainingTrace& trace, ProxyKind kind,
                                  std::size_t up_to_epoch) {
    if (trace.epochs() == 0) throw ValidationError("empty training trace");
    if (up_to_epoch == 0) up_to_epoch = trace.epochs();
    if (up_to_epoch > trace.epochs())
        throw ValidationError("up_to_epoch exceeds trace length");

    const std::size_t width = trace.eval_indices.size();
    ProxyScores proxy;
    proxy.kind = kind;
    proxy.indices = trace.eval_indices;
    proxy.values.assign(width, 0.0);
    proxy.orientation = kind == ProxyKind::cumulative_entropy ? -1 : +1;

    const double inv = 1.0 / static_cast<double>(up_to_epoch);
    for (std::size_t j = 0; j < width; ++j) {
        double sum = 0.0;
        for (std::size_t e = 0; e < up_to_epoch; ++e) {
            switch (kind) {
                case ProxyKind::cumulative_accuracy:
                    sum += trace.correct.at(e, j);
                    break;
                case ProxyKind::cumulative_true_class_prob:
                    sum += trace.prob_correct.at(e, j);
                    break;
                case ProxyKind::cumulative_max_prob:
                    sum += trace.prob_max.at(e, j);
                    break;
                case ProxyKind::cumulative_entropy:
                    sum += trace.entropy.at(e, j);
                    break;
                default:
                    throw ValidationError("not a learning-speed proxy kind");
            }
        }
        proxy.values[j] = proxy.orientation * sum * inv;
    }
    return proxy;
}

ProxyScores forgetting_counts(const TrainingTrace& trace) {
    if (trace.epochs() == 0) throw ValidationError("empty training trace");

    ProxyScores proxy;
    proxy.kind = ProxyKind::forgetting;
    proxy.indices = trace.eval_indices;
    proxy.orientation = -1;
    proxy.values.assign(trace.eval_indices.size(), 0.0);
    for (std::size_t j = 0; j < trace.eval_indices.size(); ++j) {
        int events = 0;
        for (std::size_t e = 0; e + 1 < trace.epochs(); ++e)
            if (trace.correct.at(e, j) == 1 && trace.correct.at(e + 1, j) == 0) ++events;
        proxy.values[j] = -static_cast<double>(events);
    }
    return proxy;
}

ProxyScores kernel_proxy(ProxyKind kind, const KernelScores& scores, std::size_t n_examples) {
    const std::vector<double>* values = nullptr;
    switch (kind) {
        case ProxyKind::kernel_density: values = &scores.density; break;
        case ProxyKind::kernel_same_class: values = &scores.same_class; break;
        case ProxyKind::kernel_signed: values = &scores.signed_diff; break;
        default: throw ValidationError("not a kernel proxy kind");
    }
    if (values->size() != n_examples)
        throw ValidationError("kernel score length mismatch");
    ProxyScores proxy;
    proxy.kind = kind;
    proxy.values = *values;
    proxy.indices.resize(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) proxy.indices[i] = i;
    return proxy;
}

ProxyScores lof_proxy(const std::vector<double>& negated_lof) {
    ProxyScores proxy;
    proxy.kind = ProxyKind::lof;
    proxy.orientation = -1;  // raw LOF points at outliers; scores arrive negated
    proxy.values = negated_lof;
    proxy.indices.resize(negated_lof.size());
    for (std::size_t i = 0; i < negated_lof.size(); ++i) proxy.indices[i] = i;
    return proxy;
}

void save_proxy_csv(const ProxyScores& proxy, const std::filesystem::path& path) {
    std::string csv = "index,kind,score,orientation\n";
    const std::string kind = proxy_kind_name(proxy.kind);
    for (std::size_t i = 0; i < proxy.values.size(); ++i) {
        csv += std::to_string(proxy.indices[i]);
        csv += ',';
        csv += kind;
        csv += ',';
        csv += format_double(proxy.values[i]);
        csv += ',';
        csv += std::to_string(proxy.orientation);
        csv += '\n';
    }
    write_text_file(path, csv);
}

ProxyScores load_proxy_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "index,kind,score,orientation")
        throw ParseError("proxy CSV missing header", 1);
    if (lines.size() < 2) throw ParseError("proxy CSV has no rows", 1);

    ProxyScores proxy;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4) throw ParseError("expected 4 fields", i + 1);
        proxy.indices.push_back(static_cast<std::size_t>(parse_int_field(fields[0], i + 1)));
        const ProxyKind kind = proxy_kind_from_name(std::string(fields[1]));
        const int orientation = static_cast<int>(parse_int_field(fields[3], i + 1));
        if (i == 1) {
            proxy.kind = kind;
            proxy.orientation = orientation;
        } else if (kind != proxy.kind || orientation != proxy.orientation) {
            throw ParseError("mixed proxy kinds in one file", i + 1);
        }
        proxy.values.push_back(parse_double_field(fields[2], i + 1));
    }
    return proxy;
}

}  // namespace cscore
