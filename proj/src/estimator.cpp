#include "cscore/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "json.hpp"

#include "cscore/config.hpp"
#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/rank_correlation.hpp"
#include "cscore/rng.hpp"
#include "cscore/score.hpp"
#include "cscore/thread_pool.hpp"

namespace cscore {

void MaskMatrix::validate() const {
    if (included.rows != runs || included.cols != examples)
        throw ValidationError("mask matrix shape mismatch");
    for (std::size_t i = 0; i < runs; ++i) {
        std::size_t row_sum = 0;
        for (std::size_t j = 0; j < examples; ++j) {
            const std::uint8_t v = included.at(i, j);
            if (v > 1) throw ValidationError("mask entries must be 0 or 1");
            row_sum += v;
        }
        if (row_sum != subset_size)
            throw ValidationError("mask row " + std::to_string(i) + " sums to " +
                                  std::to_string(row_sum) + ", expected " +
                                  std::to_string(subset_size));
    }
}

MaskMatrix sample_subsets(std::size_t n_examples, std::size_t subset_size, std::size_t runs,
                          std::uint64_t seed) {
    if (subset_size == 0 || subset_size > n_examples)
        throw ValidationError("subset size must be in [1, N]");
    if (runs < 1) throw ValidationError("need at least one run");

    MaskMatrix mask;
    mask.runs = runs;
    mask.examples = n_examples;
    mask.subset_size = subset_size;
    mask.included = Mat<std::uint8_t>(runs, n_examples, 0);
    for (std::size_t i = 0; i < runs; ++i) {
        Rng rng(derive_seed(seed, "subset-row", i));
        for (std::size_t idx : rng.sample_without_replacement(n_examples, subset_size))
            mask.included.at(i, idx) = 1;
    }
    return mask;
}

RunBatch run_holdout(const Dataset& dataset, double ratio, std::size_t runs,
                     const TrainerConfig& config, std::uint64_t seed, unsigned jobs) {
    dataset.validate();
    if (ratio <= 0.0 || ratio > 1.0) throw ValidationError("subset ratio must be in (0, 1]");
    const std::size_t n = dataset.size();
    const auto subset_size = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    if (subset_size == 0) throw ValidationError("subset size rounds to zero");

    RunBatch batch;
    batch.ratio = ratio;
    batch.mask = sample_subsets(n, subset_size, runs, derive_seed(seed, "subsets", 0));
    batch.loss.runs = runs;
    batch.loss.examples = n;
    batch.loss.miss = Mat<std::uint8_t>(runs, n, 0);
    batch.run_seeds.resize(runs);
    for (std::size_t i = 0; i < runs; ++i) batch.run_seeds[i] = derive_seed(seed, "run", i);
    batch.config_digest = trainer_config_digest(config);

    const ArchSpec arch = resolved_arch(config, dataset);

    parallel_for(runs, jobs, [&](std::size_t i) {
        try {
            std::vector<std::size_t> subset;
            subset.reserve(subset_size);
            for (std::size_t j = 0; j < n; ++j)
                if (batch.mask.included.at(i, j)) subset.push_back(j);

            OptimizerConfig optimizer = config.optimizer;
            optimizer.seed = derive_seed(batch.run_seeds[i], "train", 0);
            const Model initial = init_model(arch, derive_seed(batch.run_seeds[i], "init", 0));
            const TrainResult trained =
                train(initial, dataset, subset, optimizer, config.schedule, {});

            const Prediction pred = predict(trained.model, dataset.features);
            for (std::size_t j = 0; j < n; ++j)
                batch.loss.miss.at(i, j) = pred.labels[j] != dataset.labels[j] ? 1 : 0;
        } catch (const Error& e) {
            throw Error("holdout run " + std::to_string(i) + ": " + e.what());
        }
    });
    return batch;
}

std::vector<double> aggregate_scores(const MaskMatrix& mask, const LossMatrix& loss) {
    if (mask.runs != loss.runs || mask.examples != loss.examples)
        throw ValidationError("mask and loss matrices have different shapes");

    std::vector<double> scores(mask.examples);
    for (std::size_t j = 0; j < mask.examples; ++j) {
        std::size_t held_out = 0, correct = 0;
        for (std::size_t i = 0; i < mask.runs; ++i) {
            if (mask.included.at(i, j)) continue;
            ++held_out;
            if (loss.miss.at(i, j) == 0) ++correct;
        }
        scores[j] = held_out == 0
                        ? undefined_score()
                        : static_cast<double>(correct) / static_cast<double>(held_out);
    }
    return scores;
}

ConsistencyProfile build_profile(std::span<const RunBatch> batches) {
    if (batches.empty()) throw ValidationError("no run batches");
    const std::size_t n = batches.front().mask.examples;
    for (const auto& batch : batches)
        if (batch.mask.examples != n)
            throw ValidationError("run batches cover different example counts");

    std::vector<std::size_t> order(batches.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return batches[a].ratio < batches[b].ratio;
    });

    ConsistencyProfile profile;
    profile.scores = MatD(batches.size(), n);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& batch = batches[order[r]];
        profile.ratios.push_back(batch.ratio);
        const auto row = aggregate_scores(batch.mask, batch.loss);
        std::copy(row.begin(), row.end(), profile.scores.row(r).begin());
    }
    return profile;
}

ScoreTable integral_cscore(const ConsistencyProfile& profile, std::span<const int> labels,
                           ScoreProvenance provenance) {
    if (profile.ratios.empty()) throw ValidationError("empty profile");
    if (labels.size() != profile.scores.cols)
        throw ValidationError("label count does not match profile width");

    ScoreTable table;
    table.labels.assign(labels.begin(), labels.end());
    table.provenance = std::move(provenance);
    table.scores.resize(profile.scores.cols);
    for (std::size_t j = 0; j < profile.scores.cols; ++j) {
        double sum = 0.0;
        std::size_t defined = 0;
        for (std::size_t r = 0; r < profile.scores.rows; ++r) {
            const double v = profile.scores.at(r, j);
            if (score_defined(v)) {
                sum += v;
                ++defined;
            }
        }
        table.scores[j] =
            defined == 0 ? undefined_score() : sum / static_cast<double>(defined);
    }
    return table;
}

std::vector<PointEstimatePoint> point_estimate_curve(const ConsistencyProfile& profile,
                                                     const ScoreTable& reference) {
    if (reference.size() != profile.scores.cols)
        throw ValidationError("reference scores do not match profile width");

    std::vector<PointEstimatePoint> curve;
    curve.reserve(profile.ratios.size());
    for (std::size_t r = 0; r < profile.ratios.size(); ++r) {
        PointEstimatePoint point;
        point.ratio = profile.ratios[r];
        std::span<const double> row(profile.scores.row(r).data(), profile.scores.cols);
        try {
            point.rho = spearman(row, reference.scores).value;
        } catch (const ValidationError&) {
            point.rho = undefined_score();  // < 3 joint pairs or a constant row
        }
        curve.push_back(point);
    }
    return curve;
}

RunBatch select_runs(const RunBatch& batch, std::span<const std::size_t> rows) {
    RunBatch out;
    out.ratio = batch.ratio;
    out.config_digest = batch.config_digest;
    out.mask.runs = rows.size();
    out.mask.examples = batch.mask.examples;
    out.mask.subset_size = batch.mask.subset_size;
    out.mask.included = Mat<std::uint8_t>(rows.size(), batch.mask.examples);
    out.loss.runs = rows.size();
    out.loss.examples = batch.loss.examples;
    out.loss.miss = Mat<std::uint8_t>(rows.size(), batch.loss.examples);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= batch.mask.runs) throw ValidationError("run index out of range");
        auto src_mask = batch.mask.included.row(rows[r]);
        auto src_loss = batch.loss.miss.row(rows[r]);
        std::copy(src_mask.begin(), src_mask.end(), out.mask.included.row(r).begin());
        std::copy(src_loss.begin(), src_loss.end(), out.loss.miss.row(r).begin());
        out.run_seeds.push_back(batch.run_seeds.empty() ? 0 : batch.run_seeds[rows[r]]);
    }
    return out;
}

std::vector<SensitivityPoint> sensitivity_curve(const RunBatch& batch,
                                                std::span<const std::size_t> m_list,
                                                std::size_t repeats,
                                                std::span<const double> reference_scores,
                                                std::uint64_t seed) {
    if (repeats == 0) throw ValidationError("repeats must be >= 1");
    if (reference_scores.size() != batch.mask.examples)
        throw ValidationError("reference scores do not match batch width");
    for (std::size_t m : m_list)
        if (m == 0 || m > batch.mask.runs)
            throw ValidationError("model count " + std::to_string(m) +
                                  " exceeds the available disjoint runs");

    std::vector<SensitivityPoint> points;
    points.reserve(m_list.size());
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
        const std::size_t m = m_list[mi];
        std::vector<double> rhos;
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            Rng rng(derive_seed(seed, "sensitivity", mi * 1000003 + rep));
            auto rows = rng.sample_without_replacement(batch.mask.runs, m);
            std::sort(rows.begin(), rows.end());
            const RunBatch sub = select_runs(batch, rows);
            const auto scores = aggregate_scores(sub.mask, sub.loss);
            try {
                rhos.push_back(spearman(scores, reference_scores).value);
            } catch (const ValidationError&) {
                // skip undefined samples (too few joint entries / constant)
            }
        }
        if (rhos.empty())
            throw ValidationError("no defined correlation at m = " + std::to_string(m));
        double mean = 0.0;
        for (double r : rhos) mean += r;
        mean /= static_cast<double>(rhos.size());
        double var = 0.0;
        for (double r : rhos) var += (r - mean) * (r - mean);
        var /= static_cast<double>(rhos.size());
        points.push_back({m, mean, std::sqrt(var)});
    }
    return points;
}

void export_scores(const ScoreTable& table, const std::filesystem::path& path) {
    if (table.labels.size() != table.scores.size())
        throw ValidationError("score table labels and scores differ in length");
    std::string csv = "index,label,score\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        csv += std::to_string(i);
        csv += ',';
        csv += std::to_string(table.labels[i]);
        csv += ',';
        csv += format_double(table.scores[i]);
        csv += '\n';
    }
    write_text_file(path, csv);
}

ScoreTable import_scores(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "index,label,score")
        throw ParseError("score CSV missing 'index,label,score' header", 1);

    ScoreTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3) throw ParseError("expected 3 fields", i + 1);
        if (parse_int_field(fields[0], i + 1) != static_cast<long long>(i - 1))
            throw ParseError("score rows out of order", i + 1);
        table.labels.push_back(static_cast<int>(parse_int_field(fields[1], i + 1)));
        table.scores.push_back(parse_double_field(fields[2], i + 1));
    }
    return table;
}

namespace {

std::string binary_matrix_csv(const Mat<std::uint8_t>& m) {
    std::string csv;
    for (std::size_t j = 0; j < m.cols; ++j) {
        if (j) csv += ',';
        csv += std::to_string(j);
    }
    csv += '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) csv += ',';
            csv += m.at(i, j) ? '1' : '0';
        }
        csv += '\n';
    }
    return csv;
}

Mat<std::uint8_t> parse_binary_matrix_csv(const std::string& text, const std::string& name) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(name + " is empty", 1);
    const std::size_t cols = split_csv_line(lines[0]).size();
    Mat<std::uint8_t> m(lines.size() - 1, cols);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != cols) throw ParseError(name + ": ragged row", i + 1);
        for (std::size_t j = 0; j < cols; ++j) {
            if (fields[j] == "0")
                m.at(i - 1, j) = 0;
            else if (fields[j] == "1")
                m.at(i - 1, j) = 1;
            else
                throw ParseError(name + ": entries must be 0 or 1", i + 1);
        }
    }
    return m;
}

}  // namespace

void save_run_batch(const RunBatch& batch, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "mask.csv", binary_matrix_csv(batch.mask.included));
    write_text_file(dir / "loss.csv", binary_matrix_csv(batch.loss.miss));

    nlohmann::json meta;
    meta["ratio"] = batch.ratio;
    meta["runs"] = batch.mask.runs;
    meta["subset_size"] = batch.mask.subset_size;
    meta["seeds"] = batch.run_seeds;
    meta["config_digest"] = batch.config_digest;
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

void save_profile_csv(const ConsistencyProfile& profile, const std::filesystem::path& path) {
    std::string csv = "ratio";
    for (std::size_t j = 0; j < profile.scores.cols; ++j) {
        csv += ',';
        csv += std::to_string(j);
    }
    csv += '\n';
    for (std::size_t r = 0; r < profile.ratios.size(); ++r) {
        csv += format_double(profile.ratios[r]);
        for (std::size_t j = 0; j < profile.scores.cols; ++j) {
            csv += ',';
            csv += format_double(profile.scores.at(r, j));
        }
        csv += '\n';
    }
    write_text_file(path, csv);
}

ConsistencyProfile load_profile_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("profile CSV is empty", 1);
    const std::size_t cols = split_csv_line(lines[0]).size();
    if (cols < 2) throw ParseError("profile CSV has no example columns", 1);

    ConsistencyProfile profile;
    profile.scores = MatD(lines.size() - 1, cols - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != cols) throw ParseError("ragged profile row", r + 1);
        profile.ratios.push_back(parse_double_field(fields[0], r + 1));
        for (std::size_t j = 1; j < cols; ++j)
            profile.scores.at(r - 1, j - 1) = parse_double_field(fields[j], r + 1);
    }
    return profile;
}

RunBatch load_run_batch(const std::filesystem::path& dir) {
    RunBatch batch;
    const auto meta = nlohmann::json::parse(read_text_file(dir / "meta.json"));
    batch.ratio = meta.at("ratio").get<double>();
    batch.run_seeds = meta.at("seeds").get<std::vector<std::uint64_t>>();
    batch.config_digest = meta.at("config_digest").get<std::string>();

    batch.mask.included = parse_binary_matrix_csv(read_text_file(dir / "mask.csv"), "mask.csv");
    batch.mask.runs = batch.mask.included.rows;
    batch.mask.examples = batch.mask.included.cols;
    batch.mask.subset_size = meta.at("subset_size").get<std::size_t>();
    batch.mask.validate();

    batch.loss.miss = parse_binary_matrix_csv(read_text_file(dir / "loss.csv"), "loss.csv");
    batch.loss.runs = batch.loss.miss.rows;
    batch.loss.examples = batch.loss.miss.cols;
    if (batch.loss.runs != batch.mask.runs || batch.loss.examples != batch.mask.examples)
        throw ParseError("mask.csv and loss.csv shapes differ in " + dir.string(), 1);
    if (meta.at("runs").get<std::size_t>() != batch.mask.runs)
        throw ParseError("meta.json run count does not match mask.csv", 1);
    return batch;
}

}  // namespace cscore
