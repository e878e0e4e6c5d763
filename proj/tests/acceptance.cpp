// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is zero only if
// all criteria pass. Heavier criteria share one benchmark pipeline run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cscore/analysis.hpp"
#include "cscore/config.hpp"
#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/estimator.hpp"
#include "cscore/idx.hpp"
#include "cscore/proxies.hpp"
#include "cscore/rank_correlation.hpp"
#include "cscore/rng.hpp"
#include "cscore/score.hpp"
#include "cscore/trainer.hpp"

#include "oracles.hpp"

#ifndef CSCORE_SOURCE_DIR
#error "CSCORE_SOURCE_DIR must point at the repository root"
#endif

namespace fs = std::filesystem;
using namespace cscore;

namespace {

const fs::path kSourceDir = CSCORE_SOURCE_DIR;

struct CheckFailure {
    std::string message;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw CheckFailure{message};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// shared benchmark pipeline (criteria 6, 7, 9, 10, 12)

struct BenchRun {
    Dataset dataset;
    std::vector<RunBatch> batches;
    ConsistencyProfile profile;
    ScoreTable scores;
    TrainingTrace trace;  // one full-dataset training run
};

TrainingTrace full_data_trace(const Dataset& dataset, const TrainerConfig& trainer,
                              std::uint64_t master_seed) {
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), 0);
    const ArchSpec arch = resolved_arch(trainer, dataset);
    OptimizerConfig optimizer = trainer.optimizer;
    // same derivation chain the CLI proxy stage uses
    const std::uint64_t seed = derive_seed(master_seed, "proxy-train", 0);
    optimizer.seed = derive_seed(seed, "train", 0);
    const Model initial = init_model(arch, derive_seed(seed, "init", 0));
    return train(initial, dataset, all, optimizer, trainer.schedule, all).trace;
}

BenchRun run_bench_pipeline(const RunConfig& config) {
    BenchRun bench;
    bench.dataset = materialize_dataset(config.dataset, config.master_seed);
    const auto& est = config.estimator;
    for (std::size_t r = 0; r < est.ratios.size(); ++r) {
        bench.batches.push_back(run_holdout(bench.dataset, est.ratios[r], est.runs_per_ratio,
                                            est.trainer,
                                            derive_seed(config.master_seed, "ratio", r)));
    }
    bench.profile = build_profile(bench.batches);
    ScoreProvenance provenance;
    provenance.ratios = bench.profile.ratios;
    provenance.runs_per_ratio = est.runs_per_ratio;
    provenance.master_seed = config.master_seed;
    provenance.config_digest = trainer_config_digest(est.trainer);
    bench.scores = integral_cscore(bench.profile, bench.dataset.labels, provenance);
    bench.trace = full_data_trace(bench.dataset, est.trainer, config.master_seed);
    return bench;
}

struct SharedState {
    RunConfig bench_config;
    RunConfig flip25_config;
    std::unique_ptr<BenchRun> bench;
    std::unique_ptr<TrainingTrace> flip25_trace;
    std::unique_ptr<Dataset> flip25_dataset;

    const BenchRun& get_bench() {
        if (!bench) bench = std::make_unique<BenchRun>(run_bench_pipeline(bench_config));
        return *bench;
    }

    void get_flip25(const Dataset** dataset, const TrainingTrace** trace) {
        if (!flip25_trace) {
            flip25_dataset = std::make_unique<Dataset>(
                materialize_dataset(flip25_config.dataset, flip25_config.master_seed));
            flip25_trace = std::make_unique<TrainingTrace>(full_data_trace(
                *flip25_dataset, flip25_config.estimator.trainer, flip25_config.master_seed));
        }
        *dataset = flip25_dataset.get();
        *trace = flip25_trace.get();
    }
};

SharedState shared;

// per-mode example groups of the synthetic benchmark; "dense" covers the
// heavily populated modes (at least half the largest population), "sparse"
// the thin satellite modes
struct BenchGroups {
    std::vector<std::size_t> dense, sparse, flipped;
};

BenchGroups bench_groups(const SyntheticSpec& spec, const Dataset& dataset) {
    const auto layout = mode_layout(spec);
    std::size_t largest = 0;
    for (const ModeSpan& span : layout) largest = std::max(largest, span.count);

    BenchGroups groups;
    const auto& mask = *dataset.corruption_mask;
    for (const ModeSpan& span : layout) {
        const bool dense_mode = span.count * 2 >= largest;
        for (std::size_t i = span.begin; i < span.begin + span.count; ++i) {
            if (mask[i]) {
                groups.flipped.push_back(i);
            } else if (dense_mode) {
                groups.dense.push_back(i);
            } else {
                groups.sparse.push_back(i);
            }
        }
    }
    return groups;
}

double group_mean(const std::vector<double>& scores, const std::vector<std::size_t>& ids) {
    double sum = 0;
    std::size_t defined = 0;
    for (std::size_t i : ids) {
        if (!score_defined(scores[i])) continue;
        sum += scores[i];
        ++defined;
    }
    require(defined > 0, "group has no defined scores");
    return sum / double(defined);
}

std::uint64_t file_hash(const fs::path& path) {
    const auto bytes = read_binary_file(path);
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

// ---------------------------------------------------------------------------
// criteria

std::string criterion_1() {
    Rng rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t runs = 1 + rng.below(8);
        const std::size_t examples = 1 + rng.below(12);
        MaskMatrix mask;
        mask.runs = runs;
        mask.examples = examples;
        mask.included = Mat<std::uint8_t>(runs, examples);
        LossMatrix loss;
        loss.runs = runs;
        loss.examples = examples;
        loss.miss = Mat<std::uint8_t>(runs, examples);
        for (auto& v : mask.included.data) v = std::uint8_t(rng.below(2));
        for (auto& v : loss.miss.data) v = std::uint8_t(rng.below(2));

        const auto fast = aggregate_scores(mask, loss);
        const auto slow = oracle::holdout_scores(mask, loss);
        for (std::size_t j = 0; j < examples; ++j) {
            require(score_defined(fast[j]) == score_defined(slow[j]),
                    "definedness mismatch at trial " + std::to_string(trial));
            if (score_defined(fast[j]))
                require(fast[j] == slow[j], "score mismatch at trial " + std::to_string(trial));
        }
    }
    return "1000 random mask/loss pairs match the brute-force loop exactly";
}

std::string criterion_2() {
    Rng rng(1002);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(199);
        const std::size_t d = 1 + rng.below(16);
        PointSet set;
        set.points = MatD(n, d);
        for (auto& v : set.points.data) v = rng.uniform(-2.0, 2.0);
        set.labels.resize(n);
        for (auto& l : set.labels) l = int(rng.below(4));
        const double h = 0.5 + rng.uniform(0.0, 1.5);

        const KernelScores scores = kernel_scores(set, h);
        for (std::size_t j = 0; j < n; ++j) {
            const double identity =
                std::abs(scores.signed_diff[j] - (2.0 * scores.same_class[j] - scores.density[j]));
            worst = std::max(worst, identity);
            require(identity <= 1e-9, "kernel identity violated: " + fmt(identity));
            require(scores.same_class[j] >= 0.0, "same-class score negative");
            require(scores.same_class[j] <= scores.density[j] + 1e-12, "C_L > C");
            require(scores.density[j] <= 1.0 + 1e-12, "density above 1");
        }
    }
    return "identity and bounds hold on 100 point sets (worst deviation " + fmt(worst) + ")";
}

std::string criterion_3() {
    Rng rng(1003);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(4);
        const std::size_t n = k + 2 + rng.below(14 - k);  // <= 15
        MatD points(n, 2);
        if (trial % 2 == 0) {
            // low-resolution grid: distance ties and duplicate stacks
            for (auto& v : points.data) v = double(rng.below(4));
        } else {
            for (auto& v : points.data) v = rng.uniform(-1.0, 1.0);
        }
        const auto fast = lof_scores(points, k);
        const auto reference = oracle::lof(points, k);
        for (std::size_t i = 0; i < n; ++i)
            require(fast[i] == -reference[i],
                    "LOF mismatch at trial " + std::to_string(trial) + ", point " +
                        std::to_string(i));
    }
    return "200 point sets (ties included) match brute-force LOF exactly";
}

std::string criterion_4() {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 3, 2, 4};
    require(spearman(a, b).value == 0.8, "spearman fixture != 0.8");

    const std::vector<double> c{1, 2, 3};
    const std::vector<double> d{1, 3, 2};
    require(kendall(c, d).value == 1.0 / 3.0, "kendall fixture != 1/3");

    Rng rng(1004);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(48);
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = double(rng.below(8));
        for (auto& v : y) v = double(rng.below(8));
        double reference;
        try {
            reference = oracle::kendall_tau_b(x, y);
        } catch (...) {
            continue;
        }
        if (!std::isfinite(reference)) continue;
        require(kendall(x, y).value == reference,
                "tau-b mismatch at trial " + std::to_string(trial));
    }
    return "rho = 0.8 and tau = 1/3 fixtures exact; tau-b matches all-pairs brute force";
}

std::string criterion_5() {
    double worst = 0;
    for (const ArchSpec& arch : {ArchSpec{1, {1}, 2}, ArchSpec{2, {2}, 3}}) {
        Model model = init_model(arch, 1005);
        for (auto& layer : model.layers)
            for (double& b : layer.bias) b = 0.05;  // keep off the ReLU kink

        MatD inputs(4, arch.input_dim);
        std::vector<int> labels(4);
        Rng rng(1006);
        for (auto& x : inputs.data) x = rng.uniform(-1.5, 1.5);
        for (auto& l : labels) l = int(rng.below(arch.num_classes));

        const LossGradient grad = loss_and_gradient(model, inputs, labels, 0.01);
        const double h = 1e-5;
        auto probe = [&](double* param, double analytic) {
            const double saved = *param;
            *param = saved + h;
            const double up = loss_and_gradient(model, inputs, labels, 0.01).loss;
            *param = saved - h;
            const double down = loss_and_gradient(model, inputs, labels, 0.01).loss;
            *param = saved;
            const double numeric = (up - down) / (2 * h);
            const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            worst = std::max(worst, std::abs(analytic - numeric) / scale);
        };
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            for (std::size_t k = 0; k < model.layers[l].weights.data.size(); ++k)
                probe(&model.layers[l].weights.data[k], grad.weight_grads[l].data[k]);
            for (std::size_t k = 0; k < model.layers[l].bias.size(); ++k)
                probe(&model.layers[l].bias[k], grad.bias_grads[l][k]);
        }
    }
    require(worst < 1e-4, "gradient relative error " + fmt(worst));

    // deterministic retrain
    SyntheticSpec spec;
    spec.modes_per_class = {{{{-2.0, 0.0}, 0.8, 25}}, {{{2.0, 0.0}, 0.8, 25}}};
    spec.seed = 1007;
    const Dataset ds = generate_synthetic(spec);
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    OptimizerConfig opt;
    opt.epochs = 6;
    opt.seed = 1008;
    const Model model = init_model({2, {8}, 2}, 1009);
    const TrainResult first = train(model, ds, all, opt, ScheduleSpec{}, all);
    const TrainResult second = train(model, ds, all, opt, ScheduleSpec{}, all);
    require(first.model == second.model, "retrain produced different weights");
    require(first.trace.prob_correct.data == second.trace.prob_correct.data,
            "retrain produced a different trace");

    return "analytic vs central-difference gradients: worst relative error " + fmt(worst);
}

std::string criterion_6() {
    const BenchRun& bench = shared.get_bench();
    SyntheticSpec spec = shared.bench_config.dataset.synthetic;
    const BenchGroups groups = bench_groups(spec, bench.dataset);

    const double dense = group_mean(bench.scores.scores, groups.dense);
    const double sparse = group_mean(bench.scores.scores, groups.sparse);
    const double flipped = group_mean(bench.scores.scores, groups.flipped);
    const std::string means =
        "dense " + fmt(dense) + ", sparse " + fmt(sparse) + ", flipped " + fmt(flipped);

    // regenerating the frozen fixture (after an intentional benchmark change):
    // set CSCORE_ACCEPT_DUMP to a directory and copy the file into
    // tests/fixtures/
    if (const char* dump = std::getenv("CSCORE_ACCEPT_DUMP")) {
        fs::create_directories(dump);
        export_scores(bench.scores, fs::path(dump) / "bench_scores_oracle.csv");
    }

    require(dense - sparse > 0.05,
            "dense-sparse margin " + fmt(dense - sparse) + " below 0.05 (" + means + ")");
    require(sparse - flipped > 0.05,
            "sparse-flipped margin " + fmt(sparse - flipped) + " below 0.05 (" + means + ")");

    // agreement with the committed oracle-run fixture
    const fs::path fixture = kSourceDir / "tests" / "fixtures" / "bench_scores_oracle.csv";
    require(fs::exists(fixture), "missing fixture " + fixture.string());
    const ScoreTable frozen = import_scores(fixture);
    require(frozen.size() == bench.scores.size(), "fixture size mismatch");
    const double agreement = spearman(bench.scores.scores, frozen.scores).value;
    require(agreement >= 0.95, "fixture agreement " + fmt(agreement) + " below 0.95");

    return "mean C-scores " + means + "; fixture agreement " + fmt(agreement);
}

std::string criterion_7() {
    const BenchRun& bench = shared.get_bench();
    const ProxyScores proxy =
        learning_speed_scores(bench.trace, ProxyKind::cumulative_true_class_prob);
    std::vector<double> reference(proxy.values.size());
    for (std::size_t i = 0; i < proxy.indices.size(); ++i)
        reference[i] = bench.scores.scores[proxy.indices[i]];
    const double rho = spearman(proxy.values, reference).value;
    require(rho >= 0.7, "rho(cum_pL, C-score) = " + fmt(rho) + " below 0.7");
    return "Spearman rho(cum_pL, C-score) = " + fmt(rho);
}

std::string criterion_8() {
    const Dataset* dataset = nullptr;
    const TrainingTrace* trace = nullptr;
    shared.get_flip25(&dataset, &trace);
    require(dataset->corruption_mask.has_value(), "flip25 dataset lacks a corruption mask");

    const double gamma = 0.25;
    const ProxyScores p_l = learning_speed_scores(*trace, ProxyKind::cumulative_true_class_prob);
    const ProxyScores acc = learning_speed_scores(*trace, ProxyKind::cumulative_accuracy);
    const double rate_pl = detection_rate(p_l, *dataset->corruption_mask, gamma);
    const double rate_acc = detection_rate(acc, *dataset->corruption_mask, gamma);
    require(rate_pl >= 0.90, "cum_pL detection rate " + fmt(rate_pl) + " below 0.90");
    require(rate_acc >= 0.90, "cum_acc detection rate " + fmt(rate_acc) + " below 0.90");
    return "detection rates at gamma=0.25: cum_pL " + fmt(rate_pl) + ", cum_acc " + fmt(rate_acc);
}

std::string criterion_9() {
    const BenchRun& bench = shared.get_bench();

    TrainerConfig cheap;
    cheap.arch.hidden = {16};
    cheap.optimizer.learning_rate = 0.1;
    cheap.optimizer.momentum = 0.9;
    cheap.optimizer.batch_size = 32;
    cheap.optimizer.epochs = 12;
    cheap.schedule.kind = ScheduleKind::triangular;
    cheap.schedule.warmup_fraction = 0.15;

    const RunBatch all_runs =
        run_holdout(bench.dataset, 0.3, 200, cheap, derive_seed(1010, "sensitivity-batch", 0));

    std::vector<std::size_t> first_half(100), second_half(100);
    std::iota(first_half.begin(), first_half.end(), 0);
    std::iota(second_half.begin(), second_half.end(), 100);
    const RunBatch sample_pool = select_runs(all_runs, first_half);
    const RunBatch reference_runs = select_runs(all_runs, second_half);
    const auto reference = aggregate_scores(reference_runs.mask, reference_runs.loss);

    const std::size_t m_list[] = {1, 4, 16, 64, 100};
    const auto curve = sensitivity_curve(sample_pool, m_list, 10, reference, 1011);

    std::size_t inversions = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        if (curve[i + 1].mean_rho < curve[i].mean_rho) ++inversions;
    require(inversions <= 1, std::to_string(inversions) + " inversions in the mean-rho trend");
    require(curve.back().mean_rho > curve[1].mean_rho,
            "rho(m=100) = " + fmt(curve.back().mean_rho) + " not above rho(m=4) = " +
                fmt(curve[1].mean_rho));

    std::ostringstream detail;
    detail << "mean rho over m={1,4,16,64,100}:";
    for (const auto& point : curve) detail << " " << fmt(point.mean_rho);
    return detail.str();
}

std::string criterion_10() {
    const BenchRun& bench = shared.get_bench();
    const auto curve = point_estimate_curve(bench.profile, bench.scores);
    require(curve.size() >= 3, "need at least 3 ratios");
    std::size_t best = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        require(score_defined(curve[i].rho), "undefined correlation at ratio " +
                                                 fmt(curve[i].ratio));
        if (curve[i].rho > curve[best].rho) best = i;
    }
    require(best != 0 && best != curve.size() - 1,
            "peak at boundary ratio " + fmt(curve[best].ratio));
    std::ostringstream detail;
    detail << "per-ratio rho:";
    for (const auto& point : curve) detail << " " << fmt(point.rho);
    detail << "; peak at s = " << fmt(curve[best].ratio);
    return detail.str();
}

std::string criterion_11() {
    const fs::path dir = kSourceDir / "tests" / "fixtures" / "idx";

    const IdxTensor images = load_idx_file(dir / "images_4.idx");
    require(images.shape == std::vector<std::size_t>{4, 2, 2}, "image fixture shape");
    const std::vector<std::uint8_t> expected_pixels{0,   255, 128, 64, 10, 20, 30, 40,
                                                    1,   2,   3,   4,  200, 100, 50, 25};
    require(images.values == expected_pixels, "image fixture bytes");

    const IdxTensor labels = load_idx_file(dir / "labels_4.idx");
    require(labels.values == std::vector<std::uint8_t>{7, 2, 1, 0}, "label fixture bytes");

    const Dataset ds = dataset_from_idx(images, labels);
    require(ds.size() == 4 && ds.dim() == 4, "fixture dataset shape");
    require(ds.features.at(0, 1) == 1.0f, "scaling of 255");
    require(ds.features.at(0, 2) == float(128.0 / 255.0), "scaling of 128");

    bool truncated_ok = false;
    try {
        load_idx_file(dir / "truncated.idx");
    } catch (const ParseError& e) {
        truncated_ok = e.offset() == 11;  // the file's final offset
    }
    require(truncated_ok, "truncated fixture did not raise at the final offset");

    bool magic_ok = false;
    try {
        load_idx_file(dir / "bad_magic.idx");
    } catch (const ParseError& e) {
        magic_ok = e.offset() == 0;
    }
    require(magic_ok, "bad-magic fixture did not raise at offset 0");

    return "4-example fixture parses bit-exactly; truncation and bad magic raise ParseError";
}

std::string criterion_12() {
    // first pass (cached from criteria 6-8)
    const BenchRun& bench_a = shared.get_bench();
    const Dataset* flip_dataset_a = nullptr;
    const TrainingTrace* flip_trace_a = nullptr;
    shared.get_flip25(&flip_dataset_a, &flip_trace_a);

    const fs::path dir_a = fs::temp_directory_path() / "cscore_accept_a";
    const fs::path dir_b = fs::temp_directory_path() / "cscore_accept_b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);

    export_scores(bench_a.scores, dir_a / "scores.csv");
    save_proxy_csv(learning_speed_scores(bench_a.trace, ProxyKind::cumulative_true_class_prob),
                   dir_a / "cum_pL.csv");
    save_proxy_csv(learning_speed_scores(*flip_trace_a, ProxyKind::cumulative_true_class_prob),
                   dir_a / "flip25_cum_pL.csv");
    save_proxy_csv(learning_speed_scores(*flip_trace_a, ProxyKind::cumulative_accuracy),
                   dir_a / "flip25_cum_acc.csv");

    // full recomputation from the same master seeds
    const BenchRun bench_b = run_bench_pipeline(shared.bench_config);
    const Dataset flip_dataset_b =
        materialize_dataset(shared.flip25_config.dataset, shared.flip25_config.master_seed);
    const TrainingTrace flip_trace_b = full_data_trace(
        flip_dataset_b, shared.flip25_config.estimator.trainer, shared.flip25_config.master_seed);

    export_scores(bench_b.scores, dir_b / "scores.csv");
    save_proxy_csv(learning_speed_scores(bench_b.trace, ProxyKind::cumulative_true_class_prob),
                   dir_b / "cum_pL.csv");
    save_proxy_csv(learning_speed_scores(flip_trace_b, ProxyKind::cumulative_true_class_prob),
                   dir_b / "flip25_cum_pL.csv");
    save_proxy_csv(learning_speed_scores(flip_trace_b, ProxyKind::cumulative_accuracy),
                   dir_b / "flip25_cum_acc.csv");

    std::ostringstream detail;
    detail << "hash-equal:";
    for (const char* name : {"scores.csv", "cum_pL.csv", "flip25_cum_pL.csv", "flip25_cum_acc.csv"}) {
        const std::uint64_t ha = file_hash(dir_a / name);
        const std::uint64_t hb = file_hash(dir_b / name);
        require(ha == hb, std::string(name) + " differs between reruns");
        detail << " " << name;
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    return detail.str();
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_seconds;  // 0 = unbounded
    std::function<std::string()> run;
};

}  // namespace

int main() {
    shared.bench_config = load_config(kSourceDir / "configs" / "bench.json");
    shared.flip25_config = load_config(kSourceDir / "configs" / "bench_flip25.json");

    const std::vector<Criterion> criteria{
        {1, "Algorithm-1 oracle equivalence", 1.0, criterion_1},
        {2, "kernel identity and bounds", 5.0, criterion_2},
        {3, "LOF oracle equivalence", 10.0, criterion_3},
        {4, "rank-correlation fixtures and tau brute force", 0.0, criterion_4},
        {5, "gradient check and deterministic retrain", 0.0, criterion_5},
        {6, "planted-structure ordering", 600.0, criterion_6},
        {7, "learning-speed proxy correlation", 0.0, criterion_7},
        {8, "outlier detection at gamma=0.25", 180.0, criterion_8},
        {9, "model-count sensitivity trend", 0.0, criterion_9},
        {10, "point-estimate curve interior peak", 0.0, criterion_10},
        {11, "IDX fixture parsing", 0.0, criterion_11},
        {12, "determinism of criteria 6-8 artifacts", 0.0, criterion_12},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = criterion.run();
        } catch (const CheckFailure& f) {
            pass = false;
            detail = f.message;
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (pass && criterion.time_limit_seconds > 0 && elapsed > criterion.time_limit_seconds) {
            pass = false;
            detail = "over time budget (" + fmt(elapsed) + " s > " +
                     fmt(criterion.time_limit_seconds) + " s); " + detail;
        }
        std::printf("[%s] criterion %2d: %s (%.2f s) - %s\n", pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name.c_str(), elapsed, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    if (failures) std::printf("%d criteria FAILED\n", failures);
    else std::printf("all 12 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
