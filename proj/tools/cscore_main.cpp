// cscore: estimate per-example consistency scores by holdout retraining,
// compute cheap proxy scores, and run the downstream analyses. Every command
// reads one JSON config (overridable with --set key=value), writes its
// artifacts under one output root, and records them in a manifest.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cscore/analysis.hpp"
#include "cscore/config.hpp"
#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/estimator.hpp"
#include "cscore/experiments.hpp"
#include "cscore/manifest.hpp"
#include "cscore/proxies.hpp"
#include "cscore/rank_correlation.hpp"
#include "cscore/rng.hpp"
#include "cscore/score.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cscore;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

struct RunContext {
    RunConfig config;
    json config_json;
    fs::path root;
    unsigned jobs = 0;
    Manifest manifest;
    std::chrono::steady_clock::time_point start;

    void add_artifact(const fs::path& file) {
        manifest.artifacts.push_back(record_artifact(root, file));
    }

    void finish(const std::string& status, const std::string& error = "") {
        manifest.status = status;
        manifest.error = error;
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(manifest, root);
    }
};

fs::path resolve_output_root(const CommonArgs& args, const RunConfig& config) {
    if (!args.out_dir.empty()) return args.out_dir;
    fs::path configured = config.output_dir;
    if (configured.is_absolute()) return configured;
    if (const char* env_root = std::getenv("CSCORE_OUT"))
        return fs::path(env_root) / configured;
    return configured;
}

RunContext make_context(const CommonArgs& args, const std::string& command) {
    json j;
    try {
        j = json::parse(read_text_file(args.config_path));
    } catch (const json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()), 0);
    }
    for (const auto& assignment : args.overrides) apply_override(j, assignment);

    RunContext ctx;
    ctx.config = config_from_json(j);
    if (args.seed_set) ctx.config.master_seed = args.seed;
    ctx.config_json = config_to_json(ctx.config);

    const auto violations = validate_config(ctx.config);
    if (!violations.empty()) {
        std::string message = "invalid config:";
        for (const auto& v : violations) message += "\n  " + v;
        throw ValidationError(message);
    }

    ctx.root = resolve_output_root(args, ctx.config);
    fs::create_directories(ctx.root);
    ctx.jobs = args.jobs;
    ctx.manifest.command = command;
    ctx.manifest.config_digest = config_digest(ctx.config);
    ctx.manifest.master_seed = ctx.config.master_seed;
    ctx.manifest.started_at = current_utc_timestamp();
    ctx.start = std::chrono::steady_clock::now();
    return ctx;
}

// The dataset is shared across stages through its snapshot; the first command
// that needs it materializes and persists it.
Dataset obtain_dataset(RunContext& ctx) {
    const fs::path csv = ctx.root / "dataset" / "snapshot.csv";
    const fs::path bin = ctx.root / "dataset" / "features.bin";
    if (fs::exists(csv) && fs::exists(bin)) return load_snapshot(csv, bin);

    Dataset dataset = materialize_dataset(ctx.config.dataset, ctx.config.master_seed);
    save_snapshot(dataset, csv, bin);
    ctx.add_artifact(csv);
    ctx.add_artifact(bin);
    return dataset;
}

std::string ratio_tag(double ratio) {
    std::string tag = format_double(ratio);
    for (char& c : tag)
        if (c == '.') c = 'p';
    return tag;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonArgs& args) {
    RunContext ctx = make_context(args, "estimate");
    try {
        const Dataset dataset = obtain_dataset(ctx);
        const auto& est = ctx.config.estimator;
        const std::string digest = trainer_config_digest(est.trainer);

        std::vector<RunBatch> batches;
        for (std::size_t r = 0; r < est.ratios.size(); ++r) {
            const double ratio = est.ratios[r];
            const fs::path dir = ctx.root / "estimate" / ("batch_" + ratio_tag(ratio));
            const std::uint64_t ratio_seed =
                derive_seed(ctx.config.master_seed, "ratio", r);

            bool reused = false;
            if (fs::exists(dir / "meta.json")) {
                // resume: a batch archive produced by the same config and seed
                // is picked up as-is
                try {
                    RunBatch existing = load_run_batch(dir);
                    if (existing.config_digest == digest &&
                        existing.mask.runs == est.runs_per_ratio &&
                        existing.ratio == ratio && !existing.run_seeds.empty() &&
                        existing.run_seeds.front() == derive_seed(ratio_seed, "run", 0)) {
                        batches.push_back(std::move(existing));
                        reused = true;
                        std::cerr << "estimate: reusing " << dir.string() << "\n";
                    }
                } catch (const Error&) {
                    // fall through and recompute
                }
            }
            if (!reused) {
                RunBatch batch = run_holdout(dataset, ratio, est.runs_per_ratio, est.trainer,
                                             ratio_seed, ctx.jobs);
                save_run_batch(batch, dir);
                ctx.add_artifact(dir / "mask.csv");
                ctx.add_artifact(dir / "loss.csv");
                ctx.add_artifact(dir / "meta.json");
                batches.push_back(std::move(batch));
            }
        }

        const ConsistencyProfile profile = build_profile(batches);
        const fs::path profile_path = ctx.root / "estimate" / "profile.csv";
        save_profile_csv(profile, profile_path);
        ctx.add_artifact(profile_path);

        ScoreProvenance provenance;
        provenance.ratios = profile.ratios;
        provenance.runs_per_ratio = est.runs_per_ratio;
        provenance.master_seed = ctx.config.master_seed;
        provenance.config_digest = digest;
        const ScoreTable table = integral_cscore(profile, dataset.labels, provenance);
        const fs::path scores_path = ctx.root / "estimate" / "scores.csv";
        export_scores(table, scores_path);
        ctx.add_artifact(scores_path);

        ctx.finish("complete");
        std::cout << "estimate: wrote " << scores_path.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

// --- proxy ------------------------------------------------------------------

int cmd_proxy(const CommonArgs& args, const std::vector<std::string>& kind_flags,
              const std::string& space_flag, const std::string& model_path) {
    RunContext ctx = make_context(args, "proxy");
    try {
        if (!kind_flags.empty()) ctx.config.proxy.kinds = kind_flags;
        if (!space_flag.empty()) {
            if (space_flag != "input" && space_flag != "hidden")
                throw ValidationError("--space must be input or hidden");
            ctx.config.proxy.space =
                space_flag == "hidden" ? FeatureSpace::hidden : FeatureSpace::input;
        }
        const auto& prox = ctx.config.proxy;
        const Dataset dataset = obtain_dataset(ctx);
        const fs::path dir = ctx.root / "proxy";
        const std::string space = prox.space == FeatureSpace::hidden ? "hidden" : "input";

        const std::set<std::string> kinds(prox.kinds.begin(), prox.kinds.end());
        const bool needs_trace = kinds.count("learning_speed") || kinds.count("forgetting");
        // an existing checkpoint can supply the hidden representation; trace
        // proxies always need their own training run
        const bool needs_model =
            needs_trace || (prox.space == FeatureSpace::hidden && model_path.empty());

        Model model;
        TrainingTrace trace;
        if (needs_model) {
            // one full-dataset training run supplies both the trace and the
            // hidden representation
            const auto& trainer = ctx.config.estimator.trainer;
            const ArchSpec arch = resolved_arch(trainer, dataset);
            std::vector<std::size_t> all(dataset.size());
            std::iota(all.begin(), all.end(), 0);
            OptimizerConfig optimizer = trainer.optimizer;
            const std::uint64_t seed =
                derive_seed(ctx.config.master_seed, "proxy-train", 0);
            optimizer.seed = derive_seed(seed, "train", 0);
            const Model initial = init_model(arch, derive_seed(seed, "init", 0));
            TrainResult result =
                train(initial, dataset, all, optimizer, trainer.schedule, all);
            model = std::move(result.model);
            trace = std::move(result.trace);

            const fs::path ckpt = dir / "model.ckpt";
            save_model(model, ckpt);
            ctx.add_artifact(ckpt);
            const fs::path trace_path = dir / "trace.csv";
            save_trace_csv(trace, trace_path);
            ctx.add_artifact(trace_path);
        }

        json meta;
        meta["space"] = space;
        json files = json::array();
        auto emit = [&](const ProxyScores& proxy) {
            const fs::path path =
                dir / ("proxy_" + space + "_" + proxy_kind_name(proxy.kind) + ".csv");
            save_proxy_csv(proxy, path);
            ctx.add_artifact(path);
            files.push_back(json{{"kind", proxy_kind_name(proxy.kind)},
                                 {"space", space},
                                 {"file", path.filename().string()}});
        };

        if (!model_path.empty() && prox.space == FeatureSpace::hidden) {
            model = load_model(model_path);
            meta["model"] = model_path;
        }

        if (kinds.count("kernel") || kinds.count("lof")) {
            const PointSet points = prox.space == FeatureSpace::hidden
                                        ? hidden_point_set(model, dataset)
                                        : input_point_set(dataset);
            if (kinds.count("kernel")) {
                const double bandwidth =
                    rbf_bandwidth(points.points, prox.bandwidth_sample_cap,
                                  derive_seed(ctx.config.master_seed, "bandwidth", 0));
                meta["bandwidth"] = bandwidth;
                const KernelScores kernel = kernel_scores(points, bandwidth, ctx.jobs);
                emit(kernel_proxy(ProxyKind::kernel_density, kernel, dataset.size()));
                emit(kernel_proxy(ProxyKind::kernel_same_class, kernel, dataset.size()));
                emit(kernel_proxy(ProxyKind::kernel_signed, kernel, dataset.size()));
            }
            if (kinds.count("lof"))
                emit(lof_proxy(lof_scores(points.points, prox.k_neighbors)));
        }
        if (kinds.count("learning_speed")) {
            for (ProxyKind kind :
                 {ProxyKind::cumulative_accuracy, ProxyKind::cumulative_true_class_prob,
                  ProxyKind::cumulative_max_prob, ProxyKind::cumulative_entropy})
                emit(learning_speed_scores(trace, kind, prox.up_to_epoch));
        }
        if (kinds.count("forgetting")) emit(forgetting_counts(trace));

        meta["files"] = files;
        const fs::path meta_path = dir / ("meta_" + space + ".json");
        write_text_file(meta_path, meta.dump(2) + "\n");
        ctx.add_artifact(meta_path);

        ctx.finish("complete");
        std::cout << "proxy: wrote " << files.size() << " score files under "
                  << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

// --- analyze ------------------------------------------------------------------

int cmd_analyze(const CommonArgs& args) {
    RunContext ctx = make_context(args, "analyze");
    try {
        const Dataset dataset = obtain_dataset(ctx);
        const fs::path dir = ctx.root / "analyze";
        const fs::path scores_path = ctx.root / "estimate" / "scores.csv";
        if (!fs::exists(scores_path))
            throw IoError("run `cscore estimate` first: missing " + scores_path.string());
        const ScoreTable table = import_scores(scores_path);

        json summary;
        summary["examples"] = dataset.size();
        summary["num_classes"] = dataset.num_classes;
        summary["config_digest"] = ctx.manifest.config_digest;

        // proxy correlations + detection rates
        std::vector<fs::path> proxy_files;
        const fs::path proxy_dir = ctx.root / "proxy";
        if (fs::exists(proxy_dir)) {
            for (const auto& entry : fs::directory_iterator(proxy_dir))
                if (entry.path().extension() == ".csv" &&
                    entry.path().filename().string().rfind("proxy_", 0) == 0)
                    proxy_files.push_back(entry.path());
            std::sort(proxy_files.begin(), proxy_files.end());
        }

        std::string correlations = "kind,value,n\n";
        std::string detections = "kind,rate\n";
        for (const auto& file : proxy_files) {
            const ProxyScores proxy = load_proxy_csv(file);
            std::vector<double> a(proxy.values.size()), b(proxy.values.size());
            for (std::size_t i = 0; i < proxy.values.size(); ++i) {
                a[i] = proxy.values[i];
                b[i] = table.scores[proxy.indices[i]];
            }
            const std::string stem = file.stem().string().substr(6);  // past "proxy_"
            try {
                const auto rho = spearman(a, b);
                correlations += "spearman_" + stem + "," + format_double(rho.value) + "," +
                                std::to_string(rho.samples) + "\n";
                const auto tau = kendall(a, b);
                correlations += "kendall_" + stem + "," + format_double(tau.value) + "," +
                                std::to_string(tau.samples) + "\n";
            } catch (const ValidationError& e) {
                correlations += "spearman_" + stem + ",,0\n";
                correlations += "kendall_" + stem + ",,0\n";
            }
            if (dataset.corruption_mask) {
                detections += stem + "," +
                              format_double(detection_rate(proxy, *dataset.corruption_mask,
                                                           ctx.config.analysis.detection_gamma)) +
                              "\n";
            }
        }
        const fs::path corr_path = dir / "correlations.csv";
        write_text_file(corr_path, correlations);
        ctx.add_artifact(corr_path);
        if (dataset.corruption_mask) {
            const fs::path det_path = dir / "detection.csv";
            write_text_file(det_path, detections);
            ctx.add_artifact(det_path);
            summary["detection_gamma"] = ctx.config.analysis.detection_gamma;
        }

        // per-class statistics
        const auto stats = per_class_stats(table.scores, table.labels, dataset.num_classes);
        std::string per_class = "class,mean,sd,count\n";
        for (std::size_t c = 0; c < stats.size(); ++c) {
            per_class += std::to_string(c) + ",";
            per_class += stats[c].count == 0 ? "" : format_double(stats[c].mean);
            per_class += ",";
            per_class += stats[c].count == 0 ? "" : format_double(stats[c].stddev);
            per_class += "," + std::to_string(stats[c].count) + "\n";
        }
        const fs::path per_class_path = dir / "per_class.csv";
        write_text_file(per_class_path, per_class);
        ctx.add_artifact(per_class_path);

        // score histogram
        const ScoreHistogram hist = histogram(table.scores, ctx.config.analysis.bin_count);
        std::string hist_csv = "bin,count\n";
        for (std::size_t b = 0; b < hist.counts.size(); ++b)
            hist_csv += std::to_string(b) + "," + std::to_string(hist.counts[b]) + "\n";
        const fs::path hist_path = dir / "histogram.csv";
        write_text_file(hist_path, hist_csv);
        ctx.add_artifact(hist_path);
        summary["undefined_scores"] = hist.undefined;

        // point-estimate curve against the integral score
        const fs::path profile_path = ctx.root / "estimate" / "profile.csv";
        if (fs::exists(profile_path)) {
            const ConsistencyProfile profile = load_profile_csv(profile_path);
            const auto curve = point_estimate_curve(profile, table);
            std::string curve_csv = "ratio,rho\n";
            for (const auto& point : curve)
                curve_csv +=
                    format_double(point.ratio) + "," + format_double(point.rho) + "\n";
            const fs::path curve_path = dir / "point_estimate.csv";
            write_text_file(curve_path, curve_csv);
            ctx.add_artifact(curve_path);
        }

        const fs::path summary_path = dir / "summary.json";
        write_text_file(summary_path, summary.dump(2) + "\n");
        ctx.add_artifact(summary_path);

        ctx.finish("complete");
        std::cout << "analyze: wrote " << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

// --- experiment ---------------------------------------------------------------

int cmd_experiment(const CommonArgs& args) {
    RunContext ctx = make_context(args, "experiment");
    try {
        const Dataset dataset = obtain_dataset(ctx);
        const fs::path dir = ctx.root / "experiment";
        const fs::path scores_path = ctx.root / "estimate" / "scores.csv";
        if (!fs::exists(scores_path))
            throw IoError("run `cscore estimate` first: missing " + scores_path.string());
        const ScoreTable table = import_scores(scores_path);
        const auto& an = ctx.config.analysis;
        const std::set<std::string> selected(an.experiments.begin(), an.experiments.end());

        json summary;
        summary["config_digest"] = ctx.manifest.config_digest;

        auto write_curves = [&](const fs::path& path, const BinnedCurves& curves) {
            std::string csv = "bin,epoch,accuracy\n";
            for (std::size_t b = 0; b < curves.accuracy.rows; ++b)
                for (std::size_t e = 0; e < curves.accuracy.cols; ++e)
                    csv += std::to_string(b) + "," + std::to_string(e + 1) + "," +
                           format_double(curves.accuracy.at(b, e)) + "\n";
            for (std::size_t e = 0; e < curves.overall.size(); ++e)
                csv += "overall," + std::to_string(e + 1) + "," +
                       format_double(curves.overall[e]) + "\n";
            write_text_file(path, csv);
            ctx.add_artifact(path);
        };

        if (selected.count("removal")) {
            std::vector<std::size_t> counts = an.removal_counts;
            if (counts.empty()) {
                // default plan: 0 plus a few growing fractions of the train split
                const auto n = static_cast<double>(dataset.size());
                for (double f : {0.0, 0.05, 0.1, 0.25, 0.5})
                    counts.push_back(static_cast<std::size_t>(f * n * (1.0 - an.test_fraction)));
            }
            const auto points = removal_experiment(
                dataset, table, counts, ctx.config.estimator.trainer, an.repeats,
                derive_seed(ctx.config.master_seed, "removal", 0), an.test_fraction, ctx.jobs);
            std::string csv =
                "removed,ranked_accuracy,random_accuracy,ranked_degenerate,random_degenerate\n";
            for (const auto& p : points)
                csv += std::to_string(p.removed) + "," + format_double(p.ranked_accuracy) + "," +
                       format_double(p.random_accuracy) + "," +
                       (p.ranked_degenerate ? "1" : "0") + "," +
                       (p.random_degenerate ? "1" : "0") + "\n";
            const fs::path path = dir / "removal.csv";
            write_text_file(path, csv);
            ctx.add_artifact(path);
        }

        if (selected.count("equalized")) {
            std::size_t group_size = an.group_size;
            if (group_size == 0) {
                // smallest nonempty value-range bin
                const auto bins = bin_by_score(table, an.bin_count, BinScheme::value_range);
                std::vector<std::size_t> sizes(an.bin_count, 0);
                for (int b : bins.bins)
                    if (b >= 0) ++sizes[static_cast<std::size_t>(b)];
                group_size = dataset.size();
                for (std::size_t s : sizes)
                    if (s > 0) group_size = std::min(group_size, s);
            }
            const auto result = equalized_group_experiment(
                dataset, table, an.bin_count, group_size, ctx.config.estimator.trainer,
                derive_seed(ctx.config.master_seed, "equalized", 0));
            write_curves(dir / "equalized.csv", result.curves);
            summary["equalized_group_size"] = group_size;
            summary["equalized_truncated_bins"] =
                std::count(result.truncated.begin(), result.truncated.end(), 1);
        }

        if (selected.count("optimizer_comparison")) {
            std::vector<OptimizerEntry> entries = an.optimizers;
            if (entries.empty())
                throw ValidationError(
                    "analysis.optimizers must list at least one optimizer for "
                    "the optimizer_comparison experiment");
            const auto bins = bin_by_score(table, an.bin_count, an.bin_scheme);
            json curve_files = json::array();
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const BinnedCurves curves =
                    optimizer_curves(dataset, bins, entries[i].trainer,
                                     derive_seed(ctx.config.master_seed, "optimizer-cmp", i));
                const fs::path path = dir / ("curves_" + entries[i].name + ".csv");
                write_curves(path, curves);
                curve_files.push_back(path.filename().string());
            }
            summary["optimizer_curves"] = curve_files;
        }

        const fs::path summary_path = dir / "summary.json";
        write_text_file(summary_path, summary.dump(2) + "\n");
        ctx.add_artifact(summary_path);

        ctx.finish("complete");
        std::cout << "experiment: wrote " << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

// --- synth / export / validate --------------------------------------------------

int cmd_synth(const CommonArgs& args) {
    RunContext ctx = make_context(args, "synth");
    try {
        const Dataset dataset = obtain_dataset(ctx);
        ctx.finish("complete");
        std::cout << "synth: " << dataset.size() << " examples, " << dataset.num_classes
                  << " classes, dim " << dataset.dim() << "\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

int cmd_export(const CommonArgs& args) {
    RunContext ctx = make_context(args, "export");
    try {
        const Dataset dataset = obtain_dataset(ctx);
        const fs::path scores_path = ctx.root / "estimate" / "scores.csv";
        if (!fs::exists(scores_path))
            throw IoError("run `cscore estimate` first: missing " + scores_path.string());
        ScoreTable table = import_scores(scores_path);
        if (table.size() != dataset.size())
            throw ValidationError("score table does not match the dataset");
        for (std::size_t i = 0; i < table.size(); ++i)
            if (table.labels[i] != dataset.labels[i])
                throw ValidationError("label mismatch at index " + std::to_string(i) +
                                      ": scores were computed for a different ordering");

        const fs::path out = ctx.root / "export" / "scores.csv";
        export_scores(table, out);
        ctx.add_artifact(out);
        ctx.finish("complete");
        std::cout << "export: wrote " << out.string() << " (" << table.size() << " rows)\n";
        return 0;
    } catch (const std::exception& e) {
        ctx.finish("partial", e.what());
        throw;
    }
}

int cmd_validate(const CommonArgs& args) {
    json j;
    try {
        j = json::parse(read_text_file(args.config_path));
    } catch (const json::exception& e) {
        std::cout << "1 violation:\n  config: not valid JSON: " << e.what() << "\n";
        return 1;
    }
    for (const auto& assignment : args.overrides) apply_override(j, assignment);

    std::vector<std::string> violations;
    try {
        violations = validate_config(config_from_json(j));
    } catch (const Error& e) {
        violations.push_back(e.what());
    }
    if (violations.empty()) {
        std::cout << "0 violations\n";
        return 0;
    }
    std::cout << violations.size() << (violations.size() == 1 ? " violation:\n" : " violations:\n");
    for (const auto& v : violations) std::cout << "  " << v << "\n";
    return 1;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", args.overrides, "override a config value (dot.path=value)");
    cmd->add_option("--out", args.out_dir, "output root (overrides config/output_dir)");
    cmd->add_option("--jobs", args.jobs, "worker threads (0 = hardware parallelism)");
    cmd->add_option("--seed", args.seed, "master seed override")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consistency-score estimation and analysis toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);  // full usage on bad invocations

    CommonArgs args;
    std::vector<std::string> proxy_kinds;
    std::string proxy_space;
    std::string proxy_model;

    CLI::App* synth = app.add_subcommand("synth", "generate the configured dataset");
    add_common(synth, args);
    CLI::App* estimate =
        app.add_subcommand("estimate", "run the holdout-retraining score estimation");
    add_common(estimate, args);
    CLI::App* proxy = app.add_subcommand("proxy", "compute cheap proxy scores");
    add_common(proxy, args);
    proxy->add_option("--kind", proxy_kinds,
                      "proxy families (kernel, lof, learning_speed, forgetting)");
    proxy->add_option("--space", proxy_space, "feature space (input or hidden)");
    proxy->add_option("--model", proxy_model,
                      "existing checkpoint for the hidden representation (skips training)")
        ->check(CLI::ExistingFile);
    CLI::App* analyze =
        app.add_subcommand("analyze", "correlations, histograms, detection rates");
    add_common(analyze, args);
    CLI::App* experiment =
        app.add_subcommand("experiment", "removal / equalized-group / optimizer runs");
    add_common(experiment, args);
    CLI::App* export_cmd = app.add_subcommand("export", "re-export the score table");
    add_common(export_cmd, args);
    CLI::App* validate = app.add_subcommand("validate", "check a config and list violations");
    add_common(validate, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // prints usage; nonzero for errors
    }

    try {
        if (synth->parsed()) return cmd_synth(args);
        if (estimate->parsed()) return cmd_estimate(args);
        if (proxy->parsed()) return cmd_proxy(args, proxy_kinds, proxy_space);
        if (analyze->parsed()) return cmd_analyze(args);
        if (experiment->parsed()) return cmd_experiment(args);
        if (export_cmd->parsed()) return cmd_export(args);
        if (validate->parsed()) return cmd_validate(args);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
