#include "cscore/config.hpp"

#include <set>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/rng.hpp"
#include "cscore/idx.hpp"

namespace cscore {

using nlohmann::json;

namespace {

// --- enum names ---

std::string optimizer_kind_name(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "sgd_momentum";
}

OptimizerKind optimizer_kind_from_name(const std::string& name) {
    if (name == "sgd_momentum") return OptimizerKind::sgd_momentum;
    if (name == "adam") return OptimizerKind::adam;
    throw ValidationError("unknown optimizer kind '" + name + "'");
}

std::string schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::triangular: return "triangular";
        case ScheduleKind::stagewise: return "stagewise";
        case ScheduleKind::rampup_piecewise: return "rampup_piecewise";
    }
    throw ValidationError("unknown schedule kind");
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "constant") return ScheduleKind::constant;
    if (name == "triangular") return ScheduleKind::triangular;
    if (name == "stagewise") return ScheduleKind::stagewise;
    if (name == "rampup_piecewise") return ScheduleKind::rampup_piecewise;
    throw ValidationError("unknown schedule kind '" + name + "'");
}

std::string dataset_kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::synthetic: return "synthetic";
        case DatasetKind::idx: return "idx";
        case DatasetKind::snapshot: return "snapshot";
    }
    throw ValidationError("unknown dataset kind");
}

DatasetKind dataset_kind_from_name(const std::string& name) {
    if (name == "synthetic") return DatasetKind::synthetic;
    if (name == "idx") return DatasetKind::idx;
    if (name == "snapshot") return DatasetKind::snapshot;
    throw ValidationError("unknown dataset kind '" + name + "'");
}

std::string space_name(FeatureSpace space) {
    return space == FeatureSpace::hidden ? "hidden" : "input";
}

FeatureSpace space_from_name(const std::string& name) {
    if (name == "input") return FeatureSpace::input;
    if (name == "hidden") return FeatureSpace::hidden;
    throw ValidationError("unknown feature space '" + name + "'");
}

std::string bin_scheme_name(BinScheme scheme) {
    return scheme == BinScheme::equal_count ? "equal_count" : "value_range";
}

BinScheme bin_scheme_from_name(const std::string& name) {
    if (name == "value_range") return BinScheme::value_range;
    if (name == "equal_count") return BinScheme::equal_count;
    throw ValidationError("unknown bin scheme '" + name + "'");
}

// --- typed field access with path-aware errors ---

template <typename T>
T field_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(path + "." + key + ": wrong type");
    }
}

const json* section(const json& j, const std::string& key) {
    return j.contains(key) ? &j.at(key) : nullptr;
}

}  // namespace

json trainer_config_to_json(const TrainerConfig& config) {
    json arch;
    arch["input_dim"] = config.arch.input_dim;
    arch["hidden"] = config.arch.hidden;
    arch["num_classes"] = config.arch.num_classes;

    json optimizer;
    optimizer["kind"] = optimizer_kind_name(config.optimizer.kind);
    optimizer["learning_rate"] = config.optimizer.learning_rate;
    optimizer["momentum"] = config.optimizer.momentum;
    optimizer["beta1"] = config.optimizer.beta1;
    optimizer["beta2"] = config.optimizer.beta2;
    optimizer["epsilon"] = config.optimizer.epsilon;
    optimizer["weight_decay"] = config.optimizer.weight_decay;
    optimizer["batch_size"] = config.optimizer.batch_size;
    optimizer["epochs"] = config.optimizer.epochs;

    json schedule;
    schedule["kind"] = schedule_kind_name(config.schedule.kind);
    schedule["warmup_fraction"] = config.schedule.warmup_fraction;
    schedule["milestones"] = config.schedule.milestones;
    schedule["decay"] = config.schedule.decay;

    return json{{"arch", arch}, {"optimizer", optimizer}, {"schedule", schedule}};
}

TrainerConfig trainer_config_from_json(const json& j) {
    TrainerConfig config;
    if (const json* arch = section(j, "arch")) {
        config.arch.input_dim = field_or<std::size_t>(*arch, "input_dim", "arch", 0);
        config.arch.hidden =
            field_or<std::vector<std::size_t>>(*arch, "hidden", "arch", config.arch.hidden);
        config.arch.num_classes = field_or<std::size_t>(*arch, "num_classes", "arch", 0);
    }
    if (const json* opt = section(j, "optimizer")) {
        config.optimizer.kind = optimizer_kind_from_name(
            field_or<std::string>(*opt, "kind", "optimizer", "sgd_momentum"));
        config.optimizer.learning_rate =
            field_or<double>(*opt, "learning_rate", "optimizer", config.optimizer.learning_rate);
        config.optimizer.momentum =
            field_or<double>(*opt, "momentum", "optimizer", config.optimizer.momentum);
        config.optimizer.beta1 = field_or<double>(*opt, "beta1", "optimizer", config.optimizer.beta1);
        config.optimizer.beta2 = field_or<double>(*opt, "beta2", "optimizer", config.optimizer.beta2);
        config.optimizer.epsilon =
            field_or<double>(*opt, "epsilon", "optimizer", config.optimizer.epsilon);
        config.optimizer.weight_decay =
            field_or<double>(*opt, "weight_decay", "optimizer", config.optimizer.weight_decay);
        config.optimizer.batch_size =
            field_or<std::size_t>(*opt, "batch_size", "optimizer", config.optimizer.batch_size);
        config.optimizer.epochs =
            field_or<std::size_t>(*opt, "epochs", "optimizer", config.optimizer.epochs);
    }
    if (const json* sched = section(j, "schedule")) {
        config.schedule.kind =
            schedule_kind_from_name(field_or<std::string>(*sched, "kind", "schedule", "constant"));
        config.schedule.warmup_fraction = field_or<double>(*sched, "warmup_fraction", "schedule",
                                                           config.schedule.warmup_fraction);
        config.schedule.milestones = field_or<std::vector<double>>(*sched, "milestones", "schedule",
                                                                   config.schedule.milestones);
        config.schedule.decay = field_or<double>(*sched, "decay", "schedule", config.schedule.decay);
    }
    return config;
}

namespace {

SyntheticSpec synthetic_from_json(const json& j) {
    SyntheticSpec spec;
    if (!j.contains("classes")) return spec;
    for (const auto& cls : j.at("classes")) {
        std::vector<GaussianMode> modes;
        if (cls.contains("modes")) {
            for (const auto& m : cls.at("modes")) {
                GaussianMode mode;
                mode.mean = field_or<std::vector<double>>(m, "mean", "mode", {});
                mode.stddev = field_or<double>(m, "stddev", "mode", 1.0);
                mode.count = field_or<std::size_t>(m, "count", "mode", 0);
                modes.push_back(std::move(mode));
            }
        }
        spec.modes_per_class.push_back(std::move(modes));
    }
    return spec;
}

json synthetic_to_json(const SyntheticSpec& spec) {
    json classes = json::array();
    for (const auto& modes : spec.modes_per_class) {
        json mode_list = json::array();
        for (const auto& mode : modes)
            mode_list.push_back(
                json{{"mean", mode.mean}, {"stddev", mode.stddev}, {"count", mode.count}});
        classes.push_back(json{{"modes", mode_list}});
    }
    return json{{"classes", classes}};
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig config;
    config.master_seed = field_or<std::uint64_t>(j, "seed", "", 0);
    config.output_dir = field_or<std::string>(j, "output_dir", "", config.output_dir);

    if (const json* ds = section(j, "dataset")) {
        config.dataset.kind = dataset_kind_from_name(
            field_or<std::string>(*ds, "kind", "dataset", "synthetic"));
        config.dataset.flip_fraction =
            field_or<double>(*ds, "flip_fraction", "dataset", 0.0);
        if (ds->contains("seed")) {
            config.dataset.has_seed = true;
            config.dataset.seed = field_or<std::uint64_t>(*ds, "seed", "dataset", 0);
        }
        if (const json* synth = section(*ds, "synthetic"))
            config.dataset.synthetic = synthetic_from_json(*synth);
        if (const json* idx = section(*ds, "idx")) {
            config.dataset.idx_images = field_or<std::string>(*idx, "images", "dataset.idx", "");
            config.dataset.idx_labels = field_or<std::string>(*idx, "labels", "dataset.idx", "");
        }
        if (const json* snap = section(*ds, "snapshot")) {
            config.dataset.snapshot_csv = field_or<std::string>(*snap, "csv", "dataset.snapshot", "");
            config.dataset.snapshot_features =
                field_or<std::string>(*snap, "features", "dataset.snapshot", "");
        }
    }

    if (const json* est = section(j, "estimator")) {
        config.estimator.ratios =
            field_or<std::vector<double>>(*est, "ratios", "estimator", config.estimator.ratios);
        config.estimator.runs_per_ratio = field_or<std::size_t>(*est, "runs_per_ratio", "estimator",
                                                                config.estimator.runs_per_ratio);
        if (const json* trainer = section(*est, "trainer"))
            config.estimator.trainer = trainer_config_from_json(*trainer);
    }

    if (const json* proxy = section(j, "proxy")) {
        config.proxy.kinds =
            field_or<std::vector<std::string>>(*proxy, "kinds", "proxy", config.proxy.kinds);
        config.proxy.space =
            space_from_name(field_or<std::string>(*proxy, "space", "proxy", "input"));
        config.proxy.k_neighbors =
            field_or<std::size_t>(*proxy, "k_neighbors", "proxy", config.proxy.k_neighbors);
        config.proxy.bandwidth_sample_cap = field_or<std::size_t>(
            *proxy, "bandwidth_sample_cap", "proxy", config.proxy.bandwidth_sample_cap);
        config.proxy.up_to_epoch =
            field_or<std::size_t>(*proxy, "up_to_epoch", "proxy", config.proxy.up_to_epoch);
    }

    if (const json* an = section(j, "analysis")) {
        config.analysis.experiments = field_or<std::vector<std::string>>(
            *an, "experiments", "analysis", config.analysis.experiments);
        config.analysis.bin_count =
            field_or<std::size_t>(*an, "bin_count", "analysis", config.analysis.bin_count);
        config.analysis.bin_scheme = bin_scheme_from_name(
            field_or<std::string>(*an, "bin_scheme", "analysis", "value_range"));
        config.analysis.detection_gamma =
            field_or<double>(*an, "detection_gamma", "analysis", config.analysis.detection_gamma);
        config.analysis.removal_counts = field_or<std::vector<std::size_t>>(
            *an, "removal_counts", "analysis", config.analysis.removal_counts);
        config.analysis.repeats =
            field_or<std::size_t>(*an, "repeats", "analysis", config.analysis.repeats);
        config.analysis.group_size =
            field_or<std::size_t>(*an, "group_size", "analysis", config.analysis.group_size);
        config.analysis.test_fraction =
            field_or<double>(*an, "test_fraction", "analysis", config.analysis.test_fraction);
        if (an->contains("optimizers")) {
            for (const auto& entry : an->at("optimizers")) {
                OptimizerEntry opt;
                opt.name = field_or<std::string>(entry, "name", "analysis.optimizers", "");
                if (const json* trainer = section(entry, "trainer"))
                    opt.trainer = trainer_config_from_json(*trainer);
                config.analysis.optimizers.push_back(std::move(opt));
            }
        }
    }
    return config;
}

json config_to_json(const RunConfig& config) {
    json j;
    j["seed"] = config.master_seed;
    j["output_dir"] = config.output_dir;

    json ds;
    ds["kind"] = dataset_kind_name(config.dataset.kind);
    ds["flip_fraction"] = config.dataset.flip_fraction;
    if (config.dataset.has_seed) ds["seed"] = config.dataset.seed;
    switch (config.dataset.kind) {
        case DatasetKind::synthetic:
            ds["synthetic"] = synthetic_to_json(config.dataset.synthetic);
            break;
        case DatasetKind::idx:
            ds["idx"] = json{{"images", config.dataset.idx_images},
                             {"labels", config.dataset.idx_labels}};
            break;
        case DatasetKind::snapshot:
            ds["snapshot"] = json{{"csv", config.dataset.snapshot_csv},
                                  {"features", config.dataset.snapshot_features}};
            break;
    }
    j["dataset"] = ds;

    j["estimator"] = json{{"ratios", config.estimator.ratios},
                          {"runs_per_ratio", config.estimator.runs_per_ratio},
                          {"trainer", trainer_config_to_json(config.estimator.trainer)}};

    j["proxy"] = json{{"kinds", config.proxy.kinds},
                      {"space", space_name(config.proxy.space)},
                      {"k_neighbors", config.proxy.k_neighbors},
                      {"bandwidth_sample_cap", config.proxy.bandwidth_sample_cap},
                      {"up_to_epoch", config.proxy.up_to_epoch}};

    json optimizers = json::array();
    for (const auto& entry : config.analysis.optimizers)
        optimizers.push_back(
            json{{"name", entry.name}, {"trainer", trainer_config_to_json(entry.trainer)}});
    j["analysis"] = json{{"experiments", config.analysis.experiments},
                         {"bin_count", config.analysis.bin_count},
                         {"bin_scheme", bin_scheme_name(config.analysis.bin_scheme)},
                         {"detection_gamma", config.analysis.detection_gamma},
                         {"removal_counts", config.analysis.removal_counts},
                         {"repeats", config.analysis.repeats},
                         {"group_size", config.analysis.group_size},
                         {"test_fraction", config.analysis.test_fraction},
                         {"optimizers", optimizers}};
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()), 0);
    }
    return config_from_json(j);
}

namespace {

void validate_trainer(const std::string& prefix, const TrainerConfig& trainer,
                      std::vector<std::string>& out) {
    if (trainer.arch.hidden.empty())
        out.push_back(prefix + ".arch.hidden: at least one hidden layer required");
    for (std::size_t i = 0; i < trainer.arch.hidden.size(); ++i)
        if (trainer.arch.hidden[i] == 0)
            out.push_back(prefix + ".arch.hidden[" + std::to_string(i) + "]: width must be positive");

    const auto& opt = trainer.optimizer;
    if (opt.learning_rate <= 0.0)
        out.push_back(prefix + ".optimizer.learning_rate: must be positive");
    if (opt.momentum < 0.0 || opt.momentum >= 1.0)
        out.push_back(prefix + ".optimizer.momentum: must be in [0, 1)");
    if (opt.beta1 < 0.0 || opt.beta1 >= 1.0 || opt.beta2 < 0.0 || opt.beta2 >= 1.0)
        out.push_back(prefix + ".optimizer: betas must be in [0, 1)");
    if (opt.epsilon <= 0.0) out.push_back(prefix + ".optimizer.epsilon: must be positive");
    if (opt.weight_decay < 0.0)
        out.push_back(prefix + ".optimizer.weight_decay: must be nonnegative");
    if (opt.batch_size < 1) out.push_back(prefix + ".optimizer.batch_size: must be >= 1");

    const auto& sched = trainer.schedule;
    const bool warmup =
        sched.kind == ScheduleKind::triangular || sched.kind == ScheduleKind::rampup_piecewise;
    if (warmup && (sched.warmup_fraction <= 0.0 || sched.warmup_fraction >= 1.0))
        out.push_back(prefix + ".schedule.warmup_fraction: must be in (0, 1)");
    const bool milestones =
        sched.kind == ScheduleKind::stagewise || sched.kind == ScheduleKind::rampup_piecewise;
    if (milestones) {
        double prev = 0.0;
        for (std::size_t i = 0; i < sched.milestones.size(); ++i) {
            if (sched.milestones[i] <= prev || sched.milestones[i] >= 1.0) {
                out.push_back(prefix + ".schedule.milestones[" + std::to_string(i) +
                              "]: must be strictly increasing fractions in (0, 1)");
                break;
            }
            prev = sched.milestones[i];
        }
        if (sched.decay <= 0.0) out.push_back(prefix + ".schedule.decay: must be positive");
    }
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& config) {
    std::vector<std::string> out;

    const auto& ds = config.dataset;
    if (ds.flip_fraction < 0.0 || ds.flip_fraction >= 1.0)
        out.push_back("dataset.flip_fraction: must be in [0, 1)");
    switch (ds.kind) {
        case DatasetKind::synthetic: {
            const auto& spec = ds.synthetic;
            if (spec.modes_per_class.empty()) {
                out.push_back("dataset.synthetic.classes: must not be empty");
                break;
            }
            if (spec.total_count() == 0)
                out.push_back("dataset.synthetic.classes: no nonempty mode");
            const std::size_t d = spec.dim();
            for (std::size_t c = 0; c < spec.modes_per_class.size(); ++c) {
                for (std::size_t m = 0; m < spec.modes_per_class[c].size(); ++m) {
                    const auto& mode = spec.modes_per_class[c][m];
                    const std::string path = "dataset.synthetic.classes[" + std::to_string(c) +
                                             "].modes[" + std::to_string(m) + "]";
                    if (mode.stddev < 0.0) out.push_back(path + ".stddev: must be nonnegative");
                    if (mode.count > 0 && mode.mean.size() != d)
                        out.push_back(path + ".mean: dimension differs from other modes");
                }
            }
            break;
        }
        case DatasetKind::idx:
            if (ds.idx_images.empty()) out.push_back("dataset.idx.images: path required");
            if (ds.idx_labels.empty()) out.push_back("dataset.idx.labels: path required");
            break;
        case DatasetKind::snapshot:
            if (ds.snapshot_csv.empty()) out.push_back("dataset.snapshot.csv: path required");
            if (ds.snapshot_features.empty())
                out.push_back("dataset.snapshot.features: path required");
            break;
    }

    if (config.estimator.ratios.empty())
        out.push_back("estimator.ratios: must not be empty");
    for (std::size_t i = 0; i < config.estimator.ratios.size(); ++i) {
        const double r = config.estimator.ratios[i];
        if (r <= 0.0 || r > 1.0)
            out.push_back("estimator.ratios[" + std::to_string(i) +
                          "]: subset size must be positive (ratio in (0, 1])");
    }
    if (config.estimator.runs_per_ratio < 1)
        out.push_back("estimator.runs_per_ratio: must be >= 1");
    validate_trainer("estimator.trainer", config.estimator.trainer, out);

    static const std::set<std::string> known_proxies{"kernel", "lof", "learning_speed",
                                                     "forgetting"};
    for (std::size_t i = 0; i < config.proxy.kinds.size(); ++i)
        if (!known_proxies.count(config.proxy.kinds[i]))
            out.push_back("proxy.kinds[" + std::to_string(i) + "]: unknown kind '" +
                          config.proxy.kinds[i] + "'");
    if (config.proxy.k_neighbors < 1) out.push_back("proxy.k_neighbors: must be >= 1");
    if (config.proxy.bandwidth_sample_cap < 2)
        out.push_back("proxy.bandwidth_sample_cap: must be >= 2");

    static const std::set<std::string> known_experiments{"removal", "equalized",
                                                         "optimizer_comparison"};
    for (std::size_t i = 0; i < config.analysis.experiments.size(); ++i)
        if (!known_experiments.count(config.analysis.experiments[i]))
            out.push_back("analysis.experiments[" + std::to_string(i) + "]: unknown experiment '" +
                          config.analysis.experiments[i] + "'");
    if (config.analysis.bin_count < 1) out.push_back("analysis.bin_count: must be >= 1");
    if (config.analysis.detection_gamma <= 0.0 || config.analysis.detection_gamma >= 1.0)
        out.push_back("analysis.detection_gamma: must be in (0, 1)");
    if (config.analysis.repeats < 1) out.push_back("analysis.repeats: must be >= 1");
    if (config.analysis.test_fraction <= 0.0 || config.analysis.test_fraction >= 1.0)
        out.push_back("analysis.test_fraction: must be in (0, 1)");
    for (std::size_t i = 0; i < config.analysis.optimizers.size(); ++i) {
        const auto& entry = config.analysis.optimizers[i];
        const std::string prefix = "analysis.optimizers[" + std::to_string(i) + "]";
        if (entry.name.empty()) out.push_back(prefix + ".name: required");
        validate_trainer(prefix + ".trainer", entry.trainer, out);
    }
    return out;
}

void apply_override(json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override must look like dot.path=value: '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // plain string
    }

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ValidationError("empty key in override path '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

std::string config_digest(const RunConfig& config) {
    return to_hex(fnv1a64(config_to_json(config).dump()));
}

std::string trainer_config_digest(const TrainerConfig& config) {
    return to_hex(fnv1a64(trainer_config_to_json(config).dump()));
}

Dataset materialize_dataset(const DatasetSection& section, std::uint64_t master_seed) {
    const std::uint64_t seed =
        section.has_seed ? section.seed : derive_seed(master_seed, "dataset", 0);
    switch (section.kind) {
        case DatasetKind::synthetic: {
            SyntheticSpec spec = section.synthetic;
            spec.flip_fraction = section.flip_fraction;
            spec.seed = seed;
            return generate_synthetic(spec);
        }
        case DatasetKind::idx: {
            const IdxTensor images = load_idx_file(section.idx_images);
            const IdxTensor labels = load_idx_file(section.idx_labels);
            Dataset ds = dataset_from_idx(images, labels);
            if (section.flip_fraction > 0.0)
                ds = flip_labels(ds, section.flip_fraction, derive_seed(seed, "flip", 0));
            return ds;
        }
        case DatasetKind::snapshot: {
            Dataset ds = load_snapshot(section.snapshot_csv, section.snapshot_features);
            if (section.flip_fraction > 0.0 && !ds.corruption_mask)
                ds = flip_labels(ds, section.flip_fraction, derive_seed(seed, "flip", 0));
            return ds;
        }
    }
    throw ValidationError("unknown dataset kind");
}

}  // namespace cscore
