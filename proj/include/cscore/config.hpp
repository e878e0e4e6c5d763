#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cscore/analysis.hpp"
#include "cscore/dataset.hpp"
#include "cscore/proxies.hpp"
#include "cscore/trainer.hpp"

namespace cscore {

// --- run configuration ------------------------------------------------------
//
// One JSON file is the canonical record of an experiment. Sections:
//   seed          master seed; every randomized stage derives from it unless
//                 the section pins its own
//   output_dir    artifact root (CSCORE_OUT / --out override it)
//   dataset       synthetic spec | idx file pair | snapshot, plus flip fraction
//   estimator     subset ratios, runs per ratio, trainer setup
//   proxy         proxy kinds, feature space, LOF neighbors, bandwidth cap
//   analysis      experiment selection, binning, detection gamma, removal plan

enum class DatasetKind { synthetic, idx, snapshot };

struct DatasetSection {
    DatasetKind kind = DatasetKind::synthetic;
    SyntheticSpec synthetic;
    std::string idx_images, idx_labels;
    std::string snapshot_csv, snapshot_features;
    double flip_fraction = 0.0;  // for idx / snapshot inputs; synthetic uses its spec
    bool has_seed = false;
    std::uint64_t seed = 0;
};

struct EstimatorSection {
    std::vector<double> ratios{0.1, 0.3, 0.5, 0.7, 0.9};
    std::size_t runs_per_ratio = 40;
    TrainerConfig trainer;
};

struct ProxySection {
    std::vector<std::string> kinds{"kernel", "lof", "learning_speed", "forgetting"};
    FeatureSpace space = FeatureSpace::input;
    std::size_t k_neighbors = 3;
    std::size_t bandwidth_sample_cap = 2000;
    std::size_t up_to_epoch = 0;  // 0 = full trace
};

struct OptimizerEntry {
    std::string name;
    TrainerConfig trainer;
};

struct AnalysisSection {
    std::vector<std::string> experiments{"removal", "equalized", "optimizer_comparison"};
    std::size_t bin_count = 10;
    BinScheme bin_scheme = BinScheme::value_range;
    double detection_gamma = 0.25;
    std::vector<std::size_t> removal_counts;
    std::size_t repeats = 3;
    std::size_t group_size = 0;  // 0 = smallest nonempty bin
    double test_fraction = 0.2;
    std::vector<OptimizerEntry> optimizers;
};

struct RunConfig {
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    DatasetSection dataset;
    EstimatorSection estimator;
    ProxySection proxy;
    AnalysisSection analysis;
};

// JSON <-> config. Parsing is lenient about missing sections (defaults apply)
// but strict about types; validation collects dot-path messages.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

// All violations found, each prefixed with the offending field path. Empty
// means the config is usable.
std::vector<std::string> validate_config(const RunConfig& config);

// Applies "--set dot.path=value" overrides; values parse as JSON when
// possible, otherwise as strings.
void apply_override(nlohmann::json& j, const std::string& assignment);

// FNV-1a over the canonical (key-sorted) JSON dump.
std::string config_digest(const RunConfig& config);
std::string trainer_config_digest(const TrainerConfig& config);

nlohmann::json trainer_config_to_json(const TrainerConfig& config);
TrainerConfig trainer_config_from_json(const nlohmann::json& j);

// Materializes the configured dataset (generation, IDX load, or snapshot),
// applying label flips where requested. Deterministic in the master seed.
Dataset materialize_dataset(const DatasetSection& section, std::uint64_t master_seed);

}  // namespace cscore
