#include "doctest.h"

#include <filesystem>

#include "cscore/config.hpp"
#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/manifest.hpp"

using namespace cscore;
using nlohmann::json;

namespace {

json minimal_config_json() {
    return json::parse(R"({
        "seed": 5,
        "output_dir": "out",
        "dataset": {
            "kind": "synthetic",
            "flip_fraction": 0.1,
            "synthetic": {"classes": [
                {"modes": [{"mean": [0, 2], "stddev": 0.5, "count": 10}]},
                {"modes": [{"mean": [2, 0], "stddev": 0.5, "count": 10}]}
            ]}
        },
        "estimator": {"ratios": [0.3, 0.7], "runs_per_ratio": 4}
    })");
}

}  // namespace

TEST_CASE("a well-formed config has no violations") {
    const RunConfig config = config_from_json(minimal_config_json());
    CHECK(validate_config(config).empty());
    CHECK(config.master_seed == 5);
    CHECK(config.estimator.ratios == std::vector<double>{0.3, 0.7});
}

TEST_CASE("violations carry field paths") {
    json j = minimal_config_json();
    j["dataset"]["flip_fraction"] = 1.5;
    j["estimator"]["ratios"] = {0.0, 0.5};
    j["analysis"]["detection_gamma"] = 2.0;
    const auto violations = validate_config(config_from_json(j));

    auto has = [&](const std::string& needle) {
        for (const auto& v : violations)
            if (v.find(needle) != std::string::npos) return true;
        return false;
    };
    CHECK(has("dataset.flip_fraction"));
    CHECK(has("estimator.ratios[0]"));
    CHECK(has("subset size must be positive"));
    CHECK(has("analysis.detection_gamma"));
    CHECK(violations.size() == 3);
}

TEST_CASE("overrides set nested values and parse JSON literals") {
    json j = minimal_config_json();
    apply_override(j, "dataset.flip_fraction=0.25");
    apply_override(j, "estimator.runs_per_ratio=9");
    apply_override(j, "output_dir=elsewhere");
    const RunConfig config = config_from_json(j);
    CHECK(config.dataset.flip_fraction == 0.25);
    CHECK(config.estimator.runs_per_ratio == 9);
    CHECK(config.output_dir == "elsewhere");

    CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ValidationError);
}

TEST_CASE("digest is stable and sensitive to changes") {
    const RunConfig a = config_from_json(minimal_config_json());
    const RunConfig b = config_from_json(minimal_config_json());
    CHECK(config_digest(a) == config_digest(b));

    json changed = minimal_config_json();
    changed["seed"] = 6;
    CHECK(config_digest(config_from_json(changed)) != config_digest(a));
}

TEST_CASE("trainer config round trips through json") {
    TrainerConfig trainer;
    trainer.arch.hidden = {16, 8};
    trainer.optimizer.kind = OptimizerKind::adam;
    trainer.optimizer.learning_rate = 0.003;
    trainer.optimizer.epochs = 12;
    trainer.schedule.kind = ScheduleKind::stagewise;
    trainer.schedule.milestones = {0.5, 0.75};
    trainer.schedule.decay = 0.2;

    const TrainerConfig back = trainer_config_from_json(trainer_config_to_json(trainer));
    CHECK(trainer_config_digest(back) == trainer_config_digest(trainer));
    CHECK(back.optimizer.kind == OptimizerKind::adam);
    CHECK(back.schedule.milestones == trainer.schedule.milestones);
}

TEST_CASE("materialize_dataset is deterministic in the master seed") {
    const RunConfig config = config_from_json(minimal_config_json());
    const Dataset a = materialize_dataset(config.dataset, config.master_seed);
    const Dataset b = materialize_dataset(config.dataset, config.master_seed);
    CHECK(a.features.data == b.features.data);
    CHECK(a.labels == b.labels);

    const Dataset c = materialize_dataset(config.dataset, 999);
    CHECK(a.features.data != c.features.data);
}

TEST_CASE("manifest records artifact hashes") {
    const auto dir = std::filesystem::temp_directory_path() / "cscore_manifest_test";
    std::filesystem::create_directories(dir);
    write_text_file(dir / "artifact.csv", "a,b\n1,2\n");

    Manifest manifest;
    manifest.command = "estimate";
    manifest.config_digest = "abc";
    manifest.started_at = current_utc_timestamp();
    manifest.artifacts.push_back(record_artifact(dir, dir / "artifact.csv"));
    write_manifest(manifest, dir);

    CHECK(std::filesystem::exists(dir / "manifest.json"));
    const auto again = record_artifact(dir, dir / "artifact.csv");
    CHECK(again.fnv64 == manifest.artifacts[0].fnv64);
    CHECK(again.bytes == 8);
    std::filesystem::remove_all(dir);
}
