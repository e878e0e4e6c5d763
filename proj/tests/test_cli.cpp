// End-to-end checks of the cscore binary through subprocess invocations.

#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <sys/wait.h>
#include <unistd.h>
#include <string>

#include "json.hpp"

#include "cscore/csv.hpp"
#include "cscore/estimator.hpp"
#include "cscore/score.hpp"

#ifndef CSCORE_CLI_PATH
#error "CSCORE_CLI_PATH must point at the built cscore binary"
#endif
#ifndef CSCORE_SOURCE_DIR
#error "CSCORE_SOURCE_DIR must point at the repository root"
#endif

namespace fs = std::filesystem;
using namespace cscore;

namespace {

const std::string kBinary = CSCORE_CLI_PATH;
const fs::path kSource = CSCORE_SOURCE_DIR;

struct CommandResult {
    int exit_code;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const fs::path capture =
        fs::temp_directory_path() / ("cscore_cli_out_" + std::to_string(::getpid()) + ".txt");
    const std::string command = kBinary + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = read_text_file(capture);
    fs::remove(capture);
    return result;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cscore_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string config_arg(const std::string& name) {
    return "--config " + (kSource / "configs" / name).string();
}

}  // namespace

TEST_CASE("unknown command exits nonzero and prints usage") {
    const CommandResult result = run_cli("frobnicate");
    CHECK(result.exit_code != 0);
    CHECK(result.output.find("Usage") != std::string::npos);
}

TEST_CASE("validate accepts the shipped configs") {
    for (const char* name : {"bench.json", "bench_flip25.json", "synth400.json", "e2e_small.json"}) {
        const CommandResult result = run_cli("validate " + config_arg(name));
        CHECK(result.exit_code == 0);
        CHECK(result.output.find("0 violations") != std::string::npos);
    }
}

TEST_CASE("validate reports field paths for violations") {
    const CommandResult bad_gamma =
        run_cli("validate " + config_arg("e2e_small.json") + " --set dataset.flip_fraction=1.5");
    CHECK(bad_gamma.exit_code != 0);
    CHECK(bad_gamma.output.find("dataset.flip_fraction") != std::string::npos);

    const CommandResult bad_ratio =
        run_cli("validate " + config_arg("e2e_small.json") + " --set estimator.ratios=[0,0.5]");
    CHECK(bad_ratio.exit_code != 0);
    CHECK(bad_ratio.output.find("subset size must be positive") != std::string::npos);
}

TEST_CASE("estimate on the 400-example config yields fully defined scores") {
    const fs::path out = scratch_dir("estimate400");
    const CommandResult result =
        run_cli("estimate " + config_arg("synth400.json") + " --out " + out.string());
    REQUIRE(result.exit_code == 0);

    const ScoreTable table = import_scores(out / "estimate" / "scores.csv");
    CHECK(table.size() == 400);
    for (double s : table.scores) CHECK(score_defined(s));

    SUBCASE("a rerun into a fresh directory is byte-identical") {
        const fs::path out_b = scratch_dir("estimate400b");
        const CommandResult rerun =
            run_cli("estimate " + config_arg("synth400.json") + " --out " + out_b.string());
        REQUIRE(rerun.exit_code == 0);
        CHECK(read_text_file(out / "estimate" / "scores.csv") ==
              read_text_file(out_b / "estimate" / "scores.csv"));
        CHECK(read_text_file(out / "estimate" / "profile.csv") ==
              read_text_file(out_b / "estimate" / "profile.csv"));
        fs::remove_all(out_b);
    }

    SUBCASE("a rerun into the same directory resumes from the batch archives") {
        const std::string before = read_text_file(out / "estimate" / "scores.csv");
        const CommandResult resumed =
            run_cli("estimate " + config_arg("synth400.json") + " --out " + out.string());
        REQUIRE(resumed.exit_code == 0);
        CHECK(resumed.output.find("reusing") != std::string::npos);
        CHECK(read_text_file(out / "estimate" / "scores.csv") == before);
    }

    fs::remove_all(out);
}

TEST_CASE("the full command pipeline produces its artifacts") {
    const fs::path out = scratch_dir("pipeline");
    const std::string base = config_arg("e2e_small.json") + " --out " + out.string();

    REQUIRE(run_cli("estimate " + base).exit_code == 0);
    REQUIRE(run_cli("proxy " + base).exit_code == 0);
    REQUIRE(run_cli("analyze " + base).exit_code == 0);
    REQUIRE(run_cli("experiment " + base).exit_code == 0);
    REQUIRE(run_cli("export " + base).exit_code == 0);

    for (const char* artifact :
         {"dataset/snapshot.csv", "dataset/features.bin", "estimate/scores.csv",
          "estimate/profile.csv", "proxy/proxy_input_C_pm_L.csv", "proxy/proxy_input_cum_pL.csv",
          "proxy/trace.csv", "analyze/correlations.csv", "analyze/per_class.csv",
          "analyze/histogram.csv", "analyze/detection.csv", "analyze/point_estimate.csv",
          "experiment/removal.csv", "experiment/equalized.csv", "experiment/curves_sgd.csv",
          "experiment/curves_adam.csv", "export/scores.csv", "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(out / artifact), artifact);
    }

    // export re-emits the estimate table unchanged
    CHECK(read_text_file(out / "export" / "scores.csv") ==
          read_text_file(out / "estimate" / "scores.csv"));

    fs::remove_all(out);
}

TEST_CASE("manifests agree across reruns except for timing fields") {
    const fs::path out_a = scratch_dir("manifest_a");
    const fs::path out_b = scratch_dir("manifest_b");
    REQUIRE(run_cli("synth " + config_arg("e2e_small.json") + " --out " + out_a.string())
                .exit_code == 0);
    REQUIRE(run_cli("synth " + config_arg("e2e_small.json") + " --out " + out_b.string())
                .exit_code == 0);

    const auto a = nlohmann::json::parse(read_text_file(out_a / "manifest.json"));
    const auto b = nlohmann::json::parse(read_text_file(out_b / "manifest.json"));
    CHECK(a.at("artifacts") == b.at("artifacts"));  // same files, same hashes
    CHECK(a.at("config_digest") == b.at("config_digest"));
    CHECK(a.at("status") == "complete");
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("CSCORE_OUT provides the default output root") {
    const fs::path root = scratch_dir("env_root");
    const std::string command = "CSCORE_OUT=" + root.string() + " " + kBinary + " synth " +
                                config_arg("e2e_small.json") + " > /dev/null 2>&1";
    REQUIRE(std::system(command.c_str()) == 0);
    // config says output_dir = out/e2e_small, resolved under CSCORE_OUT
    CHECK(fs::exists(root / "out" / "e2e_small" / "manifest.json"));
    fs::remove_all(root);
}

TEST_CASE("a failing run leaves a partial manifest behind") {
    const fs::path out = scratch_dir("partial");
    const CommandResult result = run_cli(
        "estimate " + config_arg("e2e_small.json") + " --out " + out.string() +
        " --set dataset.kind=idx"
        " --set dataset.idx.images=/nonexistent/images.idx"
        " --set dataset.idx.labels=/nonexistent/labels.idx");
    CHECK(result.exit_code != 0);
    const auto manifest = nlohmann::json::parse(read_text_file(out / "manifest.json"));
    CHECK(manifest.at("status") == "partial");
    CHECK(manifest.contains("error"));
    fs::remove_all(out);
}

TEST_CASE("proxy runs in both feature spaces with distinct metadata") {
    const fs::path out = scratch_dir("proxy_spaces");
    const std::string base = config_arg("e2e_small.json") + " --out " + out.string();

    REQUIRE(run_cli("proxy " + base + " --kind kernel --space input").exit_code == 0);
    REQUIRE(run_cli("proxy " + base + " --kind kernel --space hidden").exit_code == 0);

    CHECK(fs::exists(out / "proxy" / "proxy_input_C_pm_L.csv"));
    CHECK(fs::exists(out / "proxy" / "proxy_hidden_C_pm_L.csv"));
    const std::string meta_input = read_text_file(out / "proxy" / "meta_input.json");
    const std::string meta_hidden = read_text_file(out / "proxy" / "meta_hidden.json");
    CHECK(meta_input.find("\"space\": \"input\"") != std::string::npos);
    CHECK(meta_hidden.find("\"space\": \"hidden\"") != std::string::npos);

    fs::remove_all(out);
}
