#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cscore {

inline constexpr const char* kVersion = "0.1.0";

struct ArtifactRecord {
    std::string path;  // relative to the output root
    std::uint64_t bytes = 0;
    std::string fnv64;
};

// Written once per command invocation; ties every artifact in the output
// directory to the config digest and master seed that produced it. The
// timestamp and wall time are the only fields expected to differ between
// reruns of an identical config.
struct Manifest {
    std::string command;
    std::string config_digest;
    std::uint64_t master_seed = 0;
    std::string version = kVersion;
    std::string status = "complete";  // or "partial"
    std::string error;
    std::string started_at;  // UTC, ISO 8601
    double wall_seconds = 0.0;
    std::vector<ArtifactRecord> artifacts;
};

ArtifactRecord record_artifact(const std::filesystem::path& root,
                               const std::filesystem::path& file);

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir);

std::string current_utc_timestamp();

}  // namespace cscore
