#include "cscore/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "json.hpp"

#include "cscore/csv.hpp"
#include "cscore/rng.hpp"

namespace cscore {

ArtifactRecord record_artifact(const std::filesystem::path& root,
                               const std::filesystem::path& file) {
    const auto bytes = read_binary_file(file);
    ArtifactRecord record;
    record.path = std::filesystem::relative(file, root).generic_string();
    record.bytes = bytes.size();
    record.fnv64 = to_hex(fnv1a64(std::string_view(
        reinterpret_cast<const char*>(bytes.data()), bytes.size())));
    return record;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    j["master_seed"] = manifest.master_seed;
    j["version"] = manifest.version;
    j["status"] = manifest.status;
    if (!manifest.error.empty()) j["error"] = manifest.error;
    j["started_at"] = manifest.started_at;
    j["wall_seconds"] = manifest.wall_seconds;
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto& a : manifest.artifacts)
        artifacts.push_back(
            nlohmann::json{{"path", a.path}, {"bytes", a.bytes}, {"fnv64", a.fnv64}});
    j["artifacts"] = artifacts;
    write_text_file(dir / "manifest.json", j.dump(2) + "\n");
}

std::string current_utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace cscore
