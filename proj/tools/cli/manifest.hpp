#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ergobound::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// What is needed to re-run a command: its arguments minus output
/// destinations, plus descriptive fields.
struct RunManifest {
    std::string command;
    std::string model_file;
    std::map<std::string, std::string> flags;
    std::uint64_t seed = 0;
    std::string artifact_version = kArtifactVersion;
    std::vector<std::string> outputs;
    std::vector<std::string> args;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Writes `m` with a UTC timestamp to `path`.
void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

/// Arguments with every --out / --manifest option and its value removed.
std::vector<std::string> strip_output_args(const std::vector<std::string>& args);

} // namespace ergobound::cli
