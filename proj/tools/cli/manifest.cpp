#include "cli/manifest.hpp"

#include "ergobound/errors.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace ergobound::cli {

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_output_flag(const std::string& a) { return a == "--out" || a == "--manifest"; }

} // namespace

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["command"] = m.command;
    j["model_file"] = m.model_file.empty() ? nlohmann::json(nullptr) : nlohmann::json(m.model_file);
    j["flags"] = m.flags;
    j["seed"] = m.seed;
    j["artifact_version"] = m.artifact_version;
    j["outputs"] = m.outputs;
    j["args"] = m.args;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        if (j.contains("model_file") && !j["model_file"].is_null()) m.model_file = j["model_file"].get<std::string>();
        if (j.contains("flags")) m.flags = j["flags"].get<std::map<std::string, std::string>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.artifact_version = j.value("artifact_version", std::string(kArtifactVersion));
        if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
        m.args = j.at("args").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json j = to_json(m);
    j["timestamp"] = utc_timestamp();
    std::ofstream os(path);
    if (!os) throw DomainError("cannot write manifest " + path);
    os << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot read manifest " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed manifest: ") + e.what());
    }
    return manifest_from_json(j);
}

std::vector<std::string> strip_output_args(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (is_output_flag(a)) {
            ++i;
            continue;
        }
        if (a.rfind("--out=", 0) == 0 || a.rfind("--manifest=", 0) == 0) continue;
        kept.push_back(a);
    }
    return kept;
}

} // namespace ergobound::cli
