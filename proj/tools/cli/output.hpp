#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ergobound::cli {

constexpr int kSchemaVersion = 1;

/// Rows of string cells under a fixed header.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// "# schema_version=1", "# seed=<seed>" and any extra comment lines, then the table.
std::string render_csv(const Table& table, std::uint64_t seed, const std::vector<std::string>& comments = {});

/// Table rows as an array of objects; cells that parse as numbers or
/// booleans are emitted as such.
nlohmann::json table_to_json(const Table& table);

/// Flattens a JSON object into a one-row table (nested keys joined by '.').
Table object_to_table(const nlohmann::json& obj);

std::string render_json(const nlohmann::json& payload);

} // namespace ergobound::cli
