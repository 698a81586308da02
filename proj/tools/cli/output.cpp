#include "cli/output.hpp"

#include "ergobound/format.hpp"

#include <charconv>
#include <sstream>

namespace ergobound::cli {

namespace {

std::string cell(const nlohmann::json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

void flatten(const nlohmann::json& obj, const std::string& prefix, Table& t, std::vector<std::string>& row) {
    for (const auto& [key, value] : obj.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten(value, name, t, row);
        } else {
            t.header.push_back(name);
            row.push_back(cell(value));
        }
    }
}

} // namespace

std::string render_csv(const Table& table, std::uint64_t seed, const std::vector<std::string>& comments) {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << '\n';
    os << "# seed=" << seed << '\n';
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

nlohmann::json table_to_json(const Table& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
            const std::string& s = row[i];
            double d = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
            if (s == "true" || s == "false") {
                obj[table.header[i]] = s == "true";
            } else if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) {
                obj[table.header[i]] = d;
            } else {
                obj[table.header[i]] = s;
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

Table object_to_table(const nlohmann::json& obj) {
    Table t;
    std::vector<std::string> row;
    flatten(obj, "", t, row);
    t.rows.push_back(std::move(row));
    return t;
}

std::string render_json(const nlohmann::json& payload) { return payload.dump(2) + "\n"; }

} // namespace ergobound::cli
