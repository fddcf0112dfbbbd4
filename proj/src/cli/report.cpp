#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "curvlab/cli.hpp"
#include "curvlab/errors.hpp"

namespace curvlab::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
    throw ValidationError("report " + where + ": " + what);
}

void require_keys(const json& obj, const std::set<std::string>& required, const std::set<std::string>& optional,
                  const std::string& where) {
    for (const auto& k : required)
        if (!obj.contains(k)) invalid(where, "missing '" + k + "'");
    for (const auto& [k, v] : obj.items())
        if (!required.count(k) && !optional.count(k)) invalid(where, "unexpected key '" + k + "'");
}

bool number_or_null(const json& v) { return v.is_null() || v.is_number(); }

void validate_common(const json& r) {
    if (!r["schema_version"].is_number_integer() || r["schema_version"].get<int>() != kSchemaVersion)
        invalid("schema_version", "expected " + std::to_string(kSchemaVersion));
    if (!r["tool_version"].is_string()) invalid("tool_version", "expected a string");
    if (!r["command"].is_string()) invalid("command", "expected a string");
    const auto& names = commands();
    if (std::find(names.begin(), names.end(), r["command"].get<std::string>()) == names.end())
        invalid("command", "unknown command");
    if (!r["runtime_ms"].is_number() || r["runtime_ms"].get<double>() < 0.0)
        invalid("runtime_ms", "expected a non-negative number");
    if (!r["config"].is_object()) invalid("config", "expected an object");
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
        return s;
    }
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return s;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write output file '" + path + "'");
    out << text;
    if (!out) throw ConfigurationError("write failed for '" + path + "'");
}

}  // namespace

void validate_report(const json& r) {
    if (!r.is_object()) invalid("", "top level must be an object");
    if (r.contains("error")) {
        require_keys(r, {"schema_version", "tool_version", "command", "config", "error", "runtime_ms"}, {}, "");
        validate_common(r);
        const json& e = r["error"];
        if (!e.is_object()) invalid("error", "expected an object");
        require_keys(e, {"kind", "message"}, {}, "error");
        if (!e["kind"].is_string() || !e["message"].is_string()) invalid("error", "kind and message must be strings");
        return;
    }
    require_keys(r, {"schema_version", "tool_version", "command", "config", "summary", "runtime_ms"},
                 {"records", "records_file"}, "");
    validate_common(r);
    if (r.contains("records") == r.contains("records_file"))
        invalid("", "exactly one of 'records' and 'records_file' is required");

    // The embedded config must itself be a valid run configuration.
    try {
        const RunConfig cfg = parse_config(r["config"]);
        if (cfg.command != r["command"].get<std::string>()) invalid("config", "command differs from the report");
    } catch (const ConfigurationError& e) {
        invalid("config", e.what());
    }

    if (r.contains("records")) {
        const json& recs = r["records"];
        if (!recs.is_array()) invalid("records", "expected an array");
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const json& rec = recs[i];
            const std::string where = "records[" + std::to_string(i) + "]";
            if (!rec.is_object()) invalid(where, "expected an object");
            if (!rec.contains("type") || !rec["type"].is_string()) invalid(where, "needs a string 'type'");
            if (!rec.contains("pass") || !rec["pass"].is_boolean()) invalid(where, "needs a boolean 'pass'");
            if (!rec.contains("slack") || !number_or_null(rec["slack"])) invalid(where, "needs a numeric 'slack'");
        }
    } else if (!r["records_file"].is_string()) {
        invalid("records_file", "expected a string");
    }

    const json& s = r["summary"];
    if (!s.is_object()) invalid("summary", "expected an object");
    if (!s.contains("verdict") || !s["verdict"].is_string()) invalid("summary", "needs a string 'verdict'");
    const std::string verdict = s["verdict"].get<std::string>();
    if (verdict != "pass" && verdict != "fail") invalid("summary.verdict", "expected 'pass' or 'fail'");
    if (!s.contains("worst_slack") || !number_or_null(s["worst_slack"])) invalid("summary", "needs 'worst_slack'");
    for (const char* k : {"checks", "failures"})
        if (!s.contains(k) || !s[k].is_number_unsigned()) invalid("summary", std::string("needs a count '") + k + "'");
    if ((s["failures"].get<std::size_t>() == 0) != (verdict == "pass"))
        invalid("summary", "verdict disagrees with the failure count");
}

std::string records_to_csv(const json& records) {
    std::vector<std::string> columns;
    std::set<std::string> seen;
    for (const auto& rec : records)
        for (const auto& [k, v] : rec.items())
            if (seen.insert(k).second) columns.push_back(k);
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& rec : records) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            if (rec.contains(columns[c])) out << csv_cell(rec[columns[c]]);
        }
        out << "\n";
    }
    return out.str();
}

std::string summary_path(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".summary.json";
    return csv_path + ".summary.json";
}

void write_report(const RunResult& result, const RunConfig& cfg) {
    if (cfg.format == Format::json) {
        const std::string text = result.report.dump(2) + "\n";
        if (cfg.output) write_file(*cfg.output, text);
        else std::cout << text;
        return;
    }
    if (!cfg.output) throw ConfigurationError("csv output needs an output path");
    json summary = result.report;
    if (summary.contains("records")) {
        write_file(*cfg.output, records_to_csv(summary["records"]));
        summary.erase("records");
        summary["records_file"] = *cfg.output;
    }
    write_file(summary_path(*cfg.output), summary.dump(2) + "\n");
}

}  // namespace curvlab::cli
