#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gapcert::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_cell(const json& j) {
  if (j.is_number()) return format_number(j.get<double>());
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_null()) return "";
  std::string s = j.is_string() ? j.get<std::string>() : j.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

// JSON has no inf/nan; they go in as strings so the report stays valid and lossless.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << data;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l))
    if (!l.empty()) out.push_back(l);
  return out;
}

}  // namespace

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
    out += "\n";
  }
  return out;
}

json Table::json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t i = 0; i < columns.size(); ++i) cols.push_back({{"name", columns[i]}, {"source", sources[i]}});
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : r) row.push_back(c.is_number() ? num(c.get<double>()) : c);
    rs.push_back(row);
  }
  return {{"name", name}, {"columns", cols}, {"rows", rs}};
}

Report::Report(std::string task, const Config& cfg) : task_(std::move(task)), cfg_(cfg) {}

void Report::value(const std::string& key, double v, const std::string& source) {
  results_[key] = {{"value", num(v)}, {"source", source}};
}

void Report::text(const std::string& key, const std::string& v) { results_[key] = v; }

void Report::constant(const std::string& name, double v, const std::string& source) {
  extra_constants_[name] = {{"value", num(v)}, {"source", source}};
}

bool Report::all_passed() const {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

void Report::set_status(std::string status, int exit_code) {
  status_ = std::move(status);
  exit_code_ = exit_code;
}

json Report::json() const {
  nlohmann::json constants = nlohmann::json::object();
  for (const char* k : {"c_W", "c_Wt", "c_D"})
    constants[k] = {{"value", num(cfg_.real("constants", k, 1.0))},
                    {"source", cfg_.has("constants", k) ? "config" : "default"}};
  for (const auto& [k, v] : extra_constants_.items()) constants[k] = v;

  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : checks_)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", num(c.value)},
                      {"relation", c.relation},
                      {"threshold", num(c.threshold)},
                      {"source", c.source}});
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : tables_) tables.push_back(t.json());
  const auto seed = cfg_.seed();
  return {{"schema_version", kSchemaVersion},
          {"task", task_},
          {"config_sha256", cfg_.sha256()},
          {"config", cfg_.canonical()},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
          {"constants", constants},
          {"status", status_},
          {"exit_code", exit_code_},
          {"results", results_},
          {"checks", checks},
          {"tables", tables}};
}

Table Report::summary() const {
  Table t;
  t.name = "summary";
  for (const char* c : {"task", "config_sha256", "check", "value", "relation", "threshold", "passed", "source"})
    t.add_column(c, "cli.report");
  const std::string hash = cfg_.sha256();
  for (const auto& c : checks_)
    t.rows.push_back({task_, hash, c.name, c.value, c.relation, c.threshold, c.passed, c.source});
  return t;
}

void Report::write(const std::string& dir) const {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "report.json", json().dump(2) + "\n");
  write_file(fs::path(dir) / "summary.csv", summary().csv());
  for (const auto& t : tables_) write_file(fs::path(dir) / (t.name + ".csv"), t.csv());
}

MergeResult report_merge(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  if (run_dirs.empty()) throw std::runtime_error("report: no run directories given");
  std::string version;
  std::map<std::string, std::string> header;               // table -> CSV header
  std::map<std::string, std::vector<std::string>> merged;  // table -> body lines
  std::vector<std::string> order;
  MergeResult res;
  for (const auto& dir : run_dirs) {
    const fs::path rp = fs::path(dir) / "report.json";
    if (!fs::exists(rp)) throw std::runtime_error("report: '" + dir + "' has no report.json");
    nlohmann::json rep;
    try {
      rep = nlohmann::json::parse(read_file(rp));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("report: '" + rp.string() + "' is not valid JSON: " + e.what());
    }
    const std::string v = rep.value("schema_version", "");
    if (version.empty()) version = v;
    if (v != version)
      throw std::runtime_error("report: schema version '" + v + "' in '" + dir + "' conflicts with '" + version + "'");
    std::vector<std::string> names{"summary"};
    for (const auto& t : rep.at("tables")) names.push_back(t.at("name").get<std::string>());
    for (const auto& name : names) {
      const auto lines = lines_of(read_file(fs::path(dir) / (name + ".csv")));
      if (lines.empty()) throw std::runtime_error("report: empty table '" + name + "' in '" + dir + "'");
      if (!header.count(name)) {
        header[name] = lines[0];
        order.push_back(name);
      } else if (header[name] != lines[0]) {
        throw std::runtime_error("report: table '" + name + "' in '" + dir + "' has a different column schema");
      }
      auto& body = merged[name];
      body.insert(body.end(), lines.begin() + 1, lines.end());
    }
    ++res.runs;
  }
  fs::create_directories(out_dir);
  for (const auto& name : order) {
    std::string data = header[name] + "\n";
    for (const auto& l : merged[name]) data += l + "\n";
    write_file(fs::path(out_dir) / (name + ".csv"), data);
  }
  res.rows = merged["summary"].size();

  std::string md = "# Merged report\n\nschema: " + version + ", runs: " + std::to_string(res.runs) +
                   ", checks: " + std::to_string(res.rows) + "\n\n";
  for (const auto& name : order) {
    md += "## " + name + "\n\n";
    auto row = [](const std::string& csv_line) {
      std::string out = "|";
      std::string cell;
      bool quoted = false;
      for (char c : csv_line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
          out += " " + cell + " |";
          cell.clear();
        } else cell += c;
      }
      return out + " " + cell + " |\n";
    };
    md += row(header[name]);
    md += "|";
    for (char c : header[name])
      if (c == ',') md += "---|";
    md += "---|\n";
    for (const auto& l : merged[name]) md += row(l);
    md += "\n";
  }
  write_file(fs::path(out_dir) / "summary.md", md);
  nlohmann::json manifest = {{"schema_version", version}, {"runs", run_dirs}, {"rows", res.rows}};
  write_file(fs::path(out_dir) / "merge.json", manifest.dump(2) + "\n");
  return res;
}

}  // namespace gapcert::cli
