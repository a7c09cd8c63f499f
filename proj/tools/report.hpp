#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "config.hpp"

namespace gapcert::cli {

inline constexpr const char* kSchemaVersion = "gapcert-report/1";

enum ExitCode : int { kSuccess = 0, kInconclusive = 2, kFails = 3, kRuntimeError = 1, kUsage = 64 };

// A table whose every column names the operation that produced it.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> sources;  // one per column
  std::vector<std::vector<nlohmann::json>> rows;

  void add_column(std::string col, std::string source) {
    columns.push_back(std::move(col));
    sources.push_back(std::move(source));
  }
  std::string csv() const;
  nlohmann::json json() const;
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "==", ...
  std::string source;
};

class Report {
 public:
  Report(std::string task, const Config& cfg);

  // A sourced scalar result.
  void value(const std::string& key, double v, const std::string& source);
  void text(const std::string& key, const std::string& v);
  void check(Check c) { checks_.push_back(std::move(c)); }
  void table(Table t) { tables_.push_back(std::move(t)); }
  // Extra entries of the constants ledger (fitted filter constants and the like).
  void constant(const std::string& name, double v, const std::string& source);

  bool all_passed() const;
  void set_status(std::string status, int exit_code);
  int exit_code() const { return exit_code_; }

  nlohmann::json json() const;
  // Flat rows of the checks: the schema report_merge relies on.
  Table summary() const;
  // Writes report.json, summary.csv and one CSV per table into `dir`.
  void write(const std::string& dir) const;

 private:
  std::string task_;
  const Config& cfg_;
  nlohmann::json results_ = nlohmann::json::object();
  nlohmann::json extra_constants_ = nlohmann::json::object();
  std::vector<Check> checks_;
  std::vector<Table> tables_;
  std::string status_ = "pass";
  int exit_code_ = kSuccess;
};

// Value formatting shared by every CSV writer: shortest round-trip form.
std::string format_number(double v);

struct MergeResult {
  std::size_t runs = 0;
  std::size_t rows = 0;
};

// Concatenates summary.csv and the same-named table CSVs of every run dir into `out_dir`,
// and writes summary.md. Throws std::runtime_error on an empty list, a missing report,
// mismatched schema versions or mismatched table headers.
MergeResult report_merge(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace gapcert::cli
