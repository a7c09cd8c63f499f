#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace gapcert::cli {

// Each pipeline writes its artifacts into out_dir and returns the exit code.
// Config problems throw UsageError; missing inputs throw std::runtime_error.
int run_certify(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_families(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_edlab(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_filters(const Config& cfg, const std::string& out_dir, std::ostream& log);

int run_task(const std::string& task, const Config& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace gapcert::cli
