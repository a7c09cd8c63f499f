#include <CLI11.hpp>

#include <iostream>

#include "config.hpp"
#include "pipelines.hpp"
#include "report.hpp"

using namespace gapcert::cli;

int main(int argc, char** argv) {
  CLI::App app{"gapcert: stability certificates, code families, filters and exact-diagonalisation checks"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, constants;
  int64_t seed = -1;
  std::vector<std::string> run_dirs;
  const std::pair<const char*, const char*> subs[] = {
      {"certify", "tail sums, intervals and a verdict for a code-family model"},
      {"families", "parameters and growth profile of a concrete code"},
      {"edlab", "exact-diagonalisation checks on small codes"},
      {"filters", "filter transforms, bounds and the tail lemma"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for randomized checks (overrides the config)");
    sub->add_option("--constants", constants, "constant overrides, e.g. c_W=2,c_D=0.5");
  }
  auto* rep = app.add_subcommand("report", "merge run directories");
  rep->add_option("--out", out_dir, "output directory")->required();
  rep->add_option("runs", run_dirs, "run directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    if (task == "report") {
      const auto r = report_merge(run_dirs, out_dir);
      std::cout << "merged " << r.runs << " runs, " << r.rows << " check rows into " << out_dir << "\n";
      return kSuccess;
    }
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    if (seed >= 0) cfg.set("", "seed", std::to_string(seed));
    for (const auto& [k, v] : parse_constants(constants)) cfg.set("constants", k, v);
    if (out_dir.empty()) out_dir = cfg.text("", "out", "");
    if (out_dir.empty()) throw UsageError("no output directory: pass --out or set 'out' in the config");
    const int code = run_task(task, cfg, out_dir, std::cerr);
    std::cout << task << ": exit " << code << ", artifacts in " << out_dir << "\n";
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
