// kahler-cli: runs one experiment from an INI config and writes a JSON report.
// Exit codes: 0 all invariants pass, 2 an invariant failed, 1 crash or bad config.
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kahler/commands.hpp"
#include "kahler/common.hpp"
#include "kahler/config.hpp"
#include "kahler/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete Kahler geometry experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir, t_list;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  for (const auto& name : kahler::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI experiment file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--t", t_list, "comma separated t values");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    kahler::ExperimentConfig cfg = config_path.empty() ? kahler::ExperimentConfig{} : kahler::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (!t_list.empty()) cfg.ts = kahler::parse_double_list(t_list);
    kahler::set_workers(cfg.workers);

    auto res = kahler::run_command(cmd, cfg);
    const auto& inv = res.report["invariants"];
    int failed = 0;
    for (const auto& j : inv) failed += !j["pass"].get<bool>();
    std::cout << cmd << ": " << (res.pass ? "PASS" : "FAIL") << " (" << inv.size() - failed << "/" << inv.size()
              << " invariants)\n";
    for (const auto& j : inv)
      if (!j["pass"].get<bool>()) std::cout << "  failed " << j["name"].get<std::string>() << " value " << j["value"].dump()
                                            << (j.contains("bound") ? " bound " + j["bound"].dump() : "") << "\n";
    for (const auto& f : res.files) std::cout << "  wrote " << cfg.out_dir << "/" << f << "\n";
    return res.pass ? 0 : 2;
  } catch (const kahler::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "crash: " << e.what() << "\n";
    return 1;
  }
}
