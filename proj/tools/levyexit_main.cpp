#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "levyexit/commands.hpp"

namespace {

int fail(const std::string& message, const std::vector<std::string>& violations = {}) {
  nlohmann::json err{{"error", message}};
  if (!violations.empty()) err["violations"] = violations;
  std::cerr << err.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levyexit: first-exit times of SDEs driven by alpha-stable Levy noise"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"theory", "closed-form exit-time predictions"},
      {"simulate", "Monte Carlo exit records and summary per eps"},
      {"sweep", "mean exit time across eps with a scaling fit"},
      {"deviation", "tube-deviation probability of the small-jump process"},
      {"validate", "potential, scale-constant, split and feasibility checks"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: config value or all cores)");
  }
  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "repeat the run recorded in a manifest.json");
  rerun->add_option("--manifest", manifest_path)->required();
  rerun->add_option("--out", out_dir, "output directory");
  rerun->add_option("--workers", workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rerun->parsed()) return levyexit::rerun_from_manifest(manifest_path, out_dir, workers);
    const std::string command = app.get_subcommands().front()->get_name();
    auto req = levyexit::make_request(command, levyexit::io::read_file(config_path), out_dir, workers, seed);
    return levyexit::dispatch(req);
  } catch (const levyexit::ConfigError& e) {
    return fail("invalid configuration", e.violations());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}
