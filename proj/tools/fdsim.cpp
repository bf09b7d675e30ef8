// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// fdsim: sweep driver. Exit codes: 0 ok, 2 bad configuration or usage,
// 3 runtime failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <sstream>

#include "fdsim/cli.hpp"
#include "fdsim/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parseGrid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw fdsim::InvalidConfiguration("bad grid value '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw fdsim::InvalidConfiguration("empty grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("fdsim"));

  CLI::App app{"FD-MIMO multi-cell downlink impairment simulator"};
  app.set_version_flag("--version", FDSIM_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string configPath, gridText, logLevel = "warn";
  std::optional<std::uint64_t> seed;
  std::optional<int> drops, sites;
  fdsim::CliOptions opts;
  std::string outDir = ".";
  double zfMfMag = 1.0;

  app.add_option("--config", configPath, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out-dir", outDir, "output directory");
  app.add_option("--workers", opts.workers, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--drops", drops, "drops per grid point")->check(CLI::PositiveNumber);
  app.add_option("--sites", sites, "number of sites (1, 7, 19)");
  app.add_option("--grid", gridText, "comma-separated grid for the swept axis");
  app.add_option("--log-level", logLevel, "trace, debug, info, warn, error, off");

  const std::map<std::string, std::string> about{
      {"sweep-phase", "throughput versus RMS phase error"},
      {"sweep-magnitude", "throughput versus RMS magnitude error"},
      {"zf-vs-mf", "TDD zero-forcing versus matched filter over phase error"},
      {"single-vs-multi", "normalized degradation, one site versus many"},
      {"lo-analysis", "LO phase error per oscillator architecture"},
      {"null-depth", "residual null depth versus RMS phase error"},
      {"calib-sim", "temperature drift with and without calibration"},
      {"pattern", "azimuth cut of an ideal and an impaired beam"}};
  for (const auto& name : fdsim::subcommands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    if (name == "sweep-phase" || name == "single-vs-multi" || name == "pattern")
      sub->add_option("--magnitude-db", opts.fixedMagnitudeDb, "fixed RMS magnitude error");
    if (name == "sweep-magnitude" || name == "pattern")
      sub->add_option("--phase-deg", opts.fixedPhaseDeg, "fixed RMS phase error");
    if (name == "zf-vs-mf") sub->add_option("--magnitude-db", zfMfMag, "fixed RMS magnitude error");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(logLevel));

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    fdsim::SimConfig cfg = configPath.empty() ? fdsim::SimConfig{} : fdsim::parseConfigFile(configPath);
    if (seed) cfg.seed = *seed;
    if (drops) cfg.drops = *drops;
    if (sites) cfg.sites = *sites;
    if (!gridText.empty()) opts.grid = parseGrid(gridText);
    if (subcommand == "zf-vs-mf") opts.zfMfMagnitudeDb = zfMfMag;
    opts.outDir = outDir;
    for (const auto& path : fdsim::dispatch(subcommand, cfg, opts)) std::cout << path.string() << '\n';
  } catch (const fdsim::InvalidConfiguration& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return EXIT_SUCCESS;
}
