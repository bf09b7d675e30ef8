// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Subcommand dispatch behind the fdsim executable.

#ifndef FDSIM_CLI_HPP
#define FDSIM_CLI_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdsim/sim.hpp"

namespace fdsim {

struct CliOptions {
  std::filesystem::path outDir = ".";
  int workers = 0;
  std::optional<std::vector<double>> grid;  // overrides the subcommand's swept grid
  double fixedMagnitudeDb = 0.0;            // sweep-phase, single-vs-multi, pattern
  double fixedPhaseDeg = 0.0;               // sweep-magnitude, pattern
  std::optional<double> zfMfMagnitudeDb;    // zf-vs-mf, 1 dB when unset
};

const std::vector<std::string>& subcommands();

/// The configuration a subcommand actually runs (grids and duplex adjusted).
SimConfig resolveForSubcommand(const std::string& subcommand, const SimConfig& cfg, const CliOptions& opts);

/// Runs a subcommand and writes `<subcommand>.csv` plus
/// `<subcommand>.manifest.json` into opts.outDir. Returns the written paths.
/// Unknown subcommands raise InvalidConfiguration.
std::vector<std::filesystem::path> dispatch(const std::string& subcommand, const SimConfig& cfg,
                                            const CliOptions& opts);

}  // namespace fdsim

#endif  // FDSIM_CLI_HPP
