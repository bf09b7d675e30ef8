// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// JSON configuration: parsing with defaults, strict key checking, the
// resolved-config echo and its hash.

#ifndef FDSIM_CONFIG_HPP
#define FDSIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "fdsim/sim.hpp"

namespace fdsim {

/// Parses a JSON document. Absent keys take their defaults; unknown keys,
/// malformed JSON (reported with line and column) and constraint violations
/// raise InvalidConfiguration.
SimConfig parseConfigText(std::string_view text);
SimConfig parseConfigFile(const std::filesystem::path& path);

/// Every field of the resolved configuration.
nlohmann::json toJson(const SimConfig& cfg);

/// FNV-1a 64 of the canonical resolved configuration.
std::uint64_t configHash(const SimConfig& cfg);
std::string hashHex(std::uint64_t hash);

}  // namespace fdsim

#endif  // FDSIM_CONFIG_HPP
