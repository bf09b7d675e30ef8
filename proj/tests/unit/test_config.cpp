// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include "fdsim/config.hpp"

using namespace fdsim;

namespace {
std::string errorOf(std::string_view text) {
  try {
    parseConfigText(text);
  } catch (const InvalidConfiguration& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("empty document gives defaults") {
  const auto a = parseConfigText("");
  const auto b = parseConfigText("{}");
  CHECK(configHash(a) == configHash(SimConfig{}));
  CHECK(configHash(b) == configHash(SimConfig{}));
}

TEST_CASE("resolved config round-trips with the same hash") {
  const auto cfg = parseConfigText(R"({
    "duplex": "TDD", "sites": 7, "ports": [[1, 2], [4, 4]], "seed": 99,
    "phase_grid_deg": [0, 20, 40], "magnitude_grid_db": [0, 1.5],
    "calibration": {"enabled": true, "temperature_drift": true, "threshold_c": 2.0},
    "channel": {"elevation_spread_deg": 5.0}, "lo": {"architecture": "PLL", "tau_s": 0.01}
  })");
  CHECK((cfg.duplex == Duplex::TDD));
  CHECK(cfg.ports.size() == 2);
  CHECK(cfg.ports[1] == PortConfig{4, 4});
  CHECK(cfg.calibration.thresholdC == 2.0);
  CHECK((cfg.lo.architecture == LoArchitecture::PLL));
  CHECK(cfg.loTauS == 0.01);
  const auto again = parseConfigText(toJson(cfg).dump());
  CHECK(configHash(again) == configHash(cfg));
  CHECK(toJson(again) == toJson(cfg));
  CHECK(configHash(cfg) != configHash(SimConfig{}));
}

TEST_CASE("a single port pair is accepted") {
  const auto cfg = parseConfigText(R"({"ports": [2, 4]})");
  REQUIRE(cfg.ports.size() == 1);
  CHECK(cfg.ports[0] == PortConfig{2, 4});
}

TEST_CASE("unknown keys are rejected by path") {
  CHECK(errorOf(R"({"sitez": 7})").find("unknown key 'sitez'") != std::string::npos);
  CHECK(errorOf(R"({"channel": {"shadow": 1}})").find("unknown key 'channel.shadow'") != std::string::npos);
}

TEST_CASE("malformed JSON reports a position") {
  const auto msg = errorOf("{\n  \"sites\": 7,\n  oops\n}");
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("constraint violations are configuration errors") {
  CHECK_FALSE(errorOf(R"({"ports": [5, 4]})").empty());
  CHECK_FALSE(errorOf(R"({"sites": 4})").empty());
  CHECK_FALSE(errorOf(R"({"duplex": "XDD"})").empty());
  CHECK_FALSE(errorOf(R"({"drops": "ten"})").empty());
  CHECK_FALSE(errorOf(R"({"magnitude_grid_db": [12]})").empty());
}

TEST_CASE("hash text") {
  CHECK(hashHex(0x1234) == "0000000000001234");
  CHECK_THROWS_AS(parseConfigFile("/nonexistent/fdsim.json"), InvalidConfiguration);
}
