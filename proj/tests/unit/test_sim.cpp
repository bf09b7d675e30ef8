// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "fdsim/sim.hpp"

using namespace fdsim;

namespace {

SimConfig small() {
  SimConfig c;
  c.sites = 1;
  c.usersPerCell = 4;
  c.drops = 3;
  c.ttis = 12;
  c.ports = {{1, 2}, {2, 2}};
  c.phaseGridDeg = {0.0, 40.0};
  return c;
}

void checkIdentical(const SweepResult& a, const SweepResult& b) {
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].throughput.mean == b.points[i].throughput.mean);
    CHECK(a.points[i].suFraction == b.points[i].suFraction);
    CHECK(a.points[i].userThroughputMbps == b.points[i].userThroughputMbps);
  }
}

}  // namespace

TEST_CASE("aggregate uses the Student-t interval") {
  const auto s = aggregate({1.0, 2.0, 3.0, 4.0});
  const double sd = std::sqrt(5.0 / 3.0);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.stddev == doctest::Approx(sd));
  CHECK(s.ci95 == doctest::Approx(3.182446305284263 * sd / 2.0));
  CHECK(s.ciDefined);
  CHECK(s.count == 4);
  const auto one = aggregate({5.0});
  CHECK(one.mean == 5.0);
  CHECK(std::isnan(one.ci95));
  CHECK_FALSE(one.ciDefined);
  CHECK_THROWS_AS(aggregate({}), InvalidInput);
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> x{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  CHECK(percentile(x, 50.0) == 5.0);
  CHECK(percentile(x, 95.0) == 10.0);
  CHECK(percentile(x, 5.0) == 1.0);
  CHECK(percentile(x, 100.0) == 10.0);
}

TEST_CASE("feedback timeline") {
  const FeedbackTimeline f{5, 6};
  CHECK(f.reportTimeFor(6) == 0);
  CHECK(f.reportTimeFor(10) == 0);
  CHECK(f.reportTimeFor(11) == 5);
  CHECK(f.reportTimeFor(0) == -10);
  CHECK(f.reportTimeFor(5) == -5);
  for (long t = 0; t < 200; ++t) {
    const long r = f.reportTimeFor(t);
    CHECK(r % 5 == 0);
    CHECK(r <= t - 6);
    CHECK(r > t - 6 - 5);
  }
}

TEST_CASE("grid nesting is ports, phase, magnitude") {
  SimConfig c = small();
  c.magnitudeGridDb = {0.0, 1.0};
  const auto g = sweepGrid(c);
  REQUIRE(g.size() == 8);
  CHECK(g[1].rmsMagnitudeDb == 1.0);
  CHECK(g[2].rmsPhaseDeg == 40.0);
  CHECK(g[4].portIndex == 1);
}

TEST_CASE("configuration validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.ports = {{5, 4}};
  CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
  c = SimConfig{};
  c.sites = 5;
  CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
  c = SimConfig{};
  c.magnitudeGridDb = {10.0};
  CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
  c = SimConfig{};
  c.drops = 0;
  CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
}

TEST_CASE("duplex-dependent defaults") {
  SimConfig c;
  CHECK(c.effectiveBandwidthHz() == 10e6);
  CHECK(c.effectiveTxPowerDbm() == doctest::Approx(46.0));
  CHECK(c.effectiveDlFraction() == 1.0);
  CHECK(c.precoderKind() == PrecoderKind::Codebook);
  CHECK(c.noisePowerDbm() == doctest::Approx(-174.0 + 70.0 + 9.0));
  c.duplex = Duplex::TDD;
  CHECK(c.effectiveBandwidthHz() == 20e6);
  CHECK(c.effectiveTxPowerDbm() == doctest::Approx(46.0 + 10.0 * std::log10(2.0)));
  CHECK(c.effectiveDlFraction() == 0.5);
  CHECK(c.precoderKind() == PrecoderKind::ZF);
}

TEST_CASE("same seed, same numbers; different seed, different numbers") {
  const SimConfig c = small();
  checkIdentical(runSweepSerial(c), runSweepSerial(c));
  SimConfig d = c;
  d.seed = 2;
  CHECK(runSweepSerial(d).points[0].throughput.mean != runSweepSerial(c).points[0].throughput.mean);
}

TEST_CASE("parallel sweep is bit-identical to the serial reference") {
  for (auto duplex : {Duplex::FDD, Duplex::TDD}) {
    SimConfig c = small();
    c.duplex = duplex;
    c.magnitudeGridDb = {0.0, 1.0};
    const auto ref = runSweepSerial(c);
    checkIdentical(ref, runSweep(c, 1));
    checkIdentical(ref, runSweep(c, 4));
  }
}

TEST_CASE("silenced neighbours reproduce the single-site run") {
  for (auto duplex : {Duplex::FDD, Duplex::TDD}) {
    SimConfig one = small();
    one.duplex = duplex;
    SimConfig seven = one;
    seven.sites = 7;
    seven.otherSitePowerScale = 0.0;
    for (const auto& point : sweepGrid(one)) {
      for (std::uint64_t drop = 0; drop < 2; ++drop) {
        const auto a = runDrop(one, drop, point);
        const auto b = runDrop(seven, drop, point);
        CHECK(a.meanCellThroughputMbps == b.meanCellThroughputMbps);
        CHECK(a.userThroughputMbps == b.userThroughputMbps);
        CHECK(a.suFraction == b.suFraction);
      }
    }
  }
}

TEST_CASE("drop records are sane") {
  SimConfig c = small();
  const auto r = runDrop(c, 0);
  CHECK(r.meanCellThroughputMbps > 0.0);
  CHECK(r.suFraction >= 0.0);
  CHECK(r.suFraction <= 1.0);
  CHECK(r.userThroughputMbps.size() == 12u);
  double sum = 0.0;
  for (double u : r.userThroughputMbps) {
    CHECK(u >= 0.0);
    sum += u;
  }
  CHECK(sum / 3.0 == doctest::Approx(r.meanCellThroughputMbps));
}

TEST_CASE("a large phase error costs throughput") {
  SimConfig c = small();
  c.ports = {{2, 2}};
  c.phaseGridDeg = {0.0, 120.0};
  const auto r = runSweepSerial(c);
  CHECK(r.points[1].throughput.mean < r.points[0].throughput.mean);
}

TEST_CASE("worker cap from the environment") {
  ::setenv("FDSIM_MAX_WORKERS", "2", 1);
  CHECK(resolveWorkers(8) == 2);
  CHECK(resolveWorkers(1) == 1);
  ::unsetenv("FDSIM_MAX_WORKERS");
  CHECK(resolveWorkers(3) == 3);
}
