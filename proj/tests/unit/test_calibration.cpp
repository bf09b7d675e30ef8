// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include <cmath>

#include "fdsim/calibration.hpp"

using namespace fdsim;

namespace {

TemperatureTrace flatTrace(std::size_t chains, double durationS, double intervalS = 180.0, double c = 40.0) {
  TemperatureTrace t;
  for (double s = 0.0; s <= durationS; s += intervalS) t.timesS.push_back(s);
  t.chainC.assign(chains, std::vector<double>(t.timesS.size(), c));
  return t;
}

std::vector<std::pair<int, double>> flatten(const std::vector<CalibrationEvent>& ev) {
  std::vector<std::pair<int, double>> out;
  for (const auto& e : ev) out.emplace_back(e.chain, e.timeS);
  return out;
}

}  // namespace

TEST_CASE("relative coefficients equalize the tx/rx ratio") {
  auto rng = RandomStream::derive(1, 0, Purpose::Test);
  RfChainResponse resp;
  for (int i = 0; i < 8; ++i) {
    resp.tx.push_back(std::polar(0.5 + rng.uniform(), rng.uniform(-3.0, 3.0)));
    resp.rx.push_back(std::polar(0.5 + rng.uniform(), rng.uniform(-3.0, 3.0)));
  }
  const int ref = 3;
  const auto c = relativeCoefficients(resp, ref);
  CHECK(c[ref] == cd(1.0, 0.0));
  const cd k = resp.rx[ref] / resp.tx[ref];
  for (int i = 0; i < 8; ++i) CHECK(std::abs(c[i] * resp.rx[i] / resp.tx[i] - k) < 1e-12);

  // Calibrated uplink CSI equals the downlink channel up to one common factor.
  CVector prop(8), uplink(8);
  for (int i = 0; i < 8; ++i) {
    prop(i) = std::polar(1.0, 0.3 * i);
    uplink(i) = prop(i) * resp.rx[i];
  }
  const CVector cal = applyRelativeCalibrationToCsi(uplink, c);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(cal(i) / (prop(i) * resp.tx[i]) - k) < 1e-12);
}

TEST_CASE("relative calibration failure modes") {
  RfChainResponse resp{{1.0, 0.0, 1.0}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(relativeCoefficients(resp, 1), DivisionByZero);
  CHECK_NOTHROW(relativeCoefficients(resp, 0));
  resp.rx[2] = 0.0;
  try {
    relativeCoefficients(resp, 0);
    FAIL("expected DivisionByZero");
  } catch (const DivisionByZero& e) {
    CHECK(std::string(e.what()).find("chain 2") != std::string::npos);
  }
  CHECK_THROWS_AS(relativeCoefficients(resp, 7), InvalidInput);
  CHECK_THROWS_AS(applyRelativeCalibrationToCsi(CVector::Ones(2), {1.0}), InvalidInput);
}

TEST_CASE("absolute calibration restores the baseline") {
  const auto state = makeAbsoluteState({10.0, -170.0, 0.0}, {0.5, 0.0, -1.0});
  const std::vector<double> measuredPhase{12.0, 175.0, 0.0};
  const std::vector<double> measuredGain{0.2, 0.3, -1.0};
  const auto corr = absoluteCalibrate(state, measuredPhase, measuredGain);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(wrapDeg(measuredPhase[i] + corr[i].phaseDeg - state.baselinePhaseDeg[i]) == doctest::Approx(0.0));
    CHECK(measuredGain[i] + corr[i].gainDb == doctest::Approx(state.baselineGainDb[i]));
    CHECK(std::abs(corr[i].phaseDeg) <= 180.0);
  }
  CHECK(corr[1].phaseDeg == doctest::Approx(15.0));
  CHECK_THROWS_AS(absoluteCalibrate(CalibrationState{}, measuredPhase, measuredGain), NotInitialized);
  CHECK_THROWS_AS(absoluteCalibrate(state, {1.0}, {1.0}), InvalidInput);
}

TEST_CASE("measurement noise") {
  auto rng = RandomStream::derive(2, 0, Purpose::Test);
  const auto exact = measureChains({1.0, 2.0}, {0.1, 0.2}, 0.0, 0.0, rng);
  CHECK(exact.phaseDeg == std::vector<double>{1.0, 2.0});
  std::vector<double> zeros(20000, 0.0);
  const auto m = measureChains(zeros, zeros, 2.0, 0.5, rng);
  double sp = 0, sg = 0;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    sp += m.phaseDeg[i] * m.phaseDeg[i];
    sg += m.gainDb[i] * m.gainDb[i];
  }
  CHECK(std::sqrt(sp / zeros.size()) == doctest::Approx(2.0).epsilon(0.03));
  CHECK(std::sqrt(sg / zeros.size()) == doctest::Approx(0.5).epsilon(0.03));
  CHECK_THROWS_AS(measureChains(zeros, zeros, -1.0, 0.0, rng), InvalidInput);
}

TEST_CASE("scheduler calibrates everything at start and then every max interval") {
  const auto ev = calibrationScheduler(flatTrace(2, 3600.0));
  const std::vector<std::pair<int, double>> expected{{0, 0.0}, {1, 1.0}, {0, 1800.0}, {1, 1801.0}, {0, 3600.0}, {1, 3601.0}};
  CHECK(flatten(ev) == expected);
}

TEST_CASE("scheduler reacts to the temperature threshold") {
  auto trace = flatTrace(2, 3600.0);
  for (std::size_t s = 3; s < trace.samples(); ++s) trace.chainC[0][s] += 3.0;
  const auto ev = calibrationScheduler(trace);
  const std::vector<std::pair<int, double>> expected{{0, 0.0}, {1, 1.0}, {0, 540.0}, {1, 1800.0}, {0, 2340.0}, {1, 3600.0}};
  CHECK(flatten(ev) == expected);
  CHECK(ev[2].temperatureC == doctest::Approx(43.0));

  auto below = flatTrace(2, 900.0);
  for (std::size_t s = 3; s < below.samples(); ++s) below.chainC[0][s] += 2.9;
  CHECK(calibrationScheduler(below).size() == 2);
}

TEST_CASE("scheduler spaces simultaneous events by the step") {
  const auto ev = calibrationScheduler(flatTrace(32, 0.0), {3.0, 1800.0, 2.5});
  REQUIRE(ev.size() == 32);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].timeS == doctest::Approx(2.5 * i));
}

TEST_CASE("scheduler rejects non-increasing timestamps") {
  auto trace = flatTrace(1, 540.0);
  trace.timesS[2] = trace.timesS[1];
  CHECK_THROWS_AS(calibrationScheduler(trace), InvalidInput);
}

TEST_CASE("pairwise drift with and without calibration") {
  auto trace = flatTrace(3, 1800.0);
  for (std::size_t s = 0; s < trace.samples(); ++s) {
    trace.chainC[0][s] += 0.5 * s;  // ramps to +5 C
    trace.chainC[2][s] -= 0.2 * s;
  }
  const auto raw = worstPairwiseDrift(trace, {});
  CHECK(raw.phaseDeg == doctest::Approx(7.0));  // 1 deg/C tx
  CHECK(raw.gainDb == doctest::Approx(0.7));

  const auto ev = calibrationScheduler(trace);
  const auto cal = worstPairwiseDrift(trace, ev);
  CHECK(cal.phaseDeg < raw.phaseDeg);
  // A chain is recalibrated before its drift reaches the threshold.
  CHECK(cal.phaseDeg < 2.0 * 3.0);
}

TEST_CASE("residual metrics remove the common phase and gain") {
  const auto r = residualErrorMetrics({170.0, -170.0, 180.0}, {1.0, 1.0, 1.0});
  CHECK(r.rmsPhaseDeg == doctest::Approx(std::sqrt(200.0 / 3.0)));
  CHECK(r.rmsGainDb == doctest::Approx(0.0));
  const auto g = residualErrorMetrics({0.0, 0.0}, {0.0, 2.0});
  CHECK(g.rmsGainDb == doctest::Approx(1.0));
}
