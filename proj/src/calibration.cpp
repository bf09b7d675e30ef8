// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fdsim {

std::vector<cd> relativeCoefficients(const RfChainResponse& resp, int refId) {
  const auto n = resp.chains();
  if (resp.rx.size() != n) throw InvalidInput("tx and rx responses differ in chain count");
  if (refId < 0 || static_cast<std::size_t>(refId) >= n) throw InvalidInput(fmt::format("reference chain {} out of range", refId));
  const auto ref = static_cast<std::size_t>(refId);
  if (resp.tx[ref] == 0.0) throw DivisionByZero(fmt::format("reference chain {} has a zero transmit response", refId));
  for (std::size_t i = 0; i < n; ++i)
    if (resp.rx[i] == 0.0) throw DivisionByZero(fmt::format("chain {} has a zero receive response", i));

  const cd refRatio = resp.rx[ref] / resp.tx[ref];
  std::vector<cd> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = i == ref ? cd{1.0, 0.0} : resp.tx[i] / resp.rx[i] * refRatio;
  return c;
}

CVector applyRelativeCalibrationToCsi(const CVector& uplink, const std::vector<cd>& coefficients) {
  if (static_cast<std::size_t>(uplink.size()) != coefficients.size())
    throw InvalidInput("CSI and coefficient chain counts differ");
  CVector out(uplink.size());
  for (Eigen::Index i = 0; i < uplink.size(); ++i) out(i) = coefficients[static_cast<std::size_t>(i)] * uplink(i);
  return out;
}

CalibrationState makeAbsoluteState(std::vector<double> phaseDeg, std::vector<double> gainDb) {
  if (phaseDeg.size() != gainDb.size()) throw InvalidInput("baseline phase and gain differ in chain count");
  CalibrationState s;
  s.mode = CalibrationMode::Absolute;
  s.baselinePhaseDeg = std::move(phaseDeg);
  s.baselineGainDb = std::move(gainDb);
  return s;
}

std::vector<ChainCorrection> absoluteCalibrate(const CalibrationState& state, const std::vector<double>& measuredPhaseDeg,
                                               const std::vector<double>& measuredGainDb) {
  if (state.mode != CalibrationMode::Absolute || !state.hasBaseline())
    throw NotInitialized("absolute calibration needs a stored baseline");
  const auto n = state.baselinePhaseDeg.size();
  if (measuredPhaseDeg.size() != n || measuredGainDb.size() != n)
    throw InvalidInput(fmt::format("expected {} measured chains", n));
  std::vector<ChainCorrection> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {wrapDeg(state.baselinePhaseDeg[i] - measuredPhaseDeg[i]), state.baselineGainDb[i] - measuredGainDb[i]};
  return out;
}

ChainMeasurement measureChains(const std::vector<double>& phaseDeg, const std::vector<double>& gainDb,
                               double phaseNoiseDeg, double gainNoiseDb, RandomStream& rng) {
  if (phaseNoiseDeg < 0.0 || gainNoiseDb < 0.0) throw InvalidInput("measurement noise must be non-negative");
  ChainMeasurement m{phaseDeg, gainDb};
  for (auto& p : m.phaseDeg) p += phaseNoiseDeg * rng.normal();
  for (auto& g : m.gainDb) g += gainNoiseDb * rng.normal();
  return m;
}

std::vector<CalibrationEvent> calibrationScheduler(const TemperatureTrace& trace, const SchedulerParams& params) {
  const auto chains = trace.chains();
  const auto samples = trace.samples();
  for (std::size_t i = 1; i < samples; ++i)
    if (!(trace.timesS[i] > trace.timesS[i - 1])) throw InvalidInput("trace timestamps must increase");

  std::vector<CalibrationEvent> events;
  if (samples == 0) return events;
  std::vector<double> lastTemp(chains);
  std::vector<double> lastSampleTime(chains, -std::numeric_limits<double>::infinity());
  double busyUntil = trace.timesS.front();
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = trace.timesS[i];
    busyUntil = std::max(busyUntil, t);
    for (std::size_t c = 0; c < chains; ++c) {
      const double temp = trace.chainC[c][i];
      const bool due = i == 0 || std::abs(temp - lastTemp[c]) >= params.thresholdC ||
                       t - lastSampleTime[c] >= params.maxIntervalS;
      if (!due) continue;
      events.push_back({static_cast<int>(c), busyUntil, temp});
      busyUntil += params.stepS;
      lastTemp[c] = temp;
      lastSampleTime[c] = t;
    }
  }
  return events;
}

PairwiseDrift worstPairwiseDrift(const TemperatureTrace& trace, const std::vector<CalibrationEvent>& events, RfPath path,
                                 const TemperatureModel& model) {
  const auto chains = trace.chains();
  const auto samples = trace.samples();
  PairwiseDrift worst;
  if (chains == 0 || samples == 0) return worst;

  std::vector<double> refTemp(chains);
  for (std::size_t c = 0; c < chains; ++c) refTemp[c] = trace.chainC[c][0];
  std::size_t next = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    // Events triggered by this sample complete before the next one.
    const double horizon = i + 1 < samples ? trace.timesS[i + 1] : std::numeric_limits<double>::infinity();
    while (next < events.size() && events[next].timeS < horizon) {
      refTemp[static_cast<std::size_t>(events[next].chain)] = events[next].temperatureC;
      ++next;
    }
    double pMin = std::numeric_limits<double>::infinity(), pMax = -pMin;
    double gMin = pMin, gMax = -pMin;
    for (std::size_t c = 0; c < chains; ++c) {
      const DriftDelta d = temperatureDrift(trace.chainC[c][i] - refTemp[c], path, model);
      pMin = std::min(pMin, d.phaseDeg);
      pMax = std::max(pMax, d.phaseDeg);
      gMin = std::min(gMin, d.gainDb);
      gMax = std::max(gMax, d.gainDb);
    }
    worst.phaseDeg = std::max(worst.phaseDeg, pMax - pMin);
    worst.gainDb = std::max(worst.gainDb, gMax - gMin);
  }
  return worst;
}

ResidualError residualErrorMetrics(const std::vector<double>& phaseDeg, const std::vector<double>& gainDb) {
  if (phaseDeg.size() != gainDb.size()) throw InvalidInput("phase and gain differ in chain count");
  if (phaseDeg.empty()) return {};
  const auto n = static_cast<double>(phaseDeg.size());
  cd center{0.0, 0.0};
  double meanGain = 0.0;
  for (std::size_t i = 0; i < phaseDeg.size(); ++i) {
    center += std::polar(1.0, deg2rad(phaseDeg[i]));
    meanGain += gainDb[i];
  }
  meanGain /= n;
  const double centerDeg = std::abs(center) > 0.0 ? rad2deg(std::arg(center)) : 0.0;
  double sp = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < phaseDeg.size(); ++i) {
    const double dp = wrapDeg(phaseDeg[i] - centerDeg);
    const double dg = gainDb[i] - meanGain;
    sp += dp * dp;
    sg += dg * dg;
  }
  return {std::sqrt(sp / n), std::sqrt(sg / n)};
}

}  // namespace fdsim
