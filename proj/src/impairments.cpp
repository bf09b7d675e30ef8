// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/impairments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace fdsim {

std::string_view toString(LoArchitecture arch) {
  switch (arch) {
    case LoArchitecture::SLO: return "SLO";
    case LoArchitecture::PLL: return "PLL";
    case LoArchitecture::CLO: return "CLO";
    case LoArchitecture::BDS: return "BDS";
  }
  throw InvalidConfiguration("unknown LO architecture");
}

LoArchitecture parseLoArchitecture(std::string_view name) {
  for (auto a : {LoArchitecture::SLO, LoArchitecture::PLL, LoArchitecture::CLO, LoArchitecture::BDS})
    if (toString(a) == name) return a;
  throw InvalidConfiguration(fmt::format("unknown LO architecture '{}'", name));
}

void LoOscillatorParams::validate() const {
  if (!(bandLowHz < bandHighHz)) throw InvalidConfiguration("LO integration band needs f_L < f_H");
  if (!(allanDeviation > 0.0)) throw InvalidConfiguration("Allan deviation must be positive");
  if (integratedPhaseNoiseDbc > 0.0) throw InvalidConfiguration("integrated phase noise must be <= 0 dBc");
}

std::size_t TemperatureTrace::sampleAt(double t) const {
  auto it = std::upper_bound(timesS.begin(), timesS.end(), t);
  if (it == timesS.begin()) return 0;
  return static_cast<std::size_t>(std::distance(timesS.begin(), it) - 1);
}

double integratedPhaseNoiseVariance(double levelDbc) {
  if (levelDbc > 0.0) throw InvalidInput("integrated phase noise level must be <= 0 dBc");
  return std::pow(10.0, levelDbc / 10.0);
}

double wienerPhaseErrorVariance(double sigma2Ts, double tauS, double sampleTimeS) {
  if (tauS < 0.0) throw InvalidInput("elapsed time must be non-negative");
  if (!(sampleTimeS > 0.0)) throw InvalidInput("sample time must be positive");
  return sigma2Ts * (tauS / sampleTimeS);
}

double allanPhaseErrorVariance(double fcHz, double adev, double tauS) {
  if (tauS < 100e-6 || tauS > 1.0)
    throw OutOfModel(fmt::format("elapsed time {} s is outside the 100 us .. 1 s Allan region", tauS));
  // adev(tau) * tau is flat across the region, so it equals adev(1 s) * 1 s.
  const double product = adev * 1.0;
  return 4.0 * kPi * kPi * fcHz * fcHz * product * product;
}

double requiredAllanDeviation(double fcHz, double targetRmsDeg) {
  if (!(targetRmsDeg > 0.0)) throw InvalidInput("target RMS phase error must be positive");
  return deg2rad(targetRmsDeg) / (2.0 * kPi * fcHz);
}

std::vector<double> samplePhaseErrors(double rmsDeg, std::size_t n, RandomStream& rng) {
  if (rmsDeg < 0.0) throw InvalidInput("RMS phase error must be non-negative");
  if (n == 0) throw InvalidInput("need at least one chain");
  std::vector<double> out(n);
  for (auto& x : out) x = rmsDeg * rng.normal();
  return out;
}

double magnitudeErrorStd(double rmsDb) { return std::pow(10.0, rmsDb / 10.0) - 1.0; }

std::vector<double> sampleMagnitudeErrors(double rmsDb, std::size_t n, RandomStream& rng) {
  if (rmsDb < 0.0 || rmsDb > 9.0) throw InvalidInput(fmt::format("RMS magnitude error {} dB outside [0, 9]", rmsDb));
  if (n == 0) throw InvalidInput("need at least one chain");
  const double s = magnitudeErrorStd(rmsDb);
  std::vector<double> out(n);
  for (auto& x : out) x = s * rng.normal();
  return out;
}

std::vector<double> amplitudeFactors(const std::vector<double>& deviations) {
  std::vector<double> out(deviations.size());
  std::transform(deviations.begin(), deviations.end(), out.begin(), [](double d) { return std::max(0.0, 1.0 + d); });
  return out;
}

AmplitudeMoments amplitudeMoments(double s) {
  if (s <= 0.0) return {};
  const double t = 1.0 / s;
  const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
  const double cdf = 0.5 * std::erfc(-t / std::sqrt(2.0));
  return {cdf + s * pdf, (1.0 + s * s) * cdf + s * pdf};
}

DriftDelta temperatureDrift(double deltaC, RfPath path, const TemperatureModel& model) {
  if (path == RfPath::Tx) return {model.txPhaseDegPerC * deltaC, model.txGainDbPerC * deltaC};
  return {model.rxPhaseDegPerC * deltaC, model.rxGainDbPerC * deltaC};
}

TemperatureTrace generateTemperatureTrace(const TemperatureModel& model, double durationS, std::size_t nChains,
                                          RandomStream& rng) {
  if (nChains == 0) throw InvalidInput("need at least one chain");
  if (!(durationS >= 0.0) || !(model.sampleIntervalS > 0.0)) throw InvalidInput("bad trace duration or interval");

  constexpr double kDay = 86400.0;
  constexpr double kWanderTauS = 4.0 * 3600.0;
  constexpr double kChainTauS = 3.0 * 3600.0;
  const double dt = model.sampleIntervalS;
  const auto samples = static_cast<std::size_t>(std::floor(durationS / dt)) + 1;

  // Offsets are bounded by construction: |slope| * swing + |wander| <= spread.
  const double swing = model.diurnalAmplitudeC + 0.25 * model.diurnalAmplitudeC;
  const double slopeMax = 0.5 * model.chainSpreadC / swing;
  const double wanderMax = 0.5 * model.chainSpreadC;

  TemperatureTrace trace;
  trace.timesS.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) trace.timesS[i] = static_cast<double>(i) * dt;

  const double phase0 = rng.uniform(-kPi, kPi);
  const double aCommon = std::exp(-dt / kWanderTauS);
  const double aChain = std::exp(-dt / kChainTauS);
  std::vector<double> common(samples);
  double wander = rng.normal();
  for (std::size_t i = 0; i < samples; ++i) {
    if (i > 0) wander = aCommon * wander + std::sqrt(1.0 - aCommon * aCommon) * rng.normal();
    const double diurnal = model.diurnalAmplitudeC * std::sin(2.0 * kPi * trace.timesS[i] / kDay + phase0);
    common[i] = diurnal + 0.25 * model.diurnalAmplitudeC * std::tanh(wander);
  }

  trace.chainC.assign(nChains, std::vector<double>(samples));
  for (std::size_t c = 0; c < nChains; ++c) {
    const double slope = nChains == 1 ? 0.0 : rng.uniform(-slopeMax, slopeMax);
    double x = rng.normal();
    for (std::size_t i = 0; i < samples; ++i) {
      if (i > 0) x = aChain * x + std::sqrt(1.0 - aChain * aChain) * rng.normal();
      const double offset = nChains == 1 ? 0.0 : slope * common[i] + wanderMax * std::tanh(x);
      trace.chainC[c][i] = model.meanC + common[i] + offset;
    }
  }
  return trace;
}

double loArchitectureRmsError(LoArchitecture arch, double elapsedS, const LoOscillatorParams& params) {
  if (!(elapsedS > 0.0)) throw InvalidInput("elapsed time must be positive");
  constexpr double kPllDriftDeg = 20.0;
  constexpr double kPllRampS = 1800.0;
  switch (arch) {
    case LoArchitecture::SLO:
      return rad2deg(std::sqrt(allanPhaseErrorVariance(params.carrierHz, params.allanDeviation, elapsedS)));
    case LoArchitecture::PLL: return std::min(kPllDriftDeg, kPllDriftDeg * elapsedS / kPllRampS);
    case LoArchitecture::CLO: return 1.0;
    case LoArchitecture::BDS: return 1.3;
  }
  throw InvalidConfiguration("unknown LO architecture");
}

}  // namespace fdsim
