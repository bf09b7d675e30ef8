// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Multiplicative impairments: per-chain phase and magnitude errors, LO phase
// drift (Wiener and Allan-variance models) and temperature-driven drift.

#ifndef FDSIM_IMPAIRMENTS_HPP
#define FDSIM_IMPAIRMENTS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "fdsim/random.hpp"
#include "fdsim/types.hpp"

namespace fdsim {

enum class LoArchitecture { SLO, PLL, CLO, BDS };

std::string_view toString(LoArchitecture arch);
/// Throws InvalidConfiguration for an unknown name.
LoArchitecture parseLoArchitecture(std::string_view name);

struct LoOscillatorParams {
  double phaseNoiseConstant = 0.0;        // c, in s (Wiener diffusion per unit fc^2)
  double integratedPhaseNoiseDbc = -40.0;
  double bandLowHz = 15e3;
  double bandHighHz = 10e6;
  double allanDeviation = 1e-9;  // at gatingPeriodS
  double gatingPeriodS = 1.0;
  double carrierHz = 2e9;
  LoArchitecture architecture = LoArchitecture::SLO;

  void validate() const;
};

struct ImpairmentState {
  std::vector<double> phaseDeg;
  std::vector<double> gainDb;
  std::vector<double> temperatureC;
  double timestampS = 0.0;

  std::size_t chains() const { return phaseDeg.size(); }
};

enum class RfPath { Tx, Rx };

struct TemperatureModel {
  double txPhaseDegPerC = 1.0;
  double txGainDbPerC = -0.1;
  double rxPhaseDegPerC = 29.0 / 90.0;
  double rxGainDbPerC = -2.0 / 60.0;
  // Trace generation.
  double meanC = 45.0;
  double diurnalAmplitudeC = 12.0;    // common trend, peak swing 2x this
  double chainSpreadC = 4.5;          // |per-chain offset| bound
  double sampleIntervalS = 180.0;
};

/// Per-chain temperature series on a uniform time grid.
struct TemperatureTrace {
  std::vector<double> timesS;
  std::vector<std::vector<double>> chainC;  // [chain][sample]

  std::size_t chains() const { return chainC.size(); }
  std::size_t samples() const { return timesS.size(); }
  /// Index of the last sample with time <= t (0 before the first sample).
  std::size_t sampleAt(double t) const;
};

struct DriftDelta {
  double phaseDeg = 0.0;
  double gainDb = 0.0;
};

/// 10^(level/10) rad^2 for an integrated phase noise level in dBc.
double integratedPhaseNoiseVariance(double levelDbc);

/// Wiener phase error variance after tau seconds, sigma2Ts * tau / Ts.
double wienerPhaseErrorVariance(double sigma2Ts, double tauS, double sampleTimeS);

/// Allan-variance phase error variance 4 pi^2 fc^2 (adev * tau_g)^2, valid
/// for 100 us <= tau <= 1 s where adev(tau) * tau is constant. `adev` is the
/// deviation at a 1 s gating period.
double allanPhaseErrorVariance(double fcHz, double adev, double tauS);

/// Inverse of allanPhaseErrorVariance for a target RMS phase error.
double requiredAllanDeviation(double fcHz, double targetRmsDeg);

/// i.i.d. N(0, rms^2) phase offsets in degrees.
std::vector<double> samplePhaseErrors(double rmsDeg, std::size_t n, RandomStream& rng);

/// Standard deviation of the linear magnitude deviation, 10^(rmsDb/10) - 1.
double magnitudeErrorStd(double rmsDb);

/// i.i.d. N(0, s^2) linear gain deviations, s = magnitudeErrorStd(rmsDb).
std::vector<double> sampleMagnitudeErrors(double rmsDb, std::size_t n, RandomStream& rng);

/// Multiplicative amplitude factors max(0, 1 + deviation).
std::vector<double> amplitudeFactors(const std::vector<double>& deviations);

/// E[a] and E[a^2] for a = max(0, 1 + s Z), Z ~ N(0, 1).
struct AmplitudeMoments {
  double mean = 1.0;
  double meanSquare = 1.0;
};
AmplitudeMoments amplitudeMoments(double s);

DriftDelta temperatureDrift(double deltaC, RfPath path, const TemperatureModel& model = {});

/// Common diurnal trend plus bounded, slowly varying per-chain offsets.
TemperatureTrace generateTemperatureTrace(const TemperatureModel& model, double durationS, std::size_t nChains,
                                          RandomStream& rng);

/// RMS phase error (deg) accumulated after `elapsedS` for an LO architecture.
double loArchitectureRmsError(LoArchitecture arch, double elapsedS, const LoOscillatorParams& params = {});

}  // namespace fdsim

#endif  // FDSIM_IMPAIRMENTS_HPP
