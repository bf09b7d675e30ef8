// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Reciprocity (relative) and baseline (absolute) calibration, temperature
// triggered scheduling and residual error metrics.

#ifndef FDSIM_CALIBRATION_HPP
#define FDSIM_CALIBRATION_HPP

#include <vector>

#include "fdsim/impairments.hpp"
#include "fdsim/random.hpp"
#include "fdsim/types.hpp"

namespace fdsim {

/// Complex transmit and receive responses per RF chain.
struct RfChainResponse {
  std::vector<cd> tx;
  std::vector<cd> rx;

  std::size_t chains() const { return tx.size(); }
};

enum class CalibrationMode { Relative, Absolute };

struct CalibrationState {
  CalibrationMode mode = CalibrationMode::Relative;
  int refId = 0;
  std::vector<double> baselinePhaseDeg;
  std::vector<double> baselineGainDb;
  std::vector<cd> coefficients;
  std::vector<double> lastCalTemperatureC;
  std::vector<double> lastCalTimeS;

  bool hasBaseline() const { return !baselinePhaseDeg.empty(); }
};

/// c_i = t_i r_ref / (r_i t_ref). c_ref is exactly 1.
/// Throws DivisionByZero naming the first chain with a zero response.
std::vector<cd> relativeCoefficients(const RfChainResponse& resp, int refId);

/// c_i * uplink_i per chain.
CVector applyRelativeCalibrationToCsi(const CVector& uplink, const std::vector<cd>& coefficients);

/// Absolute-mode state holding `phaseDeg`/`gainDb` as the stored baseline.
CalibrationState makeAbsoluteState(std::vector<double> phaseDeg, std::vector<double> gainDb);

struct ChainCorrection {
  double phaseDeg = 0.0;
  double gainDb = 0.0;
};

/// baseline - measured per chain, phase wrapped to (-180, 180]. Throws
/// NotInitialized without a stored baseline.
std::vector<ChainCorrection> absoluteCalibrate(const CalibrationState& state, const std::vector<double>& measuredPhaseDeg,
                                               const std::vector<double>& measuredGainDb);

/// Reads a chain state with additive Gaussian measurement noise.
struct ChainMeasurement {
  std::vector<double> phaseDeg;
  std::vector<double> gainDb;
};
ChainMeasurement measureChains(const std::vector<double>& phaseDeg, const std::vector<double>& gainDb,
                               double phaseNoiseDeg, double gainNoiseDb, RandomStream& rng);

struct CalibrationEvent {
  int chain = 0;
  double timeS = 0.0;
  double temperatureC = 0.0;
};

struct SchedulerParams {
  double thresholdC = 3.0;
  double maxIntervalS = 1800.0;
  double stepS = 1.0;  // duration of one chain calibration
};

/// Walks the trace sample by sample. A chain is due when its temperature has
/// moved by thresholdC since its last calibration or maxIntervalS has elapsed;
/// due chains are calibrated one at a time, stepS apart. Every chain is
/// calibrated at the start of the trace. Events are in time order.
std::vector<CalibrationEvent> calibrationScheduler(const TemperatureTrace& trace, const SchedulerParams& params = {});

struct PairwiseDrift {
  double phaseDeg = 0.0;
  double gainDb = 0.0;
};

/// Largest pairwise spread of transmit drift across chains over all trace
/// samples, with each chain's drift measured from its latest calibration at or
/// before the sample. With no events the reference is the first sample.
PairwiseDrift worstPairwiseDrift(const TemperatureTrace& trace, const std::vector<CalibrationEvent>& events,
                                 RfPath path = RfPath::Tx, const TemperatureModel& model = {});

struct ResidualError {
  double rmsPhaseDeg = 0.0;
  double rmsGainDb = 0.0;
};

/// RMS over chains of the deviation from the array phase center (circular
/// mean phase) and from the mean gain.
ResidualError residualErrorMetrics(const std::vector<double>& phaseDeg, const std::vector<double>& gainDb);

}  // namespace fdsim

#endif  // FDSIM_CALIBRATION_HPP
