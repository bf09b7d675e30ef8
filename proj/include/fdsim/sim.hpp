// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Drop-based Monte-Carlo orchestration: layout, users, channels, CSI, the
// TTI loop and aggregation over drops and error grids.

#ifndef FDSIM_SIM_HPP
#define FDSIM_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdsim/array.hpp"
#include "fdsim/calibration.hpp"
#include "fdsim/channel.hpp"
#include "fdsim/impairments.hpp"
#include "fdsim/precoding.hpp"

namespace fdsim {

enum class Duplex { FDD, TDD };
enum class PrecoderChoice { Auto, ZF, MF, Codebook };

std::string_view toString(Duplex d);
std::string_view toString(PrecoderChoice p);

struct PortConfig {
  int v = 4;
  int h = 4;

  int total(int polarizations = 2) const { return v * h * polarizations; }
  bool operator==(const PortConfig&) const = default;
};

struct CalibrationConfig {
  bool enabled = false;
  bool temperatureDrift = false;  // inject temperature drift into the transmit chains
  double thresholdC = 3.0;
  double maxIntervalS = 1800.0;
  double traceDurationS = 86400.0;
  double measurementNoiseDeg = 0.0;
  double measurementNoiseDb = 0.0;
};

struct SimConfig {
  Duplex duplex = Duplex::FDD;
  double bandwidthHz = 0.0;     // 0: 10 MHz FDD, 20 MHz TDD
  double txPowerDbm = 0.0;      // 0: 46 dBm at 10 MHz, +3 dB per doubling
  double dlFraction = 0.0;      // 0: 1 for FDD, 0.5 for TDD
  PrecoderChoice precoder = PrecoderChoice::Auto;
  std::vector<PortConfig> ports{{4, 4}};
  int sites = 19;
  double isdM = 500.0;
  int usersPerCell = 10;
  int drops = 30;
  int ttis = 100;
  std::uint64_t seed = 1;
  int feedbackPeriodMs = 5;
  int feedbackDelayMs = 6;
  double noiseFigureDb = 9.0;
  int maxLayers = kMaxLayers;
  int codebookOversampling = 4;
  std::vector<double> phaseGridDeg{0.0};
  std::vector<double> magnitudeGridDb{0.0};
  bool redrawPerTti = false;
  /// Power scale of cells outside the central site; 0 silences them.
  double otherSitePowerScale = 1.0;
  CalibrationConfig calibration;
  ArrayConfig array;
  ChannelModelParams channel;
  TemperatureModel temperature;
  LoOscillatorParams lo;
  double loTauS = 1e-3;

  double effectiveBandwidthHz() const;
  double effectiveTxPowerDbm() const;
  double effectiveDlFraction() const;
  PrecoderKind precoderKind() const;
  /// Thermal noise plus noise figure over the bandwidth, dBm.
  double noisePowerDbm() const;
  /// Throws InvalidConfiguration with an explanation.
  void validate() const;
};

struct GridPoint {
  std::size_t portIndex = 0;
  double rmsPhaseDeg = 0.0;
  double rmsMagnitudeDb = 0.0;
};

/// Cartesian product ports x phase grid x magnitude grid, in that nesting.
std::vector<GridPoint> sweepGrid(const SimConfig& cfg);

/// One drop evaluated at one grid point.
struct DropRecord {
  double meanCellThroughputMbps = 0.0;
  double suFraction = 0.0;
  std::vector<double> userThroughputMbps;  // users served by active cells, by user id
  long scheduledTtis = 0;
};

/// Which CSI report the precoder at a TTI uses: the latest report created on
/// the period grid at or before tti - delay. Negative creation times are
/// warm-up reports.
struct FeedbackTimeline {
  int periodMs = 5;
  int delayMs = 6;

  long reportTimeFor(long ttiMs) const;
};

/// Everything about a drop that does not depend on the error grid.
class DropContext {
 public:
  DropContext(const SimConfig& cfg, const NetworkLayout& layout, std::uint64_t dropIndex);

  DropRecord evaluate(const GridPoint& point) const;

  const UserDrop& users() const { return drop_; }
  const std::vector<bool>& activeCells() const { return active_; }
  /// Port-level channels for one port configuration, normalized to unit noise.
  const ChannelRealization& portChannels(std::size_t portIndex) const { return perPort_[portIndex].channels; }

 private:
  struct PortState {
    ChannelRealization channels;
    std::vector<UserEstimate> estimates;  // by user id
    std::vector<std::vector<double>> driftPhaseDeg;  // [cell][port]
    std::vector<std::vector<double>> driftGainDb;
  };

  void computeDrift(PortState& state, int ports) const;
  CVector portErrors(int cell, std::size_t portIndex, const GridPoint& point, long tti) const;

  const SimConfig& cfg_;
  const NetworkLayout& layout_;
  std::uint64_t dropIndex_;
  UserDrop drop_;
  std::vector<bool> active_;
  std::vector<double> powerScale_;
  std::vector<PortState> perPort_;
};

DropRecord runDrop(const SimConfig& cfg, std::uint64_t dropIndex, const GridPoint& point = {});

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;  // half-width; NaN for a single record
  bool ciDefined = false;
  std::size_t count = 0;
};

/// Mean, sample standard deviation and Student-t 95% half-width.
Summary aggregate(const std::vector<double>& samples);

/// Nearest-rank percentiles of a sample.
double percentile(std::vector<double> samples, double pct);

struct PointResult {
  GridPoint point;
  PortConfig ports;
  Summary throughput;           // over drops, Mbps per cell
  double suFraction = 0.0;
  double userP5 = 0.0, userP50 = 0.0, userP95 = 0.0;
  std::vector<double> userThroughputMbps;
  std::size_t drops = 0;
};

struct SweepResult {
  std::vector<PointResult> points;
};

/// Drops run on up to `workers` OpenMP threads (0: runtime default, capped by
/// FDSIM_MAX_WORKERS). The result does not depend on the worker count.
SweepResult runSweep(const SimConfig& cfg, int workers = 0);
/// Single-threaded reference of runSweep.
SweepResult runSweepSerial(const SimConfig& cfg);

struct SingleVsMulti {
  SweepResult single;
  SweepResult multi;
  /// Throughput normalized to the first grid point, per point.
  std::vector<double> singleNormalized;
  std::vector<double> multiNormalized;
};

SingleVsMulti compareSingleVsMultiCell(const SimConfig& cfg, int workers = 0);

/// Worker count after applying FDSIM_MAX_WORKERS.
int resolveWorkers(int requested);

}  // namespace fdsim

#endif  // FDSIM_SIM_HPP
