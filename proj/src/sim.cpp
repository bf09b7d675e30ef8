// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/sim.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <omp.h>
#include <spdlog/spdlog.h>

#include "fdsim/kernels.hpp"

namespace fdsim {
namespace {

constexpr double kThermalDbmPerHz = -174.0;
constexpr double kReferenceTxPowerDbm = 46.0;
constexpr double kReferenceBandwidthHz = 10e6;

struct Decision {
  std::vector<int> users;
  CMatrix w;
  bool su = true;
};

std::uint64_t u64(long long x) { return static_cast<std::uint64_t>(x); }

}  // namespace

std::string_view toString(Duplex d) { return d == Duplex::FDD ? "FDD" : "TDD"; }

std::string_view toString(PrecoderChoice p) {
  switch (p) {
    case PrecoderChoice::Auto: return "auto";
    case PrecoderChoice::ZF: return "ZF";
    case PrecoderChoice::MF: return "MF";
    case PrecoderChoice::Codebook: return "codebook";
  }
  return "?";
}

double SimConfig::effectiveBandwidthHz() const {
  if (bandwidthHz > 0.0) return bandwidthHz;
  return duplex == Duplex::FDD ? 10e6 : 20e6;
}

double SimConfig::effectiveTxPowerDbm() const {
  if (txPowerDbm != 0.0) return txPowerDbm;
  return kReferenceTxPowerDbm + lin2db(effectiveBandwidthHz() / kReferenceBandwidthHz);
}

double SimConfig::effectiveDlFraction() const {
  if (dlFraction > 0.0) return dlFraction;
  return duplex == Duplex::FDD ? 1.0 : 0.5;
}

PrecoderKind SimConfig::precoderKind() const {
  switch (precoder) {
    case PrecoderChoice::ZF: return PrecoderKind::ZF;
    case PrecoderChoice::MF: return PrecoderKind::MF;
    case PrecoderChoice::Codebook: return PrecoderKind::Codebook;
    case PrecoderChoice::Auto: break;
  }
  return duplex == Duplex::FDD ? PrecoderKind::Codebook : PrecoderKind::ZF;
}

double SimConfig::noisePowerDbm() const {
  return kThermalDbmPerHz + lin2db(effectiveBandwidthHz()) + noiseFigureDb;
}

void SimConfig::validate() const {
  array.validate();
  if (ports.empty()) throw InvalidConfiguration("at least one port configuration is required");
  for (const auto& p : ports) mapPortsToElements(array, p.v, p.h);
  if (sites != 1 && sites != 7 && sites != 19)
    throw InvalidConfiguration(fmt::format("sites must be 1, 7 or 19 (got {})", sites));
  if (!(isdM > 0.0)) throw InvalidConfiguration("isd_m must be positive");
  if (usersPerCell < 1) throw InvalidConfiguration("users_per_cell must be >= 1");
  if (drops < 1) throw InvalidConfiguration("drops must be >= 1");
  if (ttis < 1) throw InvalidConfiguration("ttis must be >= 1");
  if (feedbackPeriodMs < 1) throw InvalidConfiguration("feedback_period_ms must be >= 1");
  if (feedbackDelayMs < 0) throw InvalidConfiguration("feedback_delay_ms must be >= 0");
  if (maxLayers < 1 || maxLayers > kMaxLayers)
    throw InvalidConfiguration(fmt::format("max_layers must be in 1..{}", kMaxLayers));
  if (codebookOversampling < 1) throw InvalidConfiguration("codebook_oversampling must be >= 1");
  if (bandwidthHz < 0.0) throw InvalidConfiguration("bandwidth_hz must be non-negative");
  if (dlFraction < 0.0 || dlFraction > 1.0) throw InvalidConfiguration("dl_fraction must be in [0, 1]");
  if (phaseGridDeg.empty()) throw InvalidConfiguration("phase grid must not be empty");
  if (magnitudeGridDb.empty()) throw InvalidConfiguration("magnitude grid must not be empty");
  for (double p : phaseGridDeg)
    if (!(p >= 0.0)) throw InvalidConfiguration(fmt::format("RMS phase error {} must be >= 0", p));
  for (double m : magnitudeGridDb)
    if (!(m >= 0.0 && m <= 9.0)) throw InvalidConfiguration(fmt::format("RMS magnitude error {} outside [0, 9] dB", m));
  if (!(otherSitePowerScale >= 0.0 && otherSitePowerScale <= 1.0))
    throw InvalidConfiguration("other_site_power_scale must be in [0, 1]");
  if (channel.ueAntennas < 1) throw InvalidConfiguration("ue_antennas must be >= 1");
  if (calibration.thresholdC <= 0.0 || calibration.maxIntervalS <= 0.0 || calibration.traceDurationS <= 0.0)
    throw InvalidConfiguration("calibration threshold, interval and trace duration must be positive");
}

std::vector<GridPoint> sweepGrid(const SimConfig& cfg) {
  std::vector<GridPoint> grid;
  for (std::size_t p = 0; p < cfg.ports.size(); ++p)
    for (double ph : cfg.phaseGridDeg)
      for (double mag : cfg.magnitudeGridDb) grid.push_back({p, ph, mag});
  return grid;
}

long FeedbackTimeline::reportTimeFor(long ttiMs) const {
  const long latest = ttiMs - delayMs;
  const long q = latest >= 0 ? latest / periodMs : -((-latest + periodMs - 1) / periodMs);
  return q * periodMs;
}

DropContext::DropContext(const SimConfig& cfg, const NetworkLayout& layout, std::uint64_t dropIndex)
    : cfg_(cfg), layout_(layout), dropIndex_(dropIndex) {
  const int numCells = layout.numCells();
  auto dropRng = RandomStream::derive(cfg.seed, dropIndex, Purpose::UserDrop);
  drop_ = dropUsers(layout, cfg.usersPerCell, dropRng, cfg.channel);
  assignLargeScale(layout, drop_, cfg.array, cfg.channel, cfg.seed, dropIndex);

  powerScale_.assign(static_cast<std::size_t>(numCells), 1.0);
  active_.assign(static_cast<std::size_t>(numCells), true);
  std::vector<double> offsetDb(static_cast<std::size_t>(numCells), 0.0);
  for (const auto& cell : layout.cells) {
    if (cell.site == 0) continue;
    const auto c = static_cast<std::size_t>(cell.id);
    powerScale_[c] = cfg.otherSitePowerScale;
    active_[c] = cfg.otherSitePowerScale > 0.0;
    offsetDb[c] = active_[c] ? lin2db(cfg.otherSitePowerScale) : -std::numeric_limits<double>::infinity();
  }
  servingCell(drop_, layout, offsetDb);
  for (auto& user : drop_.users)
    if (!active_[static_cast<std::size_t>(user.dropCell)]) user.serving = -1;

  const double snrScale = std::sqrt(db2lin(cfg.effectiveTxPowerDbm() - cfg.noisePowerDbm()));
  std::vector<CMatrix> combiners;
  perPort_.resize(cfg.ports.size());
  for (std::size_t p = 0; p < cfg.ports.size(); ++p) {
    combiners.push_back(mapPortsToElements(cfg.array, cfg.ports[p].v, cfg.ports[p].h).combiner(cfg.array));
    auto& ch = perPort_[p].channels;
    ch.numCells = numCells;
    ch.numUsers = drop_.numUsers();
    ch.h.assign(static_cast<std::size_t>(numCells) * static_cast<std::size_t>(ch.numUsers), CMatrix());
  }

  for (int c = 0; c < numCells; ++c) {
    if (!active_[static_cast<std::size_t>(c)]) continue;
    const double scale = snrScale * std::sqrt(powerScale_[static_cast<std::size_t>(c)]);
    for (const auto& user : drop_.users) {
      if (user.serving < 0) continue;
      auto rng = RandomStream::derive(cfg.seed, dropIndex, Purpose::SmallScale, {u64(c), u64(user.id)});
      const CMatrix elem = linkChannel(drop_.link(c, user.id), cfg.array, cfg.channel, rng);
      for (std::size_t p = 0; p < cfg.ports.size(); ++p) {
        auto& ch = perPort_[p].channels;
        ch.h[static_cast<std::size_t>(c) * static_cast<std::size_t>(ch.numUsers) + static_cast<std::size_t>(user.id)] =
            scale * (elem * combiners[p]);
      }
    }
  }

  for (std::size_t p = 0; p < cfg.ports.size(); ++p) {
    auto& state = perPort_[p];
    const int nPorts = cfg.ports[p].total(cfg.array.polarizations);
    std::optional<Codebook> cb;
    if (cfg.duplex == Duplex::FDD)
      cb = buildCodebook(cfg.ports[p].v, cfg.ports[p].h, cfg.codebookOversampling, cfg.array.polarizations);
    state.estimates.assign(static_cast<std::size_t>(drop_.numUsers()), UserEstimate{});
    for (const auto& user : drop_.users) {
      if (user.serving < 0) continue;
      const CMatrix& h = state.channels.at(user.serving, user.id);
      double interferenceNoise = 1.0;
      for (int c = 0; c < numCells; ++c)
        if (c != user.serving && active_[static_cast<std::size_t>(c)])
          interferenceNoise += state.channels.at(c, user.id).squaredNorm() / static_cast<double>(h.rows() * nPorts);

      UserEstimate est;
      est.user = user.id;
      est.interferenceNoise = interferenceNoise;
      if (cfg.duplex == Duplex::TDD) {
        const Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU);
        est.direction = svd.matrixU().col(0).adjoint() * h;
        est.beam = est.direction.adjoint().normalized();
      } else {
        const CsiReport report = selectPmiCqi(h, *cb, interferenceNoise);
        est.beam = cb->codewords.col(report.pmi);
        // A CQI of 0 still leaves a usable (if weak) direction.
        const double gamma = report.cqi > 0 ? report.sinrEstimate : 1e-3;
        est.direction = std::sqrt(gamma * interferenceNoise) * est.beam.adjoint();
      }
      state.estimates[static_cast<std::size_t>(user.id)] = std::move(est);
    }
    computeDrift(state, nPorts);
  }
}

void DropContext::computeDrift(PortState& state, int ports) const {
  const auto numCells = static_cast<std::size_t>(layout_.numCells());
  state.driftPhaseDeg.assign(numCells, std::vector<double>(static_cast<std::size_t>(ports), 0.0));
  state.driftGainDb.assign(numCells, std::vector<double>(static_cast<std::size_t>(ports), 0.0));
  const auto& cal = cfg_.calibration;
  if (!cal.temperatureDrift) return;

  auto timeRng = RandomStream::derive(cfg_.seed, dropIndex_, Purpose::TraceTime);
  const double t = timeRng.uniform(0.0, cal.traceDurationS);
  SchedulerParams sched;
  sched.thresholdC = cal.thresholdC;
  sched.maxIntervalS = cal.maxIntervalS;
  for (std::size_t c = 0; c < numCells; ++c) {
    if (!active_[c]) continue;
    auto rng = RandomStream::derive(cfg_.seed, dropIndex_, Purpose::Temperature, {u64(c), u64(ports)});
    const TemperatureTrace trace =
        generateTemperatureTrace(cfg_.temperature, cal.traceDurationS, static_cast<std::size_t>(ports), rng);
    const std::size_t i = trace.sampleAt(t);
    std::vector<double> ref(static_cast<std::size_t>(ports));
    for (std::size_t k = 0; k < ref.size(); ++k) ref[k] = trace.chainC[k][0];
    if (cal.enabled) {
      const double horizon = i + 1 < trace.samples() ? trace.timesS[i + 1] : std::numeric_limits<double>::infinity();
      for (const auto& e : calibrationScheduler(trace, sched)) {
        if (e.timeS >= horizon) break;
        ref[static_cast<std::size_t>(e.chain)] = e.temperatureC;
      }
    }
    auto noise = RandomStream::derive(cfg_.seed, dropIndex_, Purpose::CalibrationNoise, {u64(c), u64(ports)});
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const DriftDelta d = temperatureDrift(trace.chainC[k][i] - ref[k], RfPath::Tx, cfg_.temperature);
      state.driftPhaseDeg[c][k] = d.phaseDeg;
      state.driftGainDb[c][k] = d.gainDb;
      if (cal.enabled) {
        state.driftPhaseDeg[c][k] += cal.measurementNoiseDeg * noise.normal();
        state.driftGainDb[c][k] += cal.measurementNoiseDb * noise.normal();
      }
    }
  }
}

CVector DropContext::portErrors(int cell, std::size_t portIndex, const GridPoint& point, long tti) const {
  const int ports = cfg_.ports[portIndex].total(cfg_.array.polarizations);
  const std::uint64_t ttiKey = cfg_.redrawPerTti ? u64(tti + 1) : 0;
  auto phaseRng = RandomStream::derive(cfg_.seed, dropIndex_, Purpose::PhaseError, {u64(cell), u64(ports), ttiKey});
  auto magRng = RandomStream::derive(cfg_.seed, dropIndex_, Purpose::MagnitudeError, {u64(cell), u64(ports), ttiKey});
  const auto n = static_cast<std::size_t>(ports);
  const std::vector<double> phase = samplePhaseErrors(point.rmsPhaseDeg, n, phaseRng);
  std::vector<double> amp = amplitudeFactors(sampleMagnitudeErrors(point.rmsMagnitudeDb, n, magRng));
  const auto& driftPhase = perPort_[portIndex].driftPhaseDeg[static_cast<std::size_t>(cell)];
  const auto& driftGain = perPort_[portIndex].driftGainDb[static_cast<std::size_t>(cell)];

  for (std::size_t k = 0; k < n; ++k) amp[k] *= std::pow(10.0, driftGain[k] / 20.0);
  CVector e(ports);
  for (std::size_t k = 0; k < n; ++k)
    e(static_cast<Eigen::Index>(k)) = std::polar(amp[k], deg2rad(phase[k] + driftPhase[k]));
  return e;
}

DropRecord DropContext::evaluate(const GridPoint& point) const {
  if (point.portIndex >= cfg_.ports.size()) throw InvalidInput("grid point port index out of range");
  const auto& state = perPort_[point.portIndex];
  const int numCells = layout_.numCells();
  const PrecoderKind kind = cfg_.precoderKind();
  const ImpairmentStatistics stats = impairmentStatistics(point.rmsPhaseDeg, point.rmsMagnitudeDb);
  const double rateScale = cfg_.effectiveDlFraction() / 1e6;
  const double bw = cfg_.effectiveBandwidthHz();

  std::vector<std::vector<int>> served(static_cast<std::size_t>(numCells));
  for (const auto& user : drop_.users)
    if (user.serving >= 0) served[static_cast<std::size_t>(user.serving)].push_back(user.id);

  std::vector<RoundRobinScheduler> rr(static_cast<std::size_t>(numCells));
  std::vector<std::map<std::size_t, Decision>> cache(static_cast<std::size_t>(numCells));
  std::vector<CVector> errors(static_cast<std::size_t>(numCells));
  if (!cfg_.redrawPerTti)
    for (int c = 0; c < numCells; ++c)
      if (active_[static_cast<std::size_t>(c)]) errors[static_cast<std::size_t>(c)] = portErrors(c, point.portIndex, point, 0);

  DropRecord rec;
  rec.userThroughputMbps.assign(static_cast<std::size_t>(drop_.numUsers()), 0.0);
  std::vector<double> cellSum(static_cast<std::size_t>(numCells), 0.0);
  long decisions = 0;
  long suDecisions = 0;

  for (long tti = 0; tti < cfg_.ttis; ++tti) {
    std::vector<CellTransmission> tx;
    for (int c = 0; c < numCells; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      if (!active_[ci] || served[ci].empty()) continue;
      const std::size_t cursor = rr[ci].cursor();
      const std::vector<int> candidates = rr[ci].next(served[ci], cfg_.maxLayers);
      auto it = cache[ci].find(cursor);
      if (it == cache[ci].end()) {
        std::vector<UserEstimate> est;
        for (int u : candidates) est.push_back(state.estimates[static_cast<std::size_t>(u)]);
        SwitchDecision d = suMuSwitch(est, kind, stats);
        Decision dec;
        for (int k : d.users) dec.users.push_back(candidates[static_cast<std::size_t>(k)]);
        dec.w = std::move(d.precoder.w);
        dec.su = d.mode == MimoMode::SU;
        it = cache[ci].emplace(cursor, std::move(dec)).first;
      }
      if (cfg_.redrawPerTti) errors[ci] = portErrors(c, point.portIndex, point, tti);
      CellTransmission t;
      t.cell = c;
      t.users = it->second.users;
      t.x = errors[ci].asDiagonal() * it->second.w;
      tx.push_back(std::move(t));
      ++decisions;
      if (it->second.su) ++suDecisions;
    }

    const auto sinrs = linkSinrParallel(state.channels, tx);
    for (std::size_t s = 0; s < tx.size(); ++s)
      for (std::size_t l = 0; l < tx[s].users.size(); ++l) {
        const double rate = sinrToRate(sinrs[s][l], bw) * rateScale;
        cellSum[static_cast<std::size_t>(tx[s].cell)] += rate;
        rec.userThroughputMbps[static_cast<std::size_t>(tx[s].users[l])] += rate;
      }
  }

  const double ttis = static_cast<double>(cfg_.ttis);
  int activeCount = 0;
  double total = 0.0;
  for (int c = 0; c < numCells; ++c) {
    if (!active_[static_cast<std::size_t>(c)]) continue;
    ++activeCount;
    total += cellSum[static_cast<std::size_t>(c)] / ttis;
  }
  rec.meanCellThroughputMbps = activeCount > 0 ? total / activeCount : 0.0;
  rec.suFraction = decisions > 0 ? static_cast<double>(suDecisions) / static_cast<double>(decisions) : 1.0;
  rec.scheduledTtis = decisions;
  std::vector<double> users;
  for (const auto& user : drop_.users)
    if (user.serving >= 0) users.push_back(rec.userThroughputMbps[static_cast<std::size_t>(user.id)] / ttis);
  rec.userThroughputMbps = std::move(users);
  return rec;
}

DropRecord runDrop(const SimConfig& cfg, std::uint64_t dropIndex, const GridPoint& point) {
  cfg.validate();
  const NetworkLayout layout = buildLayout(cfg.sites, cfg.isdM);
  return DropContext(cfg, layout, dropIndex).evaluate(point);
}

Summary aggregate(const std::vector<double>& samples) {
  if (samples.empty()) throw InvalidInput("cannot aggregate an empty sample");
  Summary s;
  s.count = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) {
    s.ci95 = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  const boost::math::students_t dist(static_cast<double>(s.count - 1));
  s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * s.stddev / std::sqrt(static_cast<double>(s.count));
  s.ciDefined = true;
  return s;
}

double percentile(std::vector<double> samples, double pct) {
  if (samples.empty()) throw InvalidInput("cannot take a percentile of an empty sample");
  if (!(pct >= 0.0 && pct <= 100.0)) throw InvalidInput("percentile must be in [0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(samples.size())));
  return samples[rank == 0 ? 0 : rank - 1];
}

int resolveWorkers(int requested) {
  int workers = requested > 0 ? requested : omp_get_max_threads();
  if (const char* env = std::getenv("FDSIM_MAX_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap > 0) workers = std::min(workers, cap);
  }
  return std::max(workers, 1);
}

namespace {

SweepResult collect(const SimConfig& cfg, const std::vector<GridPoint>& grid,
                    const std::vector<std::vector<DropRecord>>& records) {
  SweepResult out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    PointResult pr;
    pr.point = grid[g];
    pr.ports = cfg.ports[grid[g].portIndex];
    std::vector<double> tput;
    double su = 0.0;
    for (const auto& drop : records) {
      const DropRecord& r = drop[g];
      tput.push_back(r.meanCellThroughputMbps);
      su += r.suFraction;
      pr.userThroughputMbps.insert(pr.userThroughputMbps.end(), r.userThroughputMbps.begin(), r.userThroughputMbps.end());
    }
    pr.throughput = aggregate(tput);
    pr.suFraction = su / static_cast<double>(records.size());
    pr.drops = records.size();
    if (!pr.userThroughputMbps.empty()) {
      pr.userP5 = percentile(pr.userThroughputMbps, 5.0);
      pr.userP50 = percentile(pr.userThroughputMbps, 50.0);
      pr.userP95 = percentile(pr.userThroughputMbps, 95.0);
    }
    out.points.push_back(std::move(pr));
  }
  return out;
}

void logMagnitudePowerEffect(const SimConfig& cfg) {
  for (double db : cfg.magnitudeGridDb) {
    if (db <= 0.0) continue;
    const double ms = amplitudeMoments(magnitudeErrorStd(db)).meanSquare;
    spdlog::info("magnitude error {} dB RMS raises mean transmit power by {:.2f} dB", db, lin2db(ms));
  }
}

std::vector<DropRecord> runOneDrop(const SimConfig& cfg, const NetworkLayout& layout, const std::vector<GridPoint>& grid,
                                   std::uint64_t d) {
  const DropContext ctx(cfg, layout, d);
  std::vector<DropRecord> recs;
  recs.reserve(grid.size());
  for (const auto& g : grid) recs.push_back(ctx.evaluate(g));
  return recs;
}

}  // namespace

SweepResult runSweep(const SimConfig& cfg, int workers) {
  cfg.validate();
  logMagnitudePowerEffect(cfg);
  const NetworkLayout layout = buildLayout(cfg.sites, cfg.isdM);
  const auto grid = sweepGrid(cfg);
  std::vector<std::vector<DropRecord>> records(static_cast<std::size_t>(cfg.drops));
  const int threads = resolveWorkers(workers);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int d = 0; d < cfg.drops; ++d) {
    try {
      records[static_cast<std::size_t>(d)] = runOneDrop(cfg, layout, grid, static_cast<std::uint64_t>(d));
    } catch (...) {
#pragma omp critical(fdsim_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return collect(cfg, grid, records);
}

SweepResult runSweepSerial(const SimConfig& cfg) {
  cfg.validate();
  logMagnitudePowerEffect(cfg);
  const NetworkLayout layout = buildLayout(cfg.sites, cfg.isdM);
  const auto grid = sweepGrid(cfg);
  std::vector<std::vector<DropRecord>> records;
  for (int d = 0; d < cfg.drops; ++d) records.push_back(runOneDrop(cfg, layout, grid, static_cast<std::uint64_t>(d)));
  return collect(cfg, grid, records);
}

SingleVsMulti compareSingleVsMultiCell(const SimConfig& cfg, int workers) {
  SimConfig single = cfg;
  single.sites = 1;
  SingleVsMulti out;
  out.multi = runSweep(cfg, workers);
  out.single = runSweep(single, workers);
  auto normalize = [](const SweepResult& r) {
    std::vector<double> n;
    for (const auto& p : r.points) {
      // Reference: same ports and magnitude error, first phase grid value.
      const PointResult* ref = &p;
      for (const auto& q : r.points)
        if (q.point.portIndex == p.point.portIndex && q.point.rmsMagnitudeDb == p.point.rmsMagnitudeDb) {
          ref = &q;
          break;
        }
      n.push_back(ref->throughput.mean > 0.0 ? p.throughput.mean / ref->throughput.mean : 0.0);
    }
    return n;
  };
  out.singleNormalized = normalize(out.single);
  out.multiNormalized = normalize(out.multi);
  return out;
}

}  // namespace fdsim
