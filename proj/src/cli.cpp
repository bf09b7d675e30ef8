// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/cli.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <spdlog/spdlog.h>

#include "fdsim/config.hpp"
#include "fdsim/output.hpp"

namespace fdsim {

namespace {

const std::vector<double> kDefaultPhaseGrid{0, 10, 20, 40, 60, 80, 100, 120};
const std::vector<double> kDefaultMagnitudeGrid{0, 0.5, 1, 1.5, 2, 3, 4};

bool isDefaultGrid(const std::vector<double>& g) { return g.size() == 1 && g.front() == 0.0; }

std::vector<double> sweptGrid(const std::vector<double>& fromConfig, const std::vector<double>& fallback,
                              const CliOptions& opts) {
  if (opts.grid) return *opts.grid;
  return isDefaultGrid(fromConfig) ? fallback : fromConfig;
}

std::ofstream openOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

using Runner = std::function<void(const SimConfig&, const CliOptions&, std::ostream&)>;

void runSweepCommand(const SimConfig& cfg, const CliOptions& opts, std::ostream& out) {
  writeSweepCsv(out, cfg, runSweep(cfg, opts.workers));
}

void runZfVsMf(const SimConfig& cfg, const CliOptions& opts, std::ostream& out) {
  CsvWriter csv(out, kSweepHeader);
  for (auto choice : {PrecoderChoice::ZF, PrecoderChoice::MF}) {
    SimConfig c = cfg;
    c.precoder = choice;
    writeSweepRows(csv, c, runSweep(c, opts.workers));
  }
}

void runSingleVsMulti(const SimConfig& cfg, const CliOptions& opts, std::ostream& out) {
  auto header = kSweepHeader;
  header.insert(header.begin(), {"scenario", "sites"});
  header.push_back("normalized_tput");
  CsvWriter csv(out, header);
  const auto cmp = compareSingleVsMultiCell(cfg, opts.workers);
  auto emit = [&](const char* name, int sites, const SweepResult& r, const std::vector<double>& norm) {
    SimConfig c = cfg;
    c.sites = sites;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      csv.add(name).add(sites);
      addSweepFields(csv, c, r.points[i]);
      csv.add(norm[i]).endRow();
    }
  };
  emit("single", 1, cmp.single, cmp.singleNormalized);
  emit("multi", cfg.sites, cmp.multi, cmp.multiNormalized);
}

void runLoAnalysis(const SimConfig& cfg, const CliOptions&, std::ostream& out) {
  CsvWriter csv(out, {"architecture", "fc_hz", "adev", "tau_s", "phase_var_rad2", "rms_phase_deg"});
  for (auto arch : {LoArchitecture::SLO, LoArchitecture::PLL, LoArchitecture::CLO, LoArchitecture::BDS}) {
    const double rms = loArchitectureRmsError(arch, cfg.loTauS, cfg.lo);
    const double rad = deg2rad(rms);
    csv.add(std::string(toString(arch)))
        .add(cfg.lo.carrierHz)
        .add(cfg.lo.allanDeviation)
        .add(cfg.loTauS)
        .add(rad * rad)
        .add(rms)
        .endRow();
  }
}

void runNullDepth(const SimConfig& cfg, const CliOptions&, std::ostream& out) {
  CsvWriter csv(out, {"rms_phase_deg", "null_depth_db"});
  for (double g : cfg.phaseGridDeg) csv.add(g).add(nullDepthFromPhaseError(g)).endRow();
}

void runCalibSim(const SimConfig& cfg, const CliOptions& opts, std::ostream& out) {
  CsvWriter csv(out, {"scenario", "events", "worst_phase_drift_deg", "worst_gain_drift_db", "mean_cell_tput_mbps",
                      "ci95_mbps", "n_drops"});
  const int chains = cfg.ports.front().total(cfg.array.polarizations);
  auto rng = RandomStream::derive(cfg.seed, 0, Purpose::Temperature, {0, static_cast<std::uint64_t>(chains)});
  const auto trace = generateTemperatureTrace(cfg.temperature, cfg.calibration.traceDurationS, chains, rng);
  const auto events = calibrationScheduler(trace, {cfg.calibration.thresholdC, cfg.calibration.maxIntervalS, 1.0});

  struct Scenario {
    const char* name;
    bool drift;
    bool calibrated;
  };
  for (const Scenario s : {Scenario{"ideal", false, false}, Scenario{"uncalibrated", true, false},
                           Scenario{"calibrated", true, true}}) {
    SimConfig c = cfg;
    c.calibration.temperatureDrift = s.drift;
    c.calibration.enabled = s.calibrated;
    PairwiseDrift worst;
    long nEvents = 0;
    if (s.drift) {
      const std::vector<CalibrationEvent> none;
      worst = worstPairwiseDrift(trace, s.calibrated ? events : none, RfPath::Tx, cfg.temperature);
      nEvents = s.calibrated ? static_cast<long>(events.size()) : 0L;
    }
    const auto r = runSweep(c, opts.workers);
    const auto& p = r.points.front();
    csv.add(s.name).add(nEvents).add(worst.phaseDeg).add(worst.gainDb).add(p.throughput.mean)
        .add(p.throughput.ci95).add(p.drops).endRow();
  }
}

void runPattern(const SimConfig& cfg, const CliOptions& opts, std::ostream& out) {
  CsvWriter csv(out, {"azimuth_deg", "ideal_db", "impaired_db"});
  ArrayConfig one = cfg.array;
  one.polarizations = 1;
  const CVector ideal = steeringVector(one, 0.0, 0.0) / std::sqrt(static_cast<double>(one.elements()));
  auto rng = RandomStream::derive(cfg.seed, 0, Purpose::PhaseError, {0, static_cast<std::uint64_t>(ideal.size())});
  const auto phase = samplePhaseErrors(opts.fixedPhaseDeg, ideal.size(), rng);
  const auto amp = amplitudeFactors(sampleMagnitudeErrors(opts.fixedMagnitudeDb, ideal.size(), rng));
  CVector impaired = ideal;
  for (Eigen::Index i = 0; i < impaired.size(); ++i)
    impaired(i) *= amp[i] * std::polar(1.0, deg2rad(phase[i]));
  for (int az = -90; az <= 90; ++az)
    csv.add(az).add(arrayFactor(one, ideal, az, 0.0)).add(arrayFactor(one, impaired, az, 0.0)).endRow();
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"sweep-phase", runSweepCommand},  {"sweep-magnitude", runSweepCommand}, {"zf-vs-mf", runZfVsMf},
      {"single-vs-multi", runSingleVsMulti}, {"lo-analysis", runLoAnalysis},   {"null-depth", runNullDepth},
      {"calib-sim", runCalibSim},        {"pattern", runPattern}};
  return table;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"sweep-phase", "sweep-magnitude", "zf-vs-mf",   "single-vs-multi",
                                              "lo-analysis", "null-depth",      "calib-sim", "pattern"};
  return names;
}

SimConfig resolveForSubcommand(const std::string& sub, const SimConfig& cfg, const CliOptions& opts) {
  if (!runners().count(sub)) throw InvalidConfiguration(fmt::format("unknown subcommand '{}'", sub));
  SimConfig c = cfg;
  if (sub == "sweep-phase" || sub == "single-vs-multi") {
    c.phaseGridDeg = sweptGrid(cfg.phaseGridDeg, kDefaultPhaseGrid, opts);
    c.magnitudeGridDb = {opts.fixedMagnitudeDb};
  } else if (sub == "sweep-magnitude") {
    c.magnitudeGridDb = sweptGrid(cfg.magnitudeGridDb, kDefaultMagnitudeGrid, opts);
    c.phaseGridDeg = {opts.fixedPhaseDeg};
  } else if (sub == "zf-vs-mf") {
    c.duplex = Duplex::TDD;
    c.phaseGridDeg = sweptGrid(cfg.phaseGridDeg, kDefaultPhaseGrid, opts);
    c.magnitudeGridDb = {opts.zfMfMagnitudeDb.value_or(1.0)};
  } else if (sub == "null-depth") {
    c.phaseGridDeg = sweptGrid(cfg.phaseGridDeg, {3.0, 20.0}, opts);
  } else if (sub == "calib-sim") {
    c.phaseGridDeg = {0.0};
    c.magnitudeGridDb = {0.0};
  }
  c.validate();
  return c;
}

std::vector<std::filesystem::path> dispatch(const std::string& sub, const SimConfig& cfg, const CliOptions& opts) {
  const SimConfig c = resolveForSubcommand(sub, cfg, opts);
  std::filesystem::create_directories(opts.outDir);
  const auto csvPath = opts.outDir / (sub + ".csv");
  const auto manifestPath = opts.outDir / (sub + ".manifest.json");
  spdlog::info("{}: {} grid points, {} drops, seed {}", sub, sweepGrid(c).size(), c.drops, c.seed);
  {
    auto out = openOut(csvPath);
    runners().at(sub)(c, opts, out);
  }
  RunManifest m;
  m.configHash = hashHex(configHash(c));
  m.seed = c.seed;
  m.version = FDSIM_VERSION;
  m.timestamp = utcTimestamp();
  m.subcommand = sub;
  m.outputs = {csvPath.filename().string()};
  m.resolvedConfig = toJson(c).dump();
  writeManifest(manifestPath, m);
  return {csvPath, manifestPath};
}

}  // namespace fdsim
