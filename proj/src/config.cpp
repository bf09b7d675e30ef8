// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/config.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace fdsim {
namespace {

using nlohmann::json;

// Reads fields out of one JSON object and remembers which keys were used so
// leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InvalidConfiguration(fmt::format("{} must be an object", where()));
  }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw InvalidConfiguration(fmt::format("{}: {}", name(key), e.what()));
    }
  }

  const json* child(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!used_.count(key)) throw InvalidConfiguration(fmt::format("unknown key '{}'", name(key.c_str())));
  }

 private:
  std::string where() const { return path_.empty() ? "top level" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

Duplex parseDuplex(const std::string& s) {
  if (s == "FDD" || s == "fdd") return Duplex::FDD;
  if (s == "TDD" || s == "tdd") return Duplex::TDD;
  throw InvalidConfiguration(fmt::format("duplex must be FDD or TDD (got '{}')", s));
}

PrecoderChoice parsePrecoder(const std::string& s) {
  for (auto p : {PrecoderChoice::Auto, PrecoderChoice::ZF, PrecoderChoice::MF, PrecoderChoice::Codebook})
    if (s == toString(p)) return p;
  if (s == "zf") return PrecoderChoice::ZF;
  if (s == "mf") return PrecoderChoice::MF;
  throw InvalidConfiguration(fmt::format("precoder must be auto, ZF, MF or codebook (got '{}')", s));
}

PortConfig portPair(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw InvalidConfiguration("ports entries must be [v, h] integer pairs");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<PortConfig> parsePorts(const json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number()) return {portPair(j)};
  if (!j.is_array()) throw InvalidConfiguration("ports must be [v, h] or a list of [v, h]");
  std::vector<PortConfig> out;
  for (const auto& e : j) out.push_back(portPair(e));
  return out;
}

void readArray(const json& j, ArrayConfig& a) {
  ObjectReader r(j, "array");
  r.read("rows", a.rows);
  r.read("cols", a.cols);
  r.read("polarizations", a.polarizations);
  r.read("spacing", a.spacing);
  r.read("element_gain_dbi", a.elementGainDbi);
  r.read("carrier_hz", a.carrierHz);
  r.finish();
}

void readChannel(const json& j, ChannelModelParams& c) {
  ObjectReader r(j, "channel");
  r.read("bs_height_m", c.bsHeightM);
  r.read("ue_height_min_m", c.ueHeightMinM);
  r.read("ue_height_max_m", c.ueHeightMaxM);
  r.read("shadowing_db", c.shadowingDb);
  r.read("azimuth_spread_deg", c.azimuthSpreadDeg);
  r.read("elevation_spread_deg", c.elevationSpreadDeg);
  r.read("downtilt_deg", c.downtiltDeg);
  r.read("xpr_db", c.xprDb);
  r.read("los_k_factor_db", c.losKFactorDb);
  r.read("n_clusters", c.nClusters);
  r.read("sector_hpbw_deg", c.sectorHpbwDeg);
  r.read("front_to_back_db", c.frontToBackDb);
  r.read("ue_antennas", c.ueAntennas);
  r.finish();
}

void readTemperature(const json& j, TemperatureModel& t) {
  ObjectReader r(j, "temperature");
  r.read("tx_phase_deg_per_c", t.txPhaseDegPerC);
  r.read("tx_gain_db_per_c", t.txGainDbPerC);
  r.read("rx_phase_deg_per_c", t.rxPhaseDegPerC);
  r.read("rx_gain_db_per_c", t.rxGainDbPerC);
  r.read("mean_c", t.meanC);
  r.read("diurnal_amplitude_c", t.diurnalAmplitudeC);
  r.read("chain_spread_c", t.chainSpreadC);
  r.read("sample_interval_s", t.sampleIntervalS);
  r.finish();
}

void readCalibration(const json& j, CalibrationConfig& c) {
  ObjectReader r(j, "calibration");
  r.read("enabled", c.enabled);
  r.read("temperature_drift", c.temperatureDrift);
  r.read("threshold_c", c.thresholdC);
  r.read("max_interval_s", c.maxIntervalS);
  r.read("trace_duration_s", c.traceDurationS);
  r.read("measurement_noise_deg", c.measurementNoiseDeg);
  r.read("measurement_noise_db", c.measurementNoiseDb);
  r.finish();
}

void readLo(const json& j, SimConfig& cfg) {
  ObjectReader r(j, "lo");
  std::string arch(toString(cfg.lo.architecture));
  r.read("architecture", arch);
  cfg.lo.architecture = parseLoArchitecture(arch);
  r.read("phase_noise_constant", cfg.lo.phaseNoiseConstant);
  r.read("integrated_phase_noise_dbc", cfg.lo.integratedPhaseNoiseDbc);
  r.read("band_low_hz", cfg.lo.bandLowHz);
  r.read("band_high_hz", cfg.lo.bandHighHz);
  r.read("allan_deviation", cfg.lo.allanDeviation);
  r.read("gating_period_s", cfg.lo.gatingPeriodS);
  r.read("carrier_hz", cfg.lo.carrierHz);
  r.read("tau_s", cfg.loTauS);
  r.finish();
}

std::string positionText(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return fmt::format("line {}, column {}", line, col);
}

}  // namespace

SimConfig parseConfigText(std::string_view text) {
  json doc;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (blank) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw InvalidConfiguration(fmt::format("config parse error at {}: {}", positionText(text, e.byte > 0 ? e.byte - 1 : 0), e.what()));
    }
  }

  SimConfig cfg;
  ObjectReader r(doc, "");
  std::string duplex(toString(cfg.duplex));
  r.read("duplex", duplex);
  cfg.duplex = parseDuplex(duplex);
  std::string precoder(toString(cfg.precoder));
  r.read("precoder", precoder);
  cfg.precoder = parsePrecoder(precoder);
  if (const json* p = r.child("ports")) cfg.ports = parsePorts(*p);
  r.read("bandwidth_hz", cfg.bandwidthHz);
  r.read("tx_power_dbm", cfg.txPowerDbm);
  r.read("dl_fraction", cfg.dlFraction);
  r.read("sites", cfg.sites);
  r.read("isd_m", cfg.isdM);
  r.read("users_per_cell", cfg.usersPerCell);
  r.read("drops", cfg.drops);
  r.read("ttis", cfg.ttis);
  r.read("seed", cfg.seed);
  r.read("feedback_period_ms", cfg.feedbackPeriodMs);
  r.read("feedback_delay_ms", cfg.feedbackDelayMs);
  r.read("noise_figure_db", cfg.noiseFigureDb);
  r.read("max_layers", cfg.maxLayers);
  r.read("codebook_oversampling", cfg.codebookOversampling);
  r.read("phase_grid_deg", cfg.phaseGridDeg);
  r.read("magnitude_grid_db", cfg.magnitudeGridDb);
  r.read("redraw_per_tti", cfg.redrawPerTti);
  r.read("other_site_power_scale", cfg.otherSitePowerScale);
  if (const json* j = r.child("calibration")) readCalibration(*j, cfg.calibration);
  if (const json* j = r.child("array")) readArray(*j, cfg.array);
  if (const json* j = r.child("channel")) readChannel(*j, cfg.channel);
  if (const json* j = r.child("temperature")) readTemperature(*j, cfg.temperature);
  if (const json* j = r.child("lo")) readLo(*j, cfg);
  r.finish();
  cfg.validate();
  cfg.lo.validate();
  return cfg;
}

SimConfig parseConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfiguration(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parseConfigText(ss.str());
  } catch (const InvalidConfiguration& e) {
    throw InvalidConfiguration(fmt::format("{}: {}", path.string(), e.what()));
  }
}

json toJson(const SimConfig& cfg) {
  json ports = json::array();
  for (const auto& p : cfg.ports) ports.push_back({p.v, p.h});
  return json{
      {"duplex", std::string(toString(cfg.duplex))},
      {"precoder", std::string(toString(cfg.precoder))},
      {"ports", ports},
      {"bandwidth_hz", cfg.bandwidthHz},
      {"tx_power_dbm", cfg.txPowerDbm},
      {"dl_fraction", cfg.dlFraction},
      {"sites", cfg.sites},
      {"isd_m", cfg.isdM},
      {"users_per_cell", cfg.usersPerCell},
      {"drops", cfg.drops},
      {"ttis", cfg.ttis},
      {"seed", cfg.seed},
      {"feedback_period_ms", cfg.feedbackPeriodMs},
      {"feedback_delay_ms", cfg.feedbackDelayMs},
      {"noise_figure_db", cfg.noiseFigureDb},
      {"max_layers", cfg.maxLayers},
      {"codebook_oversampling", cfg.codebookOversampling},
      {"phase_grid_deg", cfg.phaseGridDeg},
      {"magnitude_grid_db", cfg.magnitudeGridDb},
      {"redraw_per_tti", cfg.redrawPerTti},
      {"other_site_power_scale", cfg.otherSitePowerScale},
      {"calibration",
       {{"enabled", cfg.calibration.enabled},
        {"temperature_drift", cfg.calibration.temperatureDrift},
        {"threshold_c", cfg.calibration.thresholdC},
        {"max_interval_s", cfg.calibration.maxIntervalS},
        {"trace_duration_s", cfg.calibration.traceDurationS},
        {"measurement_noise_deg", cfg.calibration.measurementNoiseDeg},
        {"measurement_noise_db", cfg.calibration.measurementNoiseDb}}},
      {"array",
       {{"rows", cfg.array.rows},
        {"cols", cfg.array.cols},
        {"polarizations", cfg.array.polarizations},
        {"spacing", cfg.array.spacing},
        {"element_gain_dbi", cfg.array.elementGainDbi},
        {"carrier_hz", cfg.array.carrierHz}}},
      {"channel",
       {{"bs_height_m", cfg.channel.bsHeightM},
        {"ue_height_min_m", cfg.channel.ueHeightMinM},
        {"ue_height_max_m", cfg.channel.ueHeightMaxM},
        {"shadowing_db", cfg.channel.shadowingDb},
        {"azimuth_spread_deg", cfg.channel.azimuthSpreadDeg},
        {"elevation_spread_deg", cfg.channel.elevationSpreadDeg},
        {"downtilt_deg", cfg.channel.downtiltDeg},
        {"xpr_db", cfg.channel.xprDb},
        {"los_k_factor_db", cfg.channel.losKFactorDb},
        {"n_clusters", cfg.channel.nClusters},
        {"sector_hpbw_deg", cfg.channel.sectorHpbwDeg},
        {"front_to_back_db", cfg.channel.frontToBackDb},
        {"ue_antennas", cfg.channel.ueAntennas}}},
      {"temperature",
       {{"tx_phase_deg_per_c", cfg.temperature.txPhaseDegPerC},
        {"tx_gain_db_per_c", cfg.temperature.txGainDbPerC},
        {"rx_phase_deg_per_c", cfg.temperature.rxPhaseDegPerC},
        {"rx_gain_db_per_c", cfg.temperature.rxGainDbPerC},
        {"mean_c", cfg.temperature.meanC},
        {"diurnal_amplitude_c", cfg.temperature.diurnalAmplitudeC},
        {"chain_spread_c", cfg.temperature.chainSpreadC},
        {"sample_interval_s", cfg.temperature.sampleIntervalS}}},
      {"lo",
       {{"architecture", std::string(toString(cfg.lo.architecture))},
        {"phase_noise_constant", cfg.lo.phaseNoiseConstant},
        {"integrated_phase_noise_dbc", cfg.lo.integratedPhaseNoiseDbc},
        {"band_low_hz", cfg.lo.bandLowHz},
        {"band_high_hz", cfg.lo.bandHighHz},
        {"allan_deviation", cfg.lo.allanDeviation},
        {"gating_period_s", cfg.lo.gatingPeriodS},
        {"carrier_hz", cfg.lo.carrierHz},
        {"tau_s", cfg.loTauS}}},
  };
}

std::uint64_t configHash(const SimConfig& cfg) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  const std::string text = toJson(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hashHex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

}  // namespace fdsim
