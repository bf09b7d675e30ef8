// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/output.hpp"

#include <chrono>
#include <cmath>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>

namespace fdsim {

const std::vector<std::string> kSweepHeader = {
    "duplex",         "precoder",      "v_ports",             "h_ports",   "total_ports",
    "rms_phase_deg",  "rms_mag_db",    "mean_cell_tput_mbps", "ci95_mbps", "su_fraction",
    "n_drops",        "n_ttis",        "seed"};

std::string formatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  return fmt::format("{:.9g}", x);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  fields_ = header;
  endRow();
}

CsvWriter& CsvWriter::add(const std::string& field) {
  if (field.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : field) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    fields_.push_back(quoted + "\"");
  } else {
    fields_.push_back(field);
  }
  return *this;
}

CsvWriter& CsvWriter::add(double value) { return add(formatNumber(value)); }
CsvWriter& CsvWriter::add(int value) { return add(std::to_string(value)); }
CsvWriter& CsvWriter::add(long value) { return add(std::to_string(value)); }
CsvWriter& CsvWriter::add(std::uint64_t value) { return add(std::to_string(value)); }

void CsvWriter::endRow() {
  if (fields_.size() != columns_)
    throw InvalidInput(fmt::format("CSV row has {} fields, header has {}", fields_.size(), columns_));
  for (std::size_t i = 0; i < fields_.size(); ++i) out_ << (i ? "," : "") << fields_[i];
  out_ << '\n';
  fields_.clear();
}

namespace {
std::string precoderLabel(const SimConfig& cfg) {
  if (cfg.precoder != PrecoderChoice::Auto) return std::string(toString(cfg.precoder));
  return cfg.precoderKind() == PrecoderKind::Codebook ? "codebook" : "ZF";
}
}  // namespace

void addSweepFields(CsvWriter& csv, const SimConfig& cfg, const PointResult& p) {
  csv.add(std::string(toString(cfg.duplex)))
      .add(precoderLabel(cfg))
      .add(p.ports.v)
      .add(p.ports.h)
      .add(p.ports.total(cfg.array.polarizations))
      .add(p.point.rmsPhaseDeg)
      .add(p.point.rmsMagnitudeDb)
      .add(p.throughput.mean)
      .add(p.throughput.ci95)
      .add(p.suFraction)
      .add(p.drops)
      .add(cfg.ttis)
      .add(cfg.seed);
}

void writeSweepRows(CsvWriter& csv, const SimConfig& cfg, const SweepResult& result) {
  for (const auto& p : result.points) {
    addSweepFields(csv, cfg, p);
    csv.endRow();
  }
}

void writeSweepCsv(std::ostream& out, const SimConfig& cfg, const SweepResult& result) {
  CsvWriter csv(out, kSweepHeader);
  writeSweepRows(csv, cfg, result);
}

void writeManifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json j{{"config_hash", m.configHash}, {"seed", m.seed},       {"version", m.version},
                   {"timestamp", m.timestamp},    {"subcommand", m.subcommand}, {"outputs", m.outputs}};
  if (!m.resolvedConfig.empty()) j["resolved_config"] = nlohmann::json::parse(m.resolvedConfig);
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write manifest '{}'", path.string()));
  out << j.dump(2) << '\n';
}

std::string utcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

}  // namespace fdsim
