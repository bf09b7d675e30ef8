// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// CSV and manifest emission. Numbers are printed with 9 significant digits so
// identical runs produce identical bytes.

#ifndef FDSIM_OUTPUT_HPP
#define FDSIM_OUTPUT_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "fdsim/sim.hpp"

namespace fdsim {

std::string formatNumber(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& add(const std::string& field);
  CsvWriter& add(const char* field) { return add(std::string(field)); }
  CsvWriter& add(double value);
  CsvWriter& add(int value);
  CsvWriter& add(long value);
  CsvWriter& add(std::uint64_t value);
  /// Ends the row; throws InvalidInput when the field count is wrong.
  void endRow();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::vector<std::string> fields_;
};

extern const std::vector<std::string> kSweepHeader;

/// Appends the sweep-schema fields of one point without ending the row.
void addSweepFields(CsvWriter& csv, const SimConfig& cfg, const PointResult& point);
/// One row per grid point in the sweep schema.
void writeSweepRows(CsvWriter& csv, const SimConfig& cfg, const SweepResult& result);
void writeSweepCsv(std::ostream& out, const SimConfig& cfg, const SweepResult& result);

struct RunManifest {
  std::string configHash;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;
  std::string subcommand;
  std::vector<std::string> outputs;
  std::string resolvedConfig;  // JSON text
};

void writeManifest(const std::filesystem::path& path, const RunManifest& manifest);

/// UTC time in ISO-8601.
std::string utcTimestamp();

}  // namespace fdsim

#endif  // FDSIM_OUTPUT_HPP
