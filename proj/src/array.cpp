// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/array.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fdsim {

void ArrayConfig::validate() const {
  if (rows < 1 || cols < 1) throw InvalidConfiguration(fmt::format("array needs M, N >= 1 (got {}, {})", rows, cols));
  if (polarizations != 1 && polarizations != 2)
    throw InvalidConfiguration(fmt::format("polarizations must be 1 or 2 (got {})", polarizations));
  if (!(spacing > 0.0)) throw InvalidConfiguration("element spacing must be positive");
  if (!(carrierHz > 0.0)) throw InvalidConfiguration("carrier frequency must be positive");
}

PortMapping mapPortsToElements(const ArrayConfig& cfg, int v, int h) {
  cfg.validate();
  if (v < 1 || h < 1) throw InvalidConfiguration(fmt::format("port grid ({}, {}) must be positive", v, h));
  if (cfg.rows % v != 0)
    throw InvalidConfiguration(fmt::format("{} vertical ports do not divide {} rows", v, cfg.rows));
  if (cfg.cols % h != 0)
    throw InvalidConfiguration(fmt::format("{} horizontal ports do not divide {} columns", h, cfg.cols));

  const int rowsPerPort = cfg.rows / v;
  const int colsPerPort = cfg.cols / h;
  const int perPol = cfg.elementsPerPolarization();

  PortMapping map;
  map.v = v;
  map.h = h;
  map.polarizations = cfg.polarizations;
  map.ports.reserve(static_cast<std::size_t>(v * h * cfg.polarizations));
  for (int pol = 0; pol < cfg.polarizations; ++pol) {
    for (int vi = 0; vi < v; ++vi) {
      for (int hi = 0; hi < h; ++hi) {
        Port port;
        port.polarization = pol;
        port.vIndex = vi;
        port.hIndex = hi;
        for (int m = vi * rowsPerPort; m < (vi + 1) * rowsPerPort; ++m)
          for (int n = hi * colsPerPort; n < (hi + 1) * colsPerPort; ++n)
            port.members.push_back(pol * perPol + m * cfg.cols + n);
        port.weights.assign(port.members.size(), AnalogWeight{});
        map.ports.push_back(std::move(port));
      }
    }
  }
  return map;
}

CMatrix PortMapping::combiner(const ArrayConfig& cfg) const {
  CMatrix a = CMatrix::Zero(cfg.elements(), numPorts());
  for (int p = 0; p < numPorts(); ++p) {
    const auto& port = ports[static_cast<std::size_t>(p)];
    const double norm = 1.0 / std::sqrt(static_cast<double>(port.members.size()));
    for (std::size_t i = 0; i < port.members.size(); ++i) {
      const auto& w = port.weights[i];
      a(port.members[i], p) = std::polar(norm * std::pow(10.0, w.gainDb / 20.0), deg2rad(w.phaseDeg));
    }
  }
  return a;
}

CVector steeringVectorAnyDirection(const ArrayConfig& cfg, double azimuthDeg, double elevationDeg) {
  const double az = deg2rad(azimuthDeg);
  const double el = deg2rad(elevationDeg);
  const double colStep = 2.0 * kPi * cfg.spacing * std::sin(az) * std::cos(el);
  const double rowStep = 2.0 * kPi * cfg.spacing * std::sin(el);
  CVector v(cfg.elementsPerPolarization());
  for (int m = 0; m < cfg.rows; ++m)
    for (int n = 0; n < cfg.cols; ++n) v(m * cfg.cols + n) = std::polar(1.0, n * colStep + m * rowStep);
  return v;
}

CVector steeringVector(const ArrayConfig& cfg, double azimuthDeg, double elevationDeg) {
  if (std::abs(azimuthDeg) > 90.0 || std::abs(elevationDeg) > 90.0)
    throw InvalidInput(fmt::format("direction ({}, {}) deg is outside the front hemisphere", azimuthDeg, elevationDeg));
  return steeringVectorAnyDirection(cfg, azimuthDeg, elevationDeg);
}

double arrayFactor(const ArrayConfig& cfg, const CVector& weights, double azimuthDeg, double elevationDeg) {
  if (weights.size() == 0) throw InvalidInput("array factor needs at least one weight");
  if (weights.size() != cfg.elementsPerPolarization())
    throw InvalidInput(fmt::format("expected {} weights, got {}", cfg.elementsPerPolarization(), weights.size()));
  const cd response = weights.dot(steeringVector(cfg, azimuthDeg, elevationDeg));  // w^H v
  const double mag = std::abs(response);
  if (mag == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(mag);
}

double nullDepthFromPhaseError(double rmsPhaseDeg, NullDepthModel model) {
  if (!(rmsPhaseDeg >= 0.0)) throw InvalidInput("RMS phase error must be non-negative");
  if (rmsPhaseDeg == 0.0) return -std::numeric_limits<double>::infinity();
  const double var = deg2rad(rmsPhaseDeg) * deg2rad(rmsPhaseDeg);
  if (model == NullDepthModel::Exact) return lin2db(2.0 * (1.0 - std::exp(-var / 2.0)));
  return lin2db(var);
}

}  // namespace fdsim
