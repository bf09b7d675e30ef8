// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Planar array geometry, digitized-port layout and beam-pattern evaluation.

#ifndef FDSIM_ARRAY_HPP
#define FDSIM_ARRAY_HPP

#include <cstddef>
#include <vector>

#include "fdsim/types.hpp"

namespace fdsim {

/// Physical array (M rows, N columns, P polarizations). Element (m, n) sits
/// m rows up and n columns right of the bottom-left element.
struct ArrayConfig {
  int rows = 12;
  int cols = 4;
  int polarizations = 2;
  double spacing = 0.5;  // carrier wavelengths
  double elementGainDbi = 5.0;
  double carrierHz = 2.0e9;

  int elementsPerPolarization() const { return rows * cols; }
  int elements() const { return rows * cols * polarizations; }
  /// Throws InvalidConfiguration when an invariant is broken.
  void validate() const;
};

struct AnalogWeight {
  double phaseDeg = 0.0;
  double gainDb = 0.0;
};

struct Port {
  int polarization = 0;
  int vIndex = 0;
  int hIndex = 0;
  std::vector<int> members;  // global element indices, pol * M*N + m * N + n
  std::vector<AnalogWeight> weights;
};

/// Contiguous sub-array grouping of elements into V x H ports per
/// polarization. Port index = pol * V*H + vIndex * H + hIndex.
struct PortMapping {
  int v = 1;
  int h = 1;
  int polarizations = 1;
  std::vector<Port> ports;

  int numPorts() const { return static_cast<int>(ports.size()); }
  int portsPerPolarization() const { return v * h; }
  int membersPerPort() const { return ports.empty() ? 0 : static_cast<int>(ports.front().members.size()); }

  /// Element-to-port combining matrix (elements x ports). Column p holds the
  /// analog weights of port p scaled by 1/sqrt(members), so a unit-norm port
  /// precoder radiates unit total power.
  CMatrix combiner(const ArrayConfig& cfg) const;
};

PortMapping mapPortsToElements(const ArrayConfig& cfg, int v, int h);

/// Uniform-rectangular-array response, length M*N (one polarization),
/// element index m * N + n. Requires |azimuth|, |elevation| <= 90 deg.
CVector steeringVector(const ArrayConfig& cfg, double azimuthDeg, double elevationDeg);

/// Same response without the front-hemisphere check. Directions behind the
/// array alias onto their mirror image, as they do for a planar aperture.
CVector steeringVectorAnyDirection(const ArrayConfig& cfg, double azimuthDeg, double elevationDeg);

/// 20*log10 |w^H v(az, el)|, gain relative to a single element. Returns -inf
/// for an exact null.
double arrayFactor(const ArrayConfig& cfg, const CVector& weights, double azimuthDeg, double elevationDeg);

enum class NullDepthModel {
  SmallAngle,  // 10*log10(sigma^2)
  Exact,       // 10*log10(2 * (1 - exp(-sigma^2 / 2)))
};

/// Residual depth (dB) of a perturbed null for an RMS per-element phase error.
/// rmsPhaseDeg == 0 is a perfect null and returns -inf.
double nullDepthFromPhaseError(double rmsPhaseDeg, NullDepthModel model = NullDepthModel::SmallAngle);

}  // namespace fdsim

#endif  // FDSIM_ARRAY_HPP
