// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#ifndef FDSIM_TYPES_HPP
#define FDSIM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdsim {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg = kPi / 180.0;

inline double deg2rad(double deg) { return deg * kDeg; }
inline double rad2deg(double rad) { return rad / kDeg; }
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

/// Wraps an angle in degrees to (-180, 180].
inline double wrapDeg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

// Error taxonomy. Each failure mode named by the public contracts has its own
// type so callers (and the CLI exit-code mapping) can tell them apart.
struct InvalidConfiguration : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OutOfModel : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalConditioning : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionByZero : std::domain_error {
  using std::domain_error::domain_error;
};
struct NotInitialized : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace fdsim

#endif  // FDSIM_TYPES_HPP
