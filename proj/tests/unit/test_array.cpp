// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include <cmath>
#include <set>

#include "fdsim/array.hpp"

using namespace fdsim;

TEST_CASE("null depth small-angle values") {
  // 10 log10(sigma^2) with sigma in radians.
  auto oracle = [](double deg) {
    const double s = deg * std::acos(-1.0) / 180.0;
    return 10.0 * std::log10(s * s);
  };
  CHECK(nullDepthFromPhaseError(3.0) == doctest::Approx(-25.62).epsilon(1e-4));
  CHECK(nullDepthFromPhaseError(20.0) == doctest::Approx(-9.14).epsilon(1e-3));
  for (double d : {0.5, 1.0, 7.0, 45.0}) CHECK(nullDepthFromPhaseError(d) == doctest::Approx(oracle(d)));
  CHECK(std::isinf(nullDepthFromPhaseError(0.0)));
  CHECK(nullDepthFromPhaseError(0.0) < 0.0);
}

TEST_CASE("exact null depth approaches the small-angle form") {
  const double s = 1.0 * std::acos(-1.0) / 180.0;
  CHECK(nullDepthFromPhaseError(1.0, NullDepthModel::Exact) ==
        doctest::Approx(10.0 * std::log10(2.0 * (1.0 - std::exp(-s * s / 2.0)))));
  CHECK(std::abs(nullDepthFromPhaseError(1.0, NullDepthModel::Exact) - nullDepthFromPhaseError(1.0)) < 0.01);
}

TEST_CASE("null depth is monotone in the phase error") {
  double prev = -1e9;
  for (double d = 0.25; d < 60.0; d += 0.25) {
    const double nd = nullDepthFromPhaseError(d);
    CHECK(nd > prev);
    prev = nd;
  }
}

TEST_CASE("steering vector has unit-modulus entries") {
  ArrayConfig cfg;
  const CVector v = steeringVector(cfg, 23.0, -7.0);
  REQUIRE(v.size() == cfg.rows * cfg.cols);
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(v(i)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(steeringVector(cfg, 91.0, 0.0), InvalidInput);
}

TEST_CASE("matched beam reaches full array gain") {
  ArrayConfig cfg;
  cfg.polarizations = 1;
  const CVector v = steeringVector(cfg, 15.0, 4.0);
  const double n = cfg.rows * cfg.cols;
  CHECK(arrayFactor(cfg, v, 15.0, 4.0) == doctest::Approx(20.0 * std::log10(n)));
  // Off the steering direction the response is lower.
  CHECK(arrayFactor(cfg, v, -30.0, 4.0) < arrayFactor(cfg, v, 15.0, 4.0));
}

TEST_CASE("port mapping partitions the elements") {
  ArrayConfig cfg;
  for (auto [v, h] : {std::pair{1, 2}, {2, 2}, {2, 4}, {4, 4}}) {
    const auto map = mapPortsToElements(cfg, v, h);
    CHECK(map.numPorts() == v * h * cfg.polarizations);
    std::set<int> seen;
    for (const auto& port : map.ports)
      for (int m : port.members) CHECK(seen.insert(m).second);
    CHECK(static_cast<int>(seen.size()) == cfg.elements());
    const CMatrix c = map.combiner(cfg);
    CHECK(c.rows() == cfg.elements());
    for (Eigen::Index p = 0; p < c.cols(); ++p) CHECK(c.col(p).norm() == doctest::Approx(1.0));
    // Disjoint members make the columns orthogonal.
    CHECK((c.adjoint() * c - CMatrix::Identity(c.cols(), c.cols())).norm() < 1e-12);
  }
}

TEST_CASE("port counts that do not divide the array are rejected") {
  ArrayConfig cfg;
  CHECK_THROWS_AS(mapPortsToElements(cfg, 5, 4), InvalidConfiguration);
  CHECK_THROWS_AS(mapPortsToElements(cfg, 4, 3), InvalidConfiguration);
  CHECK_THROWS_AS(mapPortsToElements(cfg, 0, 1), InvalidConfiguration);
}

TEST_CASE("array config validation") {
  ArrayConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.polarizations = 3;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
}
