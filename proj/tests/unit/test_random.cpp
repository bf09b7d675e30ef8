// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include "fdsim/random.hpp"

using namespace fdsim;

TEST_CASE("derived streams replay") {
  auto a = RandomStream::derive(7, 3, Purpose::SmallScale, {2, 5});
  auto b = RandomStream::derive(7, 3, Purpose::SmallScale, {2, 5});
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("streams differ by seed, drop, purpose and ids") {
  const double base = RandomStream::derive(7, 3, Purpose::SmallScale, {2, 5}).uniform();
  CHECK(RandomStream::derive(8, 3, Purpose::SmallScale, {2, 5}).uniform() != base);
  CHECK(RandomStream::derive(7, 4, Purpose::SmallScale, {2, 5}).uniform() != base);
  CHECK(RandomStream::derive(7, 3, Purpose::LargeScale, {2, 5}).uniform() != base);
  CHECK(RandomStream::derive(7, 3, Purpose::SmallScale, {5, 2}).uniform() != base);
}

TEST_CASE("uniform and normal moments") {
  auto r = RandomStream::derive(1, 0, Purpose::Test);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    su += r.uniform();
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
}
