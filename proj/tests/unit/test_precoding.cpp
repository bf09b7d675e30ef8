// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include <doctest.h>

#include <cmath>
#include <map>

#include "fdsim/impairments.hpp"
#include "fdsim/precoding.hpp"
#include "fdsim/random.hpp"

using namespace fdsim;

namespace {

CMatrix randomMatrix(Eigen::Index r, Eigen::Index c, RandomStream& rng) {
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cd(rng.normal(), rng.normal()) / std::sqrt(2.0);
  return m;
}

double seOracle(double sinr) {
  if (10.0 * std::log10(sinr) < -6.5) return 0.0;
  return std::min(0.75 * std::log2(1.0 + sinr), 6.0);
}

UserEstimate user(int id, CRowVector h) {
  UserEstimate u;
  u.user = id;
  u.direction = std::move(h);
  return u;
}

}  // namespace

TEST_CASE("rate mapping") {
  for (double db : {-6.0, 0.0, 5.0, 10.0, 20.0, 40.0}) {
    const double s = std::pow(10.0, db / 10.0);
    CHECK(spectralEfficiency(s) == doctest::Approx(seOracle(s)));
    CHECK(sinrToRate(s, 10e6) == doctest::Approx(10e6 * seOracle(s)));
  }
  CHECK(spectralEfficiency(std::pow(10.0, -0.7)) == 0.0);
  CHECK(spectralEfficiency(1e9) == 6.0);
  CHECK_THROWS_AS(spectralEfficiency(-1.0), InvalidInput);
}

TEST_CASE("CQI table is uniform and round-trips") {
  for (int k = 1; k <= kCqiLevels; ++k) {
    const double se = 0.2 + (6.0 - 0.2) * (k - 1) / 14.0;
    CHECK(cqiSpectralEfficiency(k) == doctest::Approx(se));
    CHECK(quantizeCqi(se) == k);
    CHECK(quantizeCqi(se - 1e-6) == k - 1);
    CHECK(cqiToSinr(k) >= std::pow(10.0, -0.65) - 1e-12);
  }
  CHECK(quantizeCqi(0.1) == 0);
  CHECK(quantizeCqi(100.0) == kCqiLevels);
  CHECK(cqiToSinr(0) == 0.0);
  // cqiToSinr is the inverse of the rate mapping above the floor.
  for (int k = 3; k <= kCqiLevels; ++k) CHECK(spectralEfficiency(cqiToSinr(k)) == doctest::Approx(cqiSpectralEfficiency(k)));
}

TEST_CASE("ZF nulls inter-user interference") {
  auto rng = RandomStream::derive(1, 0, Purpose::Test);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix h = randomMatrix(4, 16, rng);
    const auto p = zfPrecoder(h);
    const CMatrix hw = h * p.w;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(std::abs(hw(i, j)) < 1e-10 * std::abs(hw(i, i)));
    CHECK(p.w.squaredNorm() == doctest::Approx(1.0));
    for (int l = 0; l < 4; ++l) CHECK(p.w.col(l).squaredNorm() == doctest::Approx(0.25));
  }
}

TEST_CASE("precoder failure modes") {
  CMatrix h(2, 4);
  h.row(0) << 1, 2, 3, 4;
  h.row(1) = h.row(0) * cd(0.0, 2.0);
  CHECK_THROWS_AS(zfPrecoder(h), SingularChannel);
  CHECK_THROWS_AS(zfPrecoder(CMatrix::Ones(5, 4)), InvalidInput);
  h.row(1).setZero();
  CHECK_THROWS_AS(mfPrecoder(h), InvalidInput);
}

TEST_CASE("MF is the normalized conjugate channel") {
  auto rng = RandomStream::derive(2, 0, Purpose::Test);
  const CMatrix h = randomMatrix(1, 8, rng);
  const auto p = mfPrecoder(h);
  CHECK((p.w - h.adjoint() / h.norm()).norm() < 1e-12);
}

TEST_CASE("two orthogonal users under ZF double the single-user rate at equal power") {
  const double g = 40.0;
  CRowVector h1 = CRowVector::Zero(8), h2 = CRowVector::Zero(8);
  h1(0) = std::sqrt(g);
  h2(1) = std::sqrt(g);
  const std::vector<UserEstimate> set{user(0, h1), user(1, h2)};
  const auto w = buildPrecoder(PrecoderKind::ZF, set);
  const auto sinr = expectedSinr(set, w, {});
  CHECK(sinr[0] == doctest::Approx(g / 2.0));
  CHECK(sinr[1] == doctest::Approx(g / 2.0));
  const auto d = suMuSwitch(set, PrecoderKind::ZF);
  CHECK(d.mode == MimoMode::MU);
  CHECK(d.estimatedRate == doctest::Approx(2.0 * seOracle(g / 2.0)));
  // At high SNR both layers saturate and the sum is exactly twice the SU rate.
  h1(0) = h2(1) = 1e4;
  const auto sat = suMuSwitch({user(0, h1), user(1, h2)}, PrecoderKind::ZF);
  CHECK(sat.estimatedRate == doctest::Approx(2.0 * seOracle(1e8)));
}

TEST_CASE("switch falls back to SU when impairments destroy the nulls") {
  auto rng = RandomStream::derive(3, 0, Purpose::Test);
  const CMatrix h = randomMatrix(4, 32, rng) * 10.0;
  std::vector<UserEstimate> set;
  for (int k = 0; k < 4; ++k) set.push_back(user(k, h.row(k)));
  CHECK(suMuSwitch(set, PrecoderKind::ZF).mode == MimoMode::MU);
  CHECK(suMuSwitch(set, PrecoderKind::ZF, impairmentStatistics(120.0, 0.0)).mode == MimoMode::SU);
}

TEST_CASE("switch drops the weakest user from a rank-deficient set") {
  CRowVector a(4), b(4);
  a << 1, 0, 0, 0;
  b << 0, 1, 0, 0;
  std::vector<UserEstimate> set{user(0, a * 5.0), user(1, a * 3.0), user(2, b * 4.0)};
  const auto d = suMuSwitch(set, PrecoderKind::ZF);
  CHECK(d.mode == MimoMode::MU);
  CHECK(d.users == std::vector<int>{0, 2});
}

TEST_CASE("impairment statistics") {
  const auto ideal = impairmentStatistics(0.0, 0.0);
  CHECK(ideal.coherentGain == 1.0);
  CHECK(ideal.power == 1.0);
  const double s = 20.0 * std::acos(-1.0) / 180.0;
  CHECK(impairmentStatistics(20.0, 0.0).coherentGain == doctest::Approx(std::exp(-s * s)));
  const auto m = amplitudeMoments(magnitudeErrorStd(2.0));
  CHECK(impairmentStatistics(0.0, 2.0).coherentGain == doctest::Approx(m.mean * m.mean));
  CHECK(impairmentStatistics(0.0, 2.0).power == doctest::Approx(m.meanSquare));
}

TEST_CASE("expected received power under per-port errors matches Monte Carlo") {
  // E|sum_p h_p w_p a_p e^{j phi_p}|^2 = coherent |h w|^2 + (E a^2 - coherent) sum_p |h_p w_p|^2
  auto rng = RandomStream::derive(4, 0, Purpose::Test);
  const CMatrix hm = randomMatrix(1, 16, rng);
  const CRowVector h = hm.row(0);
  const auto p = mfPrecoder(hm);
  const double rmsDeg = 30.0, rmsDb = 1.5;
  const auto stats = impairmentStatistics(rmsDeg, rmsDb);
  const double predicted = expectedSinr({user(0, h)}, p, stats)[0] * 1.0;  // interferenceNoise = 1
  double acc = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto ph = samplePhaseErrors(rmsDeg, 16, rng);
    const auto amp = amplitudeFactors(sampleMagnitudeErrors(rmsDb, 16, rng));
    cd y = 0.0;
    for (int i = 0; i < 16; ++i) y += h(i) * p.w(i, 0) * amp[i] * std::polar(1.0, ph[i] * std::acos(-1.0) / 180.0);
    acc += std::norm(y);
  }
  CHECK(acc / n == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("codebook shape and PMI selection") {
  const auto cb = buildCodebook(2, 4, 4, 2);
  CHECK(cb.ports() == 16);
  CHECK(cb.size() == (2 * 4) * (4 * 4) * 4);
  for (int k = 0; k < cb.size(); ++k) CHECK(cb.codewords.col(k).norm() == doctest::Approx(1.0));
  for (int k : {0, 37, 200, cb.size() - 1}) {
    CMatrix h = cb.codewords.col(k).adjoint() * 10.0;
    const auto r = selectPmiCqi(h, cb, 1.0);
    CHECK(std::norm((h * cb.codewords.col(r.pmi))(0, 0)) == doctest::Approx(100.0));
    CHECK(r.cqi == quantizeCqi(seOracle(100.0)));
  }
  CHECK_THROWS_AS(selectPmiCqi(CMatrix::Ones(1, 8), cb, 1.0), InvalidInput);
}

TEST_CASE("PMI ties resolve to the lowest index") {
  const auto cb = buildCodebook(1, 2, 1, 1);
  const auto r = selectPmiCqi(CMatrix::Zero(1, 2), cb, 1.0);
  CHECK(r.pmi == 0);
  CHECK(r.cqi == 0);
}

TEST_CASE("MMSE combiner post-SINR") {
  auto rng = RandomStream::derive(5, 0, Purpose::Test);
  const CMatrix h = randomMatrix(2, 2, rng);
  const CMatrix r = CMatrix::Identity(2, 2) * 0.5;
  const auto m = mmseCombiner(h, r);
  for (int l = 0; l < 2; ++l) {
    const CMatrix others = r + h.col(1 - l) * h.col(1 - l).adjoint();
    const double oracle = (h.col(l).adjoint() * others.inverse() * h.col(l))(0, 0).real();
    CHECK(m.postSinr[l] == doctest::Approx(oracle));
  }
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(mmseCombiner(h, bad), NumericalConditioning);
}

TEST_CASE("round robin serves everyone equally") {
  RoundRobinScheduler rr;
  std::vector<int> cands(10);
  for (int i = 0; i < 10; ++i) cands[i] = 100 + i;
  CHECK(rr.next(cands, 4) == std::vector<int>{100, 101, 102, 103});
  CHECK(rr.next(cands, 4) == std::vector<int>{104, 105, 106, 107});
  CHECK(rr.next(cands, 4) == std::vector<int>{108, 109, 100, 101});
  std::map<int, int> count;
  RoundRobinScheduler fresh;
  for (int t = 0; t < 10; ++t)
    for (int u : scheduleUsers(fresh, cands, 4)) ++count[u];
  for (const auto& [u, c] : count) CHECK(c == 4);
  CHECK(rr.next({7, 8}, 4) == std::vector<int>{7, 8});
  CHECK_THROWS_AS(rr.next({}, 4), InvalidInput);
}
