// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Serial reference versus OpenMP kernels.

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "fdsim/kernels.hpp"
#include "fdsim/random.hpp"
#include "fdsim/sim.hpp"

using namespace fdsim;

namespace {

CMatrix randomMatrix(Eigen::Index r, Eigen::Index c, RandomStream& rng) {
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cd(rng.normal(), rng.normal());
  return m;
}

struct LinkFixture {
  ChannelRealization ch;
  std::vector<CellTransmission> tx;

  explicit LinkFixture(int cells) {
    auto rng = RandomStream::derive(1, 0, Purpose::Test);
    const int perCell = 10;
    ch.numCells = cells;
    ch.numUsers = cells * perCell;
    for (int i = 0; i < ch.numCells * ch.numUsers; ++i) ch.h.push_back(randomMatrix(2, 32, rng));
    for (int c = 0; c < cells; ++c) {
      std::vector<int> users;
      for (int k = 0; k < 4; ++k) users.push_back(c * perCell + k);
      tx.push_back({c, users, randomMatrix(32, 4, rng) * 0.1});
    }
  }
};

void BM_LinkSinrSerial(benchmark::State& state) {
  const LinkFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linkSinrSerial(f.ch, f.tx));
}

void BM_LinkSinrParallel(benchmark::State& state) {
  const LinkFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linkSinrParallel(f.ch, f.tx));
}

SimConfig sweepConfig() {
  SimConfig c;
  c.sites = 7;
  c.drops = 4;
  c.ttis = 20;
  c.ports = {{2, 4}};
  c.phaseGridDeg = {0.0, 40.0};
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto cfg = sweepConfig();
  for (auto _ : state) benchmark::DoNotOptimize(runSweepSerial(cfg));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto cfg = sweepConfig();
  for (auto _ : state) benchmark::DoNotOptimize(runSweep(cfg, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_LinkSinrSerial)->Arg(21)->Arg(57)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LinkSinrParallel)->Arg(21)->Arg(57)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
