// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fdsim/impairments.hpp"

namespace fdsim {
namespace {

constexpr double kSeMin = 0.2;
constexpr double kSeMax = 6.0;
constexpr double kShannonAttenuation = 0.75;
constexpr double kMinSinrDb = -6.5;
// cond(H)^2 above this is treated as rank deficient.
constexpr double kGramConditionLimit = 1e12;

PrecoderMatrix equalPower(CMatrix w) {
  const auto layers = w.cols();
  for (Eigen::Index l = 0; l < layers; ++l) {
    const double n = w.col(l).norm();
    if (n > 0.0) w.col(l) /= n;
  }
  w /= std::sqrt(static_cast<double>(layers));
  return {std::move(w), std::vector<double>(static_cast<std::size_t>(layers), 1.0 / static_cast<double>(layers))};
}

}  // namespace

PrecoderMatrix zfPrecoder(const CMatrix& stackedH) {
  const auto users = stackedH.rows();
  if (users < 1) throw InvalidInput("ZF precoder needs at least one user");
  if (users > stackedH.cols()) throw InvalidInput("ZF precoder needs users <= ports");
  if (users > kMaxLayers) throw InvalidInput(fmt::format("at most {} layers", kMaxLayers));
  const CMatrix gram = stackedH * stackedH.adjoint();
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double maxEig = eig.eigenvalues().maxCoeff();
  const double minEig = eig.eigenvalues().minCoeff();
  if (!(maxEig > 0.0) || minEig * kGramConditionLimit < maxEig) throw SingularChannel("stacked channel is rank deficient");
  const CMatrix w = stackedH.adjoint() * gram.ldlt().solve(CMatrix::Identity(users, users));
  return equalPower(w);
}

PrecoderMatrix mfPrecoder(const CMatrix& stackedH) {
  const auto users = stackedH.rows();
  if (users < 1) throw InvalidInput("MF precoder needs at least one user");
  if (users > kMaxLayers) throw InvalidInput(fmt::format("at most {} layers", kMaxLayers));
  for (Eigen::Index k = 0; k < users; ++k)
    if (stackedH.row(k).norm() == 0.0) throw InvalidInput("MF precoder got an all-zero channel row");
  return equalPower(stackedH.adjoint());
}

Codebook buildCodebook(int v, int h, int oversampling, int polarizations) {
  if (v < 1 || h < 1 || oversampling < 1) throw InvalidInput("codebook needs v, h, oversampling >= 1");
  if (polarizations != 1 && polarizations != 2) throw InvalidInput("codebook polarizations must be 1 or 2");
  Codebook cb;
  cb.v = v;
  cb.h = h;
  cb.oversamplingV = oversampling;
  cb.oversamplingH = oversampling;
  cb.polarizations = polarizations;

  const int beamsV = v * oversampling;
  const int beamsH = h * oversampling;
  const int cophases = polarizations == 2 ? 4 : 1;
  const int perPol = v * h;
  cb.codewords = CMatrix::Zero(perPol * polarizations, beamsV * beamsH * cophases);
  const cd qpsk[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  int idx = 0;
  for (int kv = 0; kv < beamsV; ++kv)
    for (int kh = 0; kh < beamsH; ++kh) {
      CVector beam(perPol);
      for (int vi = 0; vi < v; ++vi)
        for (int hi = 0; hi < h; ++hi)
          beam(vi * h + hi) = std::polar(1.0, 2.0 * kPi * (static_cast<double>(vi * kv) / beamsV +
                                                           static_cast<double>(hi * kh) / beamsH));
      beam /= std::sqrt(static_cast<double>(perPol));
      for (int cp = 0; cp < cophases; ++cp, ++idx) {
        if (polarizations == 1) {
          cb.codewords.col(idx) = beam;
        } else {
          cb.codewords.col(idx).head(perPol) = beam / std::sqrt(2.0);
          cb.codewords.col(idx).tail(perPol) = qpsk[cp] * beam / std::sqrt(2.0);
        }
      }
    }
  return cb;
}

double spectralEfficiency(double sinr) {
  if (!(sinr >= 0.0)) throw InvalidInput("SINR must be non-negative");
  if (sinr < db2lin(kMinSinrDb)) return 0.0;
  return std::min(kShannonAttenuation * std::log2(1.0 + sinr), kSeMax);
}

double sinrToRate(double sinr, double bandwidthHz) { return bandwidthHz * spectralEfficiency(sinr); }

double cqiSpectralEfficiency(int cqi) {
  if (cqi <= 0) return 0.0;
  cqi = std::min(cqi, kCqiLevels);
  return kSeMin + (kSeMax - kSeMin) * static_cast<double>(cqi - 1) / (kCqiLevels - 1);
}

int quantizeCqi(double se) {
  int cqi = 0;
  for (int l = 1; l <= kCqiLevels; ++l)
    if (cqiSpectralEfficiency(l) <= se + 1e-12) cqi = l;
  return cqi;
}

double cqiToSinr(int cqi) {
  if (cqi <= 0) return 0.0;
  const double s = std::exp2(cqiSpectralEfficiency(cqi) / kShannonAttenuation) - 1.0;
  return std::max(s, db2lin(kMinSinrDb));
}

CsiReport selectPmiCqi(const CMatrix& hEst, const Codebook& cb, double noisePower) {
  if (hEst.cols() != cb.ports())
    throw InvalidInput(fmt::format("channel has {} ports, codebook {}", hEst.cols(), cb.ports()));
  if (!(noisePower > 0.0)) throw InvalidInput("noise power must be positive");
  const CMatrix y = hEst * cb.codewords;
  int best = 0;
  double bestMetric = -1.0;
  for (int k = 0; k < cb.size(); ++k) {
    const double m = y.col(k).squaredNorm();
    if (m > bestMetric) {
      bestMetric = m;
      best = k;
    }
  }
  CsiReport report;
  report.kind = CsiKind::PmiCqi;
  report.pmi = best;
  report.cqi = quantizeCqi(spectralEfficiency(bestMetric / noisePower));
  report.sinrEstimate = cqiToSinr(report.cqi);
  return report;
}

MmseResult mmseCombiner(const CMatrix& hEff, const CMatrix& r) {
  const auto n = hEff.rows();
  if (r.rows() != n || r.cols() != n) throw InvalidInput("covariance size does not match UE antennas");
  Eigen::LLT<CMatrix> chol(r);
  if (chol.info() != Eigen::Success) throw NumericalConditioning("interference-plus-noise covariance is not positive definite");

  const CMatrix total = hEff * hEff.adjoint() + r;
  MmseResult out;
  out.weights = total.ldlt().solve(hEff);
  out.postSinr.resize(static_cast<std::size_t>(hEff.cols()));
  for (Eigen::Index l = 0; l < hEff.cols(); ++l) {
    const CVector h = hEff.col(l);
    const CMatrix others = total - h * h.adjoint();
    Eigen::LLT<CMatrix> lo(others);
    if (lo.info() != Eigen::Success) throw NumericalConditioning("per-layer covariance is not positive definite");
    out.postSinr[static_cast<std::size_t>(l)] = std::max(0.0, h.dot(lo.solve(h)).real());
  }
  return out;
}

std::vector<int> RoundRobinScheduler::next(const std::vector<int>& candidates, int maxLayers) {
  if (candidates.empty()) throw InvalidInput("no candidates to schedule");
  const std::size_t k = candidates.size();
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(maxLayers, 1)), k);
  std::vector<int> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(candidates[(cursor_ + i) % k]);
  cursor_ = (cursor_ + n) % k;
  return out;
}

std::vector<int> scheduleUsers(RoundRobinScheduler& state, const std::vector<int>& candidates, int maxLayers) {
  return state.next(candidates, maxLayers);
}

ImpairmentStatistics impairmentStatistics(double rmsPhaseDeg, double rmsMagnitudeDb) {
  const double var = deg2rad(rmsPhaseDeg) * deg2rad(rmsPhaseDeg);
  const auto m = amplitudeMoments(magnitudeErrorStd(rmsMagnitudeDb));
  return {std::exp(-var) * m.mean * m.mean, m.meanSquare};
}

std::vector<double> expectedSinr(const std::vector<UserEstimate>& users, const PrecoderMatrix& precoder,
                                 const ImpairmentStatistics& stats) {
  const auto layers = static_cast<std::size_t>(precoder.layers());
  if (layers != users.size()) throw InvalidInput("one precoder layer per user expected");
  const double diffuse = stats.power - stats.coherentGain;
  std::vector<double> out(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    const CRowVector& h = users[k].direction;
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t j = 0; j < layers; ++j) {
      const auto col = precoder.w.col(static_cast<Eigen::Index>(j));
      const double coherent = std::norm((h * col)(0));
      const double spread = (h.cwiseAbs2().transpose().array() * col.cwiseAbs2().array()).sum();
      const double p = stats.coherentGain * coherent + diffuse * spread;
      (j == k ? signal : interference) += p;
    }
    out[k] = signal / (interference + users[k].interferenceNoise);
  }
  return out;
}

PrecoderMatrix buildPrecoder(PrecoderKind kind, const std::vector<UserEstimate>& users) {
  if (users.empty()) throw InvalidInput("no users to precode");
  const auto ports = users.front().direction.size();
  if (kind == PrecoderKind::Codebook) {
    CMatrix w(ports, static_cast<Eigen::Index>(users.size()));
    for (std::size_t k = 0; k < users.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = users[k].beam;
    return equalPower(std::move(w));
  }
  CMatrix stacked(static_cast<Eigen::Index>(users.size()), ports);
  for (std::size_t k = 0; k < users.size(); ++k) stacked.row(static_cast<Eigen::Index>(k)) = users[k].direction;
  return kind == PrecoderKind::ZF ? zfPrecoder(stacked) : mfPrecoder(stacked);
}

SwitchDecision suMuSwitch(const std::vector<UserEstimate>& muSet, PrecoderKind kind, const ImpairmentStatistics& stats) {
  if (muSet.empty()) throw InvalidInput("empty co-scheduling set");
  if (static_cast<int>(muSet.size()) > kMaxLayers) throw InvalidInput(fmt::format("at most {} users", kMaxLayers));

  SwitchDecision best;
  std::vector<double> suRate(muSet.size());
  for (std::size_t k = 0; k < muSet.size(); ++k) {
    const std::vector<UserEstimate> one{muSet[k]};
    PrecoderMatrix w = buildPrecoder(kind, one);
    suRate[k] = spectralEfficiency(expectedSinr(one, w, stats).front());
    if (k == 0 || suRate[k] > best.estimatedRate) {
      best.mode = MimoMode::SU;
      best.users = {static_cast<int>(k)};
      best.estimatedRate = suRate[k];
      best.precoder = std::move(w);
    }
  }

  std::vector<int> set(muSet.size());
  for (std::size_t k = 0; k < set.size(); ++k) set[k] = static_cast<int>(k);
  while (set.size() >= 2) {
    std::vector<UserEstimate> chosen;
    for (int k : set) chosen.push_back(muSet[static_cast<std::size_t>(k)]);
    try {
      PrecoderMatrix w = buildPrecoder(kind, chosen);
      double sum = 0.0;
      for (double s : expectedSinr(chosen, w, stats)) sum += spectralEfficiency(s);
      if (sum > best.estimatedRate) {
        best.mode = MimoMode::MU;
        best.users = set;
        best.estimatedRate = sum;
        best.precoder = std::move(w);
      }
      break;
    } catch (const SingularChannel&) {
      // Re-schedule without the weakest user (the latest one on ties).
      auto weakest = set.begin();
      for (auto it = set.begin(); it != set.end(); ++it)
        if (suRate[static_cast<std::size_t>(*it)] <= suRate[static_cast<std::size_t>(*weakest)]) weakest = it;
      set.erase(weakest);
    }
  }
  return best;
}

}  // namespace fdsim
