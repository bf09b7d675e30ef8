// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Digital precoders, DFT codebook and PMI/CQI feedback, MMSE reception,
// round-robin scheduling, SU/MU switching and link adaptation.

#ifndef FDSIM_PRECODING_HPP
#define FDSIM_PRECODING_HPP

#include <cstddef>
#include <vector>

#include "fdsim/types.hpp"

namespace fdsim {

/// Ports x layers. Frobenius norm squared is 1.
struct PrecoderMatrix {
  CMatrix w;
  std::vector<double> powerShares;

  int layers() const { return static_cast<int>(w.cols()); }
};

inline constexpr int kMaxLayers = 4;

/// Right pseudo-inverse of users x ports, equal per-layer power.
/// Throws SingularChannel when the rows are (numerically) dependent.
PrecoderMatrix zfPrecoder(const CMatrix& stackedH);

/// Conjugate-transpose beams, unit norm per layer, equal per-layer power.
PrecoderMatrix mfPrecoder(const CMatrix& stackedH);

/// Oversampled 2D DFT grid of beams over (V, H) ports with QPSK co-phasing
/// between polarizations when dual polarized.
struct Codebook {
  int v = 1;
  int h = 1;
  int oversamplingV = 1;
  int oversamplingH = 1;
  int polarizations = 1;
  CMatrix codewords;  // ports x size

  int size() const { return static_cast<int>(codewords.cols()); }
  int ports() const { return static_cast<int>(codewords.rows()); }
};

Codebook buildCodebook(int v, int h, int oversampling, int polarizations = 2);

enum class CsiKind { PmiCqi, SrsEstimate };

struct CsiReport {
  CsiKind kind = CsiKind::PmiCqi;
  int pmi = -1;
  int cqi = 0;
  double sinrEstimate = 0.0;  // linear, as implied by the CQI for PmiCqi
  CMatrix channel;            // UE antennas x ports for SrsEstimate
  long createdMs = 0;
};

inline constexpr int kCqiLevels = 15;

/// Spectral efficiency (b/s/Hz) of CQI level 1..15; 0 for level 0.
double cqiSpectralEfficiency(int cqi);
/// Largest CQI level whose spectral efficiency does not exceed `se`.
int quantizeCqi(double spectralEfficiency);
/// Lowest linear SINR that supports the CQI level under the rate mapping.
double cqiToSinr(int cqi);

/// Wideband PMI = argmax over codewords of the MRC SINR ||Hest w||^2 / noise;
/// ties go to the lowest index. CQI is the quantized winner.
CsiReport selectPmiCqi(const CMatrix& hEst, const Codebook& cb, double noisePower);

struct MmseResult {
  CMatrix weights;              // UE antennas x layers
  std::vector<double> postSinr; // per layer
};

/// Linear MMSE receiver for the layers in `hEff` (UE antennas x layers)
/// against interference-plus-noise covariance `r`. Throws
/// NumericalConditioning when `r` is not positive definite.
MmseResult mmseCombiner(const CMatrix& hEff, const CMatrix& r);

/// Deterministic rotation over the users of one cell.
class RoundRobinScheduler {
 public:
  /// Next co-scheduled set, at most maxLayers users, in rotation order.
  std::vector<int> next(const std::vector<int>& candidates, int maxLayers = kMaxLayers);
  std::size_t cursor() const { return cursor_; }

 private:
  std::size_t cursor_ = 0;
};

std::vector<int> scheduleUsers(RoundRobinScheduler& state, const std::vector<int>& candidates,
                               int maxLayers = kMaxLayers);

enum class PrecoderKind { ZF, MF, Codebook };

/// What the base station knows about one user when it decides the mode.
struct UserEstimate {
  int user = 0;
  CRowVector direction;       // 1 x ports effective channel (or CSI proxy)
  CVector beam;               // ports: the user's codebook beam, used by PrecoderKind::Codebook
  double interferenceNoise = 1.0;
};

/// Statistics of per-port transmit errors e = a * exp(j theta) that the rate
/// estimate accounts for: coherent gain |E e|^2 and power E|e|^2.
struct ImpairmentStatistics {
  double coherentGain = 1.0;
  double power = 1.0;
};

ImpairmentStatistics impairmentStatistics(double rmsPhaseDeg, double rmsMagnitudeDb);

enum class MimoMode { SU, MU };

struct SwitchDecision {
  MimoMode mode = MimoMode::SU;
  std::vector<int> users;        // positions into the estimate list
  double estimatedRate = 0.0;    // b/s/Hz
  PrecoderMatrix precoder;
};

/// Expected per-user SINRs of a precoder on the estimated channels under the
/// impairment statistics (i.i.d. per-port errors).
std::vector<double> expectedSinr(const std::vector<UserEstimate>& users, const PrecoderMatrix& precoder,
                                 const ImpairmentStatistics& stats);

/// Builds the precoder of `kind` for the selected users.
PrecoderMatrix buildPrecoder(PrecoderKind kind, const std::vector<UserEstimate>& users);

/// Estimated MU sum rate over the whole set versus the best single user.
/// A singular MU channel is re-scheduled without its weakest user.
SwitchDecision suMuSwitch(const std::vector<UserEstimate>& muSet, PrecoderKind kind,
                          const ImpairmentStatistics& stats = {});

/// Spectral efficiency (b/s/Hz) under the truncated Shannon mapping.
double spectralEfficiency(double sinr);
/// Rate in bit/s.
double sinrToRate(double sinr, double bandwidthHz);

}  // namespace fdsim

#endif  // FDSIM_PRECODING_HPP
