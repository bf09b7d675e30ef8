// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Per-TTI link evaluation: post-MMSE SINR of every scheduled layer with
// explicit interference from every transmitting cell. The serial version is
// the reference; the OpenMP version must match it bit for bit.

#ifndef FDSIM_KERNELS_HPP
#define FDSIM_KERNELS_HPP

#include <vector>

#include "fdsim/channel.hpp"
#include "fdsim/types.hpp"

namespace fdsim {

/// What one cell radiates in a TTI. `x` is ports x layers and already carries
/// the transmit power, the impairments and the cell's power scale; layer l is
/// intended for users[l].
struct CellTransmission {
  int cell = 0;
  std::vector<int> users;
  CMatrix x;
};

/// Post-MMSE SINR of one layer at a receiver with unit noise covariance.
/// `hEff` is UE antennas x layers, `interference` the other-cell covariance.
double layerSinr(const CMatrix& hEff, const CMatrix& interference, int layer);

/// SINR per transmission per layer. Channels are normalized to unit noise.
std::vector<std::vector<double>> linkSinrSerial(const ChannelRealization& ch, const std::vector<CellTransmission>& tx);
std::vector<std::vector<double>> linkSinrParallel(const ChannelRealization& ch, const std::vector<CellTransmission>& tx);

}  // namespace fdsim

#endif  // FDSIM_KERNELS_HPP
