// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/kernels.hpp"

#include <omp.h>

namespace fdsim {
namespace {

std::vector<double> transmissionSinrs(const ChannelRealization& ch, const std::vector<CellTransmission>& tx,
                                      std::size_t s) {
  const CellTransmission& own = tx[s];
  std::vector<double> out(own.users.size());
  for (std::size_t l = 0; l < own.users.size(); ++l) {
    const int user = own.users[l];
    const CMatrix& h = ch.at(own.cell, user);
    CMatrix r = CMatrix::Zero(h.rows(), h.rows());
    for (std::size_t c = 0; c < tx.size(); ++c) {
      if (c == s || tx[c].users.empty()) continue;
      const CMatrix g = ch.at(tx[c].cell, user) * tx[c].x;
      r.noalias() += g * g.adjoint();
    }
    out[l] = layerSinr(h * own.x, r, static_cast<int>(l));
  }
  return out;
}

}  // namespace

double layerSinr(const CMatrix& hEff, const CMatrix& interference, int layer) {
  CMatrix r = interference;
  r.diagonal().array() += 1.0;
  for (Eigen::Index j = 0; j < hEff.cols(); ++j)
    if (j != layer) r.noalias() += hEff.col(j) * hEff.col(j).adjoint();
  const CVector h = hEff.col(layer);
  Eigen::LLT<CMatrix> llt(r);
  if (llt.info() != Eigen::Success) throw NumericalConditioning("receiver covariance is not positive definite");
  return std::max(0.0, h.dot(llt.solve(h)).real());
}

std::vector<std::vector<double>> linkSinrSerial(const ChannelRealization& ch, const std::vector<CellTransmission>& tx) {
  std::vector<std::vector<double>> out(tx.size());
  for (std::size_t s = 0; s < tx.size(); ++s) out[s] = transmissionSinrs(ch, tx, s);
  return out;
}

std::vector<std::vector<double>> linkSinrParallel(const ChannelRealization& ch,
                                                  const std::vector<CellTransmission>& tx) {
  std::vector<std::vector<double>> out(tx.size());
  const auto n = static_cast<long>(tx.size());
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
  for (long s = 0; s < n; ++s) out[static_cast<std::size_t>(s)] = transmissionSinrs(ch, tx, static_cast<std::size_t>(s));
  return out;
}

}  // namespace fdsim
