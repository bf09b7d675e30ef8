// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors

#include "fdsim/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <spdlog/spdlog.h>

namespace fdsim {
namespace {

Eigen::Vector2d polar2d(double r, double deg) { return {r * std::cos(deg2rad(deg)), r * std::sin(deg2rad(deg))}; }

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double deg) {
  const double c = std::cos(deg2rad(deg));
  const double s = std::sin(deg2rad(deg));
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

std::atomic<bool> g_clampWarned{false};

}  // namespace

double NetworkLayout::siteRadius() const { return isd / std::sqrt(3.0); }

Eigen::Vector2d NetworkLayout::nearestSiteImage(int site, const Eigen::Vector2d& point) const {
  const Eigen::Vector2d& s = sites[static_cast<std::size_t>(site)];
  Eigen::Vector2d best = s;
  double bestDist = (point - s).squaredNorm();
  for (std::size_t t = 1; t < wrapTranslations.size(); ++t) {
    const Eigen::Vector2d img = s + wrapTranslations[t];
    const double d = (point - img).squaredNorm();
    if (d < bestDist) {
      bestDist = d;
      best = img;
    }
  }
  return best;
}

Eigen::Vector2d NetworkLayout::wrapIntoCluster(const Eigen::Vector2d& point) const {
  Eigen::Vector2d best = point;
  double bestDist = point.squaredNorm();
  for (std::size_t t = 1; t < wrapTranslations.size(); ++t) {
    const Eigen::Vector2d moved = point - wrapTranslations[t];
    if (moved.squaredNorm() < bestDist) {
      bestDist = moved.squaredNorm();
      best = moved;
    }
  }
  return best;
}

NetworkLayout buildLayout(int nSites, double isd) {
  if (!(isd > 0.0)) throw InvalidConfiguration("inter-site distance must be positive");
  int rings = 0;
  switch (nSites) {
    case 1: rings = 0; break;
    case 7: rings = 1; break;
    case 19: rings = 2; break;
    default: throw InvalidConfiguration(fmt::format("unsupported site count {} (use 1, 7 or 19)", nSites));
  }

  // Axial lattice: a1 at 30 deg, a2 at 90 deg; site hexagons have vertices
  // at multiples of 60 deg so each sector is a rhombus around its boresight.
  const Eigen::Vector2d a1 = polar2d(isd, 30.0);
  const Eigen::Vector2d a2 = polar2d(isd, 90.0);

  struct Axial {
    int q, r;
  };
  std::vector<Axial> coords;
  for (int ring = 0; ring <= rings; ++ring) {
    std::vector<Axial> inRing;
    for (int q = -ring; q <= ring; ++q)
      for (int r = -ring; r <= ring; ++r)
        if ((std::abs(q) + std::abs(r) + std::abs(q + r)) / 2 == ring) inRing.push_back({q, r});
    std::sort(inRing.begin(), inRing.end(), [&](const Axial& x, const Axial& y) {
      const Eigen::Vector2d px = x.q * a1 + x.r * a2;
      const Eigen::Vector2d py = y.q * a1 + y.r * a2;
      return std::atan2(px.y(), px.x()) < std::atan2(py.y(), py.x());
    });
    coords.insert(coords.end(), inRing.begin(), inRing.end());
  }

  NetworkLayout layout;
  layout.isd = isd;
  for (const auto& c : coords) layout.sites.push_back(c.q * a1 + c.r * a2);
  for (int s = 0; s < layout.numSites(); ++s)
    for (int k = 0; k < 3; ++k) layout.cells.push_back(Cell{s * 3 + k, s, 120.0 * k});

  layout.wrapTranslations.push_back(Eigen::Vector2d::Zero());
  if (rings > 0) {
    const Eigen::Vector2d base = (rings + 1) * a1 + rings * a2;
    for (int k = 0; k < 6; ++k) layout.wrapTranslations.push_back(rotate(base, 60.0 * k));
  }
  return layout;
}

std::vector<int> UserDrop::usersServedBy(int cell) const {
  std::vector<int> out;
  for (const auto& u : users)
    if (u.serving == cell) out.push_back(u.id);
  return out;
}

UserDrop dropUsers(const NetworkLayout& layout, int perCell, RandomStream& rng, const ChannelModelParams& params) {
  if (perCell < 1) throw InvalidConfiguration("need at least one user per cell");
  UserDrop drop;
  drop.numCells = layout.numCells();
  const double radius = layout.siteRadius();
  for (const auto& cell : layout.cells) {
    const Eigen::Vector2d e1 = polar2d(radius, cell.boresightDeg - 60.0);
    const Eigen::Vector2d e2 = polar2d(radius, cell.boresightDeg + 60.0);
    const Eigen::Vector2d& site = layout.sites[static_cast<std::size_t>(cell.site)];
    for (int i = 0; i < perCell; ++i) {
      const double u = rng.uniform();
      const double w = rng.uniform();
      const double hgt = rng.uniform(params.ueHeightMinM, params.ueHeightMaxM);
      const Eigen::Vector2d p = site + u * e1 + w * e2;
      User user;
      user.id = static_cast<int>(drop.users.size());
      user.dropCell = cell.id;
      user.position = {p.x(), p.y(), hgt};
      drop.users.push_back(user);
    }
  }
  drop.records.resize(static_cast<std::size_t>(drop.numCells) * drop.users.size());
  return drop;
}

double losProbability(double distance2d) {
  if (distance2d <= 18.0) return 1.0;
  return 18.0 / distance2d + std::exp(-distance2d / 63.0) * (1.0 - 18.0 / distance2d);
}

double pathloss(double distance3d, double fcHz, bool los, double ueHeightM) {
  double d = distance3d;
  if (d < 10.0) {
    if (!g_clampWarned.exchange(true))
      spdlog::warn("pathloss: distance {:.2f} m below 10 m model floor, clamping (further clamps not reported)", d);
    d = 10.0;
  }
  const double fGhz = fcHz / 1e9;
  const double plLos = 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(fGhz);
  if (los) return plLos;
  const double plNlos = 13.54 + 39.08 * std::log10(d) + 20.0 * std::log10(fGhz) - 0.6 * (ueHeightM - 1.5);
  return std::max(plLos, plNlos);
}

double sectorPatternDb(double azimuthDeg, const ChannelModelParams& params) {
  const double x = wrapDeg(azimuthDeg) / params.sectorHpbwDeg;
  return -std::min(12.0 * x * x, params.frontToBackDb);
}

void assignLargeScale(const NetworkLayout& layout, UserDrop& drop, const ArrayConfig& cfg,
                      const ChannelModelParams& params, std::uint64_t seed, std::uint64_t dropIndex) {
  drop.numCells = layout.numCells();
  drop.records.assign(static_cast<std::size_t>(drop.numCells) * drop.users.size(), LargeScaleRecord{});
  for (const auto& user : drop.users) {
    const Eigen::Vector2d up = user.position.head<2>();
    for (int site = 0; site < layout.numSites(); ++site) {
      auto rng = RandomStream::derive(seed, dropIndex, Purpose::LargeScale,
                                      {static_cast<std::uint64_t>(user.id), static_cast<std::uint64_t>(site)});
      const Eigen::Vector2d img = layout.nearestSiteImage(site, up);
      const Eigen::Vector2d delta = up - img;
      const double d2 = std::max(delta.norm(), 1e-3);
      const double dz = user.position.z() - params.bsHeightM;
      const double d3 = std::hypot(d2, dz);
      const bool los = rng.uniform() < losProbability(d2);
      const double shadow = rng.normal(0.0, params.shadowingDb);
      const double pl = pathloss(d3, cfg.carrierHz, los, user.position.z());
      const double azAbs = rad2deg(std::atan2(delta.y(), delta.x()));
      const double el = rad2deg(std::atan2(dz, d2));
      for (int k = 0; k < 3; ++k) {
        const Cell& cell = layout.cells[static_cast<std::size_t>(site * 3 + k)];
        LargeScaleRecord& rec = drop.link(cell.id, user.id);
        rec.los = los;
        rec.shadowingDb = shadow;
        rec.pathlossDb = pl;
        rec.distance2d = d2;
        rec.distance3d = d3;
        rec.azimuthDeg = wrapDeg(azAbs - cell.boresightDeg);
        rec.elevationDeg = el;
        rec.gainDb = cfg.elementGainDbi + sectorPatternDb(rec.azimuthDeg, params) - pl - shadow;
      }
    }
  }
  servingCell(drop, layout);
}

void servingCell(UserDrop& drop, const NetworkLayout& layout, const std::vector<double>& cellOffsetDb) {
  for (auto& user : drop.users) {
    int best = -1;
    double bestPower = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < layout.numCells(); ++c) {
      const double offset = cellOffsetDb.empty() ? 0.0 : cellOffsetDb[static_cast<std::size_t>(c)];
      if (offset == -std::numeric_limits<double>::infinity()) continue;
      const double p = drop.link(c, user.id).gainDb + offset;
      if (best < 0 || p > bestPower) {
        best = c;
        bestPower = p;
      }
    }
    user.serving = best;
  }
}

CMatrix linkChannel(const LargeScaleRecord& link, const ArrayConfig& cfg, const ChannelModelParams& params,
                    RandomStream& rng) {
  const int perPol = cfg.elementsPerPolarization();
  const int nRx = params.ueAntennas;
  const int nClusters = std::max(params.nClusters, 1);
  const double kappa = db2lin(params.xprDb);
  const double coPol = std::sqrt(2.0 * kappa / (kappa + 1.0));
  const double crossPol = std::sqrt(2.0 / (kappa + 1.0));
  const double kFactor = link.los ? db2lin(params.losKFactorDb) : 0.0;
  const double diffuseShare = 1.0 / (kFactor + 1.0);
  const double elevation0 = link.elevationDeg + params.downtiltDeg;

  std::vector<double> powers(static_cast<std::size_t>(nClusters));
  double total = 0.0;
  for (auto& p : powers) {
    p = rng.exponential();
    total += p;
  }

  CMatrix h = CMatrix::Zero(nRx, cfg.elements());
  auto addRay = [&](cd gain, double az, double el, const cd pol[2][2]) {
    const CVector v = steeringVectorAnyDirection(cfg, az, std::clamp(el, -90.0, 90.0));
    for (int q = 0; q < nRx; ++q)
      for (int p = 0; p < cfg.polarizations; ++p) {
        const cd coef = gain * pol[q % 2][p];
        h.block(q, p * perPol, 1, perPol) += coef * v.transpose();
      }
  };

  for (int c = 0; c < nClusters; ++c) {
    const double share = diffuseShare * powers[static_cast<std::size_t>(c)] / total;
    const double az = link.azimuthDeg + rng.normal(0.0, params.azimuthSpreadDeg);
    const double el = elevation0 + rng.normal(0.0, params.elevationSpreadDeg);
    const cd gain = std::sqrt(share / 2.0) * cd(rng.normal(), rng.normal());
    cd pol[2][2];
    for (int q = 0; q < 2; ++q)
      for (int p = 0; p < 2; ++p) pol[q][p] = std::polar(q == p ? coPol : crossPol, rng.uniform(-kPi, kPi));
    addRay(gain, az, el, pol);
  }
  if (kFactor > 0.0) {
    const cd gain = std::polar(std::sqrt(kFactor * diffuseShare), rng.uniform(-kPi, kPi));
    const cd pol[2][2] = {{std::sqrt(2.0), 0.0}, {0.0, -std::sqrt(2.0)}};
    addRay(gain, link.azimuthDeg, elevation0, pol);
  }
  return h * std::sqrt(db2lin(link.gainDb));
}

ChannelRealization smallScaleChannel(const NetworkLayout& layout, const UserDrop& drop, const ArrayConfig& cfg,
                                     const ChannelModelParams& params, std::uint64_t seed, std::uint64_t dropIndex) {
  ChannelRealization out;
  out.numCells = layout.numCells();
  out.numUsers = drop.numUsers();
  out.h.reserve(static_cast<std::size_t>(out.numCells) * static_cast<std::size_t>(out.numUsers));
  for (int c = 0; c < out.numCells; ++c)
    for (int u = 0; u < out.numUsers; ++u) {
      auto rng = RandomStream::derive(seed, dropIndex, Purpose::SmallScale,
                                      {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(u)});
      out.h.push_back(linkChannel(drop.link(c, u), cfg, params, rng));
    }
  return out;
}

}  // namespace fdsim
