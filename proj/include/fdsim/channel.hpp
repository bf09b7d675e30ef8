// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Hexagonal multi-site layout with wraparound, user drops, large-scale
// propagation and a clustered plane-wave small-scale model.

#ifndef FDSIM_CHANNEL_HPP
#define FDSIM_CHANNEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fdsim/array.hpp"
#include "fdsim/random.hpp"
#include "fdsim/types.hpp"

namespace fdsim {

struct Cell {
  int id = 0;
  int site = 0;
  double boresightDeg = 0.0;
};

struct NetworkLayout {
  double isd = 500.0;
  std::vector<Eigen::Vector2d> sites;
  std::vector<Cell> cells;
  /// Cluster-replica offsets; always contains the zero vector first.
  std::vector<Eigen::Vector2d> wrapTranslations;

  int numSites() const { return static_cast<int>(sites.size()); }
  int numCells() const { return static_cast<int>(cells.size()); }
  bool wraparound() const { return wrapTranslations.size() > 1; }
  /// Circumradius of a site hexagon.
  double siteRadius() const;
  /// Image of the site nearest to `point` over the wraparound replicas.
  Eigen::Vector2d nearestSiteImage(int site, const Eigen::Vector2d& point) const;
  /// Translates `point` by the replica offset that brings it closest to the
  /// central site; the result lies inside the simulated cluster.
  Eigen::Vector2d wrapIntoCluster(const Eigen::Vector2d& point) const;
};

/// nSites in {1, 7, 19}; sectors at 0/120/240 deg; wraparound for 7 and 19.
NetworkLayout buildLayout(int nSites, double isd);

struct ChannelModelParams {
  double bsHeightM = 25.0;
  double ueHeightMinM = 1.5;
  double ueHeightMaxM = 22.5;
  double shadowingDb = 6.0;
  double azimuthSpreadDeg = 30.0;
  double elevationSpreadDeg = 3.0;
  double downtiltDeg = 8.0;
  double xprDb = 8.0;
  double losKFactorDb = 9.0;
  int nClusters = 20;
  double sectorHpbwDeg = 65.0;
  double frontToBackDb = 25.0;
  int ueAntennas = 2;
};

struct LargeScaleRecord {
  double pathlossDb = 0.0;
  double shadowingDb = 0.0;
  bool los = false;
  double distance2d = 0.0;
  double distance3d = 0.0;
  double azimuthDeg = 0.0;    // relative to the cell boresight, (-180, 180]
  double elevationDeg = 0.0;  // negative below the horizon
  double gainDb = 0.0;        // element gain + sector pattern - pathloss - shadowing
};

struct User {
  int id = 0;
  int dropCell = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  int serving = -1;
};

struct UserDrop {
  int numCells = 0;
  std::vector<User> users;
  std::vector<LargeScaleRecord> records;  // [cell * users + user]

  int numUsers() const { return static_cast<int>(users.size()); }
  const LargeScaleRecord& link(int cell, int user) const {
    return records[static_cast<std::size_t>(cell) * users.size() + static_cast<std::size_t>(user)];
  }
  LargeScaleRecord& link(int cell, int user) {
    return records[static_cast<std::size_t>(cell) * users.size() + static_cast<std::size_t>(user)];
  }
  std::vector<int> usersServedBy(int cell) const;
};

/// Per (cell, user) complex channel, UE antennas x BS elements (or ports,
/// once projected). Single wideband subband.
struct ChannelRealization {
  int numCells = 0;
  int numUsers = 0;
  std::vector<CMatrix> h;

  const CMatrix& at(int cell, int user) const {
    return h[static_cast<std::size_t>(cell) * static_cast<std::size_t>(numUsers) + static_cast<std::size_t>(user)];
  }
};

/// Places perCell users uniformly over every cell's sector rhombus with
/// heights uniform in [ueHeightMin, ueHeightMax]. Large-scale records and the
/// serving assignment are filled with `assignLargeScale`.
UserDrop dropUsers(const NetworkLayout& layout, int perCell, RandomStream& rng,
                   const ChannelModelParams& params = {});

/// Fills LOS state, pathloss, shadowing and gain for every (cell, user), using
/// one substream per (user, site) so records do not depend on layout size,
/// then applies `servingCell`.
void assignLargeScale(const NetworkLayout& layout, UserDrop& drop, const ArrayConfig& cfg,
                      const ChannelModelParams& params, std::uint64_t seed, std::uint64_t dropIndex);

/// Simplified urban-macro pathloss (dB). distance3d below 10 m is clamped.
double pathloss(double distance3d, double fcHz, bool los, double ueHeightM = 1.5);

/// UMa line-of-sight probability for a 2D distance.
double losProbability(double distance2d);

/// Parabolic horizontal sector pattern (dB, <= 0).
double sectorPatternDb(double azimuthDeg, const ChannelModelParams& params = {});

/// argmax over cells of gainDb + cellOffsetDb[cell]; ties go to the lowest
/// cell id. Cells with a -inf offset never serve. Writes User::serving.
void servingCell(UserDrop& drop, const NetworkLayout& layout, const std::vector<double>& cellOffsetDb = {});

/// One clustered realization for a single link: UE antennas x BS elements.
/// Entries have mean power equal to the linear large-scale gain.
CMatrix linkChannel(const LargeScaleRecord& link, const ArrayConfig& cfg, const ChannelModelParams& params,
                    RandomStream& rng);

/// Element-level channels for every (cell, user).
ChannelRealization smallScaleChannel(const NetworkLayout& layout, const UserDrop& drop, const ArrayConfig& cfg,
                                     const ChannelModelParams& params, std::uint64_t seed, std::uint64_t dropIndex);

}  // namespace fdsim

#endif  // FDSIM_CHANNEL_HPP
