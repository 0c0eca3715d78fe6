#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jetflow/field.hpp"

namespace jetflow {

/// Per-partition point counts along one direction. The first tot % nb
/// partitions receive one extra point.
std::vector<int> balance(long long total_points, int partitions);

struct PartitionSpec {
  int npx = 1;  // axial partitions
  int npz = 1;  // azimuthal partitions
  int workers() const { return npx * npz; }
};

enum class Face : std::uint8_t { West = 0, East = 1, South = 2, North = 3 };

struct Partition {
  int id = 0;
  int px = 0;
  int pz = 0;
  BlockLayout layout;
  std::optional<int> west;   // axial neighbour toward the entrance
  std::optional<int> east;   // axial neighbour toward the exit
  std::optional<int> south;  // azimuthal neighbour at lower k (ring)
  std::optional<int> north;  // azimuthal neighbour at higher k (ring)
  bool holds_entrance = false;
  bool holds_exit = false;
  bool holds_centerline = false;
  bool holds_farfield = false;

  std::optional<int> neighbor(Face f) const;
};

/// NPX x NPZ decomposition. Partition ids are axial-major: id = px * npz + pz.
/// The radial direction is never split.
struct PartitionTopology {
  GridDims dims;
  PartitionSpec spec;
  std::vector<Partition> parts;

  const Partition& at(int px, int pz) const { return parts[static_cast<std::size_t>(px * spec.npz + pz)]; }
  /// Ids of the partitions sharing axial index px, in azimuthal order.
  std::vector<int> ring(int px) const;
};

/// Throws PartitionError for an infeasible split or a block thinner than three
/// points in a partitioned direction.
PartitionTopology build_topology(const GridDims& dims, const PartitionSpec& spec);

std::string to_string(Face f);

}  // namespace jetflow
