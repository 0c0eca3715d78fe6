#include "jetflow/partition.hpp"

#include <numeric>

namespace jetflow {

std::vector<int> balance(long long total_points, int partitions) {
  if (partitions < 1) throw PartitionError("number of partitions must be at least 1");
  if (total_points < partitions) {
    throw PartitionError("infeasible partition: " + std::to_string(total_points) + " points over " +
                         std::to_string(partitions) + " partitions");
  }
  std::vector<int> sizes(static_cast<std::size_t>(partitions));
  const long long remainder = total_points % partitions;
  for (int index = 0; index < partitions; ++index) {
    long long local = total_points / partitions;
    if (index < remainder) local = local + 1;
    sizes[static_cast<std::size_t>(index)] = static_cast<int>(local);
  }
  return sizes;
}

std::optional<int> Partition::neighbor(Face f) const {
  switch (f) {
    case Face::West:
      return west;
    case Face::East:
      return east;
    case Face::South:
      return south;
    case Face::North:
      return north;
  }
  return std::nullopt;
}

std::vector<int> PartitionTopology::ring(int px) const {
  std::vector<int> ids;
  for (int pz = 0; pz < spec.npz; ++pz) ids.push_back(at(px, pz).id);
  return ids;
}

std::string to_string(Face f) {
  switch (f) {
    case Face::West:
      return "west";
    case Face::East:
      return "east";
    case Face::South:
      return "south";
    case Face::North:
      return "north";
  }
  return "?";
}

namespace {

std::vector<int> offsets(const std::vector<int>& sizes) {
  std::vector<int> begin(sizes.size() + 1, 0);
  std::partial_sum(sizes.begin(), sizes.end(), begin.begin() + 1);
  return begin;
}

void require_thickness(const std::vector<int>& sizes, int parts, const char* direction) {
  if (parts == 1) return;
  for (int s : sizes) {
    if (s < 3) {
      throw PartitionError(std::string("over-decomposition in the ") + direction + " direction: block of " +
                           std::to_string(s) + " points (minimum 3)");
    }
  }
}

}  // namespace

PartitionTopology build_topology(const GridDims& dims, const PartitionSpec& spec) {
  if (spec.npx < 1 || spec.npz < 1) throw PartitionError("npx and npz must be at least 1");
  if (spec.npz > 1 && !dims.periodic_k) throw PartitionError("azimuthal partitioning requires a periodic direction");
  const std::vector<int> isizes = balance(dims.ni, spec.npx);
  const std::vector<int> ksizes = balance(dims.nk, spec.npz);
  require_thickness(isizes, spec.npx, "axial");
  require_thickness(ksizes, spec.npz, "azimuthal");
  const std::vector<int> ib = offsets(isizes);
  const std::vector<int> kb = offsets(ksizes);

  PartitionTopology topo{dims, spec, {}};
  for (int px = 0; px < spec.npx; ++px) {
    for (int pz = 0; pz < spec.npz; ++pz) {
      Partition p;
      p.id = px * spec.npz + pz;
      p.px = px;
      p.pz = pz;
      p.layout = BlockLayout{dims, ib[px], ib[px + 1], kb[pz], kb[pz + 1]};
      if (px > 0) p.west = (px - 1) * spec.npz + pz;
      if (px + 1 < spec.npx) p.east = (px + 1) * spec.npz + pz;
      if (spec.npz > 1) {
        p.south = px * spec.npz + (pz + spec.npz - 1) % spec.npz;
        p.north = px * spec.npz + (pz + 1) % spec.npz;
      }
      p.holds_entrance = px == 0;
      p.holds_exit = px + 1 == spec.npx;
      p.holds_centerline = dims.axis_at_j0;
      p.holds_farfield = true;
      topo.parts.push_back(p);
    }
  }
  return topo;
}

}  // namespace jetflow
