#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jetflow/field.hpp"
#include "jetflow/mesh.hpp"
#include "jetflow/partition.hpp"
#include "jetflow/exchange.hpp"

namespace jetflow {

/// JZSC container version written by this library.
inline constexpr std::uint32_t kContainerVersion = 1;

/// Row-major array of little-endian doubles.
struct NamedArray {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> data;
};

/// Self-describing container: magic "JZSC", version u32, sorted key/value text
/// records, named arrays, trailing FNV-1a 64 checksum of every preceding byte.
struct Container {
  std::map<std::string, std::string> header;
  std::vector<NamedArray> arrays;

  const NamedArray& array(const std::string& name) const;
  const NamedArray* find(const std::string& name) const;
  const std::string& value(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t hash(const std::string& key) const;
};

std::vector<std::uint8_t> encode(const Container& c);

/// Decodes the container starting at `bytes[0]`. The checksum is verified
/// before the version or any record is interpreted. `consumed` receives the
/// container length so that concatenated containers can be walked.
Container decode(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr,
                 const std::string& origin = "buffer");

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const std::string& s);

/// One partition's grid file (and optionally its solution).
struct PartitionFile {
  int partition_id = 0;
  PartitionSpec decomposition;
  BlockLayout layout;
  std::uint64_t grid_hash = 0;
  std::uint64_t flow_hash = 0;
  CoordinateField coords;
  std::optional<BlockField<9>> metrics;
  std::optional<BlockField<1>> jacobian;
  std::optional<ConservativeField> conservative;
};

void write_partition(const std::filesystem::path& path, const PartitionFile& data);

/// Validates checksum, version, then id and extents against `expected`.
PartitionFile read_partition(const std::filesystem::path& path, const Partition& expected);

/// Partition file for every block of `topology`, coordinates copied from the
/// whole-domain grid including ghost images.
PartitionFile make_partition_file(const CoordinateField& global_coords, const PartitionTopology& topology, int id,
                                  std::uint64_t grid_hash, std::uint64_t flow_hash, bool with_metrics = true);

struct Snapshot {
  long iteration = 0;
  double time = 0.0;
  int partition_id = 0;
  BlockLayout layout;
  ConservativeField q;  // owned nodes filled, ghosts zero
};

/// Appends one snapshot container to a per-partition solution file.
void append_snapshot(const std::filesystem::path& path, int partition_id, long iteration, double time,
                     const ConservativeField& q);
/// Reads every snapshot of a series; iteration indices must strictly increase.
std::vector<Snapshot> read_snapshots(const std::filesystem::path& path);

struct Checkpoint {
  long iteration = 0;
  ConservativeField q;  // owned nodes filled, ghosts zero
};

struct CheckpointKey {
  std::uint64_t grid_hash = 0;
  std::uint64_t flow_hash = 0;
  PartitionSpec decomposition;
  int partition_id = 0;
};

void write_checkpoint(const std::filesystem::path& path, const ConservativeField& q, long iteration,
                      const CheckpointKey& key);
/// Throws IncompatibleCheckpointError when the hashes, the decomposition or the
/// block extents differ from the running case.
Checkpoint read_checkpoint(const std::filesystem::path& path, const BlockLayout& layout, const CheckpointKey& key);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int partition_id);
std::filesystem::path solution_path(const std::filesystem::path& dir, int partition_id);
std::filesystem::path partition_path(const std::filesystem::path& dir, int partition_id);

/// Topology manifest written by the pre-processor.
struct ManifestEntry {
  Partition partition;
  Endpoint endpoint;
  std::string file;
};

struct Manifest {
  GridSpec grid;
  PartitionSpec decomposition;
  std::uint64_t grid_hash = 0;
  std::uint64_t flow_hash = 0;
  std::vector<ManifestEntry> entries;

  PartitionTopology topology() const;
};

Manifest make_manifest(const GridSpec& grid, const PartitionTopology& topology, std::uint64_t flow_hash,
                       const std::string& host = "127.0.0.1", int base_port = 47000);
std::string format_manifest(const Manifest& m);
/// Throws ConfigError with a line number on malformed input, PartitionError
/// when the listed extents or neighbours disagree with the decomposition.
Manifest parse_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Legacy structured-grid VTK text file with density, velocity and pressure.
void export_vtk(const std::filesystem::path& path, const CoordinateField& coords, const ConservativeField& q,
                const FlowConfig& cfg);

}  // namespace jetflow
