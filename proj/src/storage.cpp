#include "jetflow/storage.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace jetflow {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'J', 'Z', 'S', 'C'};
constexpr std::uint8_t kDtypeF64 = 1;

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_bytes(std::vector<std::uint8_t>& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

/// Bounds-checked little-endian cursor. Overruns are reported as corruption.
class Cursor {
 public:
  Cursor(std::span<const std::uint8_t> bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  std::uint64_t take(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::uint64_t n) {
    need(n);
    pos_ += static_cast<std::size_t>(n);
  }
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) {
      throw ChecksumError("corrupt or truncated container in " + origin_ + ": record at offset " +
                          std::to_string(pos_) + " runs past the end (size " + std::to_string(bytes_.size()) + ")");
    }
  }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

/// Walks the layout without interpreting it and returns the checksum offset.
std::size_t scan(Cursor& c) {
  const std::string magic = c.text(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw ChecksumError("bad magic at offset 0 (corrupt, or not a JZSC container)");
  }
  c.take(4);
  const std::uint64_t records = c.take(4);
  for (std::uint64_t r = 0; r < records; ++r) {
    c.skip(c.take(2));
    c.skip(c.take(4));
  }
  const std::uint64_t arrays = c.take(4);
  for (std::uint64_t a = 0; a < arrays; ++a) {
    c.skip(c.take(2));
    c.take(1);
    const std::uint64_t rank = c.take(1);
    std::uint64_t count = 1;
    for (std::uint64_t d = 0; d < rank; ++d) {
      const std::uint64_t extent = c.take(8);
      if (extent != 0 && count > std::numeric_limits<std::uint64_t>::max() / 8 / extent) {
        c.need(std::numeric_limits<std::uint64_t>::max());
      }
      count *= extent;
    }
    c.skip(count * 8);
  }
  return c.pos();
}

template <int C>
NamedArray block_array(const std::string& name, const BlockField<C>& f) {
  const BlockLayout& b = f.layout();
  NamedArray a;
  a.name = name;
  a.shape = {static_cast<std::uint64_t>(b.nk()), static_cast<std::uint64_t>(b.ni()),
             static_cast<std::uint64_t>(b.nj()), static_cast<std::uint64_t>(C)};
  a.data.assign(f.values().begin(), f.values().end());
  return a;
}

template <int C>
BlockField<C> block_from_array(const NamedArray& a, const BlockLayout& b) {
  const std::vector<std::uint64_t> shape = {static_cast<std::uint64_t>(b.nk()), static_cast<std::uint64_t>(b.ni()),
                                            static_cast<std::uint64_t>(b.nj()), static_cast<std::uint64_t>(C)};
  if (a.shape != shape) throw ExtentMismatchError("array '" + a.name + "' has a shape inconsistent with its header");
  BlockField<C> f(b);
  std::copy(a.data.begin(), a.data.end(), f.values().begin());
  return f;
}

NamedArray owned_array(const std::string& name, const ConservativeField& q) {
  const BlockLayout& b = q.layout();
  NamedArray a;
  a.name = name;
  a.shape = {static_cast<std::uint64_t>(b.k_end - b.k_begin), static_cast<std::uint64_t>(b.i_end - b.i_begin),
             static_cast<std::uint64_t>(b.nj()), 5};
  a.data.reserve(static_cast<std::size_t>(a.shape[0] * a.shape[1] * a.shape[2] * 5));
  for (int gk = b.k_begin; gk < b.k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi) {
      const double* s = q.at(b.local_i(gi), 0, b.local_k(gk));
      a.data.insert(a.data.end(), s, s + 5 * static_cast<std::size_t>(b.nj()));
    }
  return a;
}

ConservativeField owned_from_array(const NamedArray& a, const BlockLayout& b) {
  const std::vector<std::uint64_t> shape = {static_cast<std::uint64_t>(b.k_end - b.k_begin),
                                            static_cast<std::uint64_t>(b.i_end - b.i_begin),
                                            static_cast<std::uint64_t>(b.nj()), 5};
  if (a.shape != shape) throw ExtentMismatchError("array '" + a.name + "' does not match the block extents");
  ConservativeField q(b);
  std::size_t pos = 0;
  for (int gk = b.k_begin; gk < b.k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi) {
      const std::size_t n = 5 * static_cast<std::size_t>(b.nj());
      std::copy(a.data.begin() + static_cast<std::ptrdiff_t>(pos), a.data.begin() + static_cast<std::ptrdiff_t>(pos + n),
                q.at(b.local_i(gi), 0, b.local_k(gk)));
      pos += n;
    }
  return q;
}

void put_layout(Container& c, const BlockLayout& b) {
  c.header["ni"] = std::to_string(b.dims.ni);
  c.header["nj"] = std::to_string(b.dims.nj);
  c.header["nk"] = std::to_string(b.dims.nk);
  c.header["periodic_k"] = b.dims.periodic_k ? "1" : "0";
  c.header["axis_at_j0"] = b.dims.axis_at_j0 ? "1" : "0";
  c.header["i_begin"] = std::to_string(b.i_begin);
  c.header["i_end"] = std::to_string(b.i_end);
  c.header["k_begin"] = std::to_string(b.k_begin);
  c.header["k_end"] = std::to_string(b.k_end);
  c.header["ghost"] = std::to_string(BlockLayout::ghost);
}

BlockLayout get_layout(const Container& c) {
  BlockLayout b;
  b.dims.ni = static_cast<int>(c.integer("ni"));
  b.dims.nj = static_cast<int>(c.integer("nj"));
  b.dims.nk = static_cast<int>(c.integer("nk"));
  b.dims.periodic_k = c.integer("periodic_k") != 0;
  b.dims.axis_at_j0 = c.integer("axis_at_j0") != 0;
  b.i_begin = static_cast<int>(c.integer("i_begin"));
  b.i_end = static_cast<int>(c.integer("i_end"));
  b.k_begin = static_cast<int>(c.integer("k_begin"));
  b.k_end = static_cast<int>(c.integer("k_end"));
  if (c.integer("ghost") != BlockLayout::ghost) {
    throw ExtentMismatchError("ghost width " + c.value("ghost") + " (expected 2)");
  }
  return b;
}

std::string layout_text(const BlockLayout& b) {
  return "i [" + std::to_string(b.i_begin) + ", " + std::to_string(b.i_end) + "), k [" + std::to_string(b.k_begin) +
         ", " + std::to_string(b.k_end) + ") of " + std::to_string(b.dims.ni) + " x " + std::to_string(b.dims.nj) +
         " x " + std::to_string(b.dims.nk);
}

}  // namespace

// ---------------------------------------------------------------- container

const NamedArray* Container::find(const std::string& name) const {
  for (const NamedArray& a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

const NamedArray& Container::array(const std::string& name) const {
  const NamedArray* a = find(name);
  if (a == nullptr) throw StorageError("missing array '" + name + "'");
  return *a;
}

const std::string& Container::value(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) throw StorageError("missing header record '" + key + "'");
  return it->second;
}

long long Container::integer(const std::string& key) const {
  const std::string& s = value(key);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw StorageError("header record '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t Container::hash(const std::string& key) const { return parse_hex64(value(key)); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw StorageError("not a hex hash: '" + s + "'");
  return v;
}

std::vector<std::uint8_t> encode(const Container& c) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put(out, kContainerVersion, 4);
  put(out, c.header.size(), 4);
  for (const auto& [key, value] : c.header) {
    if (key.size() > 0xffff) throw StorageError("header key too long: " + key.substr(0, 32));
    put(out, key.size(), 2);
    put_bytes(out, key);
    put(out, value.size(), 4);
    put_bytes(out, value);
  }
  put(out, c.arrays.size(), 4);
  for (const NamedArray& a : c.arrays) {
    std::uint64_t count = 1;
    for (std::uint64_t e : a.shape) count *= e;
    if (count != a.data.size()) throw StorageError("array '" + a.name + "' shape does not match its data");
    if (a.shape.size() > 255) throw StorageError("array '" + a.name + "' rank too large");
    put(out, a.name.size(), 2);
    put_bytes(out, a.name);
    put(out, kDtypeF64, 1);
    put(out, a.shape.size(), 1);
    for (std::uint64_t e : a.shape) put(out, e, 8);
    const std::size_t at = out.size();
    out.resize(at + a.data.size() * 8);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &a.data[i], 8);
      for (int b = 0; b < 8; ++b) out[at + 8 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
  }
  put(out, fnv1a(out.data(), out.size()), 8);
  return out;
}

Container decode(std::span<const std::uint8_t> bytes, std::size_t* consumed, const std::string& origin) {
  Cursor cur(bytes, origin);
  const std::size_t checksum_at = scan(cur);
  const std::uint64_t stored = cur.take(8);
  const std::uint64_t computed = fnv1a(bytes.data(), checksum_at);
  if (stored != computed) {
    throw ChecksumError("checksum mismatch in " + origin + ": size " + std::to_string(bytes.size()) +
                        " bytes, checksum at offset " + std::to_string(checksum_at) + ", stored " + hex64(stored) +
                        ", computed " + hex64(computed));
  }
  if (consumed != nullptr) *consumed = checksum_at + 8;

  cur.seek(4);
  const std::uint64_t version = cur.take(4);
  if (version != kContainerVersion) {
    throw VersionError("unsupported container version " + std::to_string(version) + " in " + origin + " (expected " +
                       std::to_string(kContainerVersion) + ")");
  }
  Container c;
  const std::uint64_t records = cur.take(4);
  for (std::uint64_t r = 0; r < records; ++r) {
    std::string key = cur.text(cur.take(2));
    std::string value = cur.text(cur.take(4));
    c.header.emplace(std::move(key), std::move(value));
  }
  const std::uint64_t arrays = cur.take(4);
  for (std::uint64_t a = 0; a < arrays; ++a) {
    NamedArray arr;
    arr.name = cur.text(cur.take(2));
    const std::uint64_t dtype = cur.take(1);
    if (dtype != kDtypeF64) throw StorageError("array '" + arr.name + "' has unknown dtype " + std::to_string(dtype));
    const std::uint64_t rank = cur.take(1);
    std::uint64_t count = 1;
    for (std::uint64_t d = 0; d < rank; ++d) {
      arr.shape.push_back(cur.take(8));
      count *= arr.shape.back();
    }
    arr.data.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t bits = cur.take(8);
      std::memcpy(&arr.data[i], &bits, 8);
    }
    c.arrays.push_back(std::move(arr));
  }
  return c;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_container(const fs::path& path, const Container& c) {
  const std::vector<std::uint8_t> bytes = encode(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StorageError("write failed for " + path.string());
}

Container read_container(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  // Whole-file checksum first, so that a corrupted length field is still
  // reported as a checksum failure at the true trailer offset.
  if (bytes.size() < 8) {
    throw ChecksumError("checksum mismatch in " + path.string() + ": file of " + std::to_string(bytes.size()) +
                        " bytes has no checksum trailer");
  }
  const std::size_t at = bytes.size() - 8;
  std::uint64_t stored = 0;
  for (int b = 0; b < 8; ++b) stored |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
  const std::uint64_t computed = fnv1a(bytes.data(), at);
  if (stored != computed) {
    throw ChecksumError("checksum mismatch in " + path.string() + ": size " + std::to_string(bytes.size()) +
                        " bytes, checksum at offset " + std::to_string(at) + ", stored " + hex64(stored) +
                        ", computed " + hex64(computed));
  }
  std::size_t used = 0;
  Container c = decode(bytes, &used, path.string());
  if (used != bytes.size()) throw ChecksumError("trailing bytes after container in " + path.string());
  return c;
}

// ---------------------------------------------------------------- partition files

void write_partition(const fs::path& path, const PartitionFile& data) {
  Container c;
  c.header["kind"] = "partition";
  c.header["partition_id"] = std::to_string(data.partition_id);
  c.header["npx"] = std::to_string(data.decomposition.npx);
  c.header["npz"] = std::to_string(data.decomposition.npz);
  c.header["grid_hash"] = hex64(data.grid_hash);
  c.header["flow_hash"] = hex64(data.flow_hash);
  put_layout(c, data.layout);
  if (!(data.coords.layout() == data.layout)) throw StorageError("coordinate layout differs from the file layout");
  c.arrays.push_back(block_array("coordinates", data.coords));
  if (data.metrics) c.arrays.push_back(block_array("metrics", *data.metrics));
  if (data.jacobian) c.arrays.push_back(block_array("jacobian", *data.jacobian));
  if (data.conservative) c.arrays.push_back(block_array("conservative", *data.conservative));
  write_container(path, c);
}

PartitionFile read_partition(const fs::path& path, const Partition& expected) {
  const Container c = read_container(path);
  if (c.value("kind") != "partition") throw StorageError(path.string() + " is not a partition file");
  PartitionFile f;
  f.partition_id = static_cast<int>(c.integer("partition_id"));
  f.layout = get_layout(c);
  if (f.partition_id != expected.id) {
    throw ExtentMismatchError(path.string() + " holds partition " + std::to_string(f.partition_id) +
                              ", manifest expects partition " + std::to_string(expected.id));
  }
  if (!(f.layout == expected.layout)) {
    throw ExtentMismatchError(path.string() + " extents " + layout_text(f.layout) + " differ from manifest " +
                              layout_text(expected.layout));
  }
  f.decomposition = {static_cast<int>(c.integer("npx")), static_cast<int>(c.integer("npz"))};
  f.grid_hash = c.hash("grid_hash");
  f.flow_hash = c.hash("flow_hash");
  f.coords = block_from_array<3>(c.array("coordinates"), f.layout);
  if (const NamedArray* a = c.find("metrics")) f.metrics = block_from_array<9>(*a, f.layout);
  if (const NamedArray* a = c.find("jacobian")) f.jacobian = block_from_array<1>(*a, f.layout);
  if (const NamedArray* a = c.find("conservative")) f.conservative = block_from_array<5>(*a, f.layout);
  return f;
}

PartitionFile make_partition_file(const CoordinateField& global_coords, const PartitionTopology& topology, int id,
                                  std::uint64_t grid_hash, std::uint64_t flow_hash, bool with_metrics) {
  const Partition& p = topology.parts.at(static_cast<std::size_t>(id));
  PartitionFile f;
  f.partition_id = id;
  f.decomposition = topology.spec;
  f.layout = p.layout;
  f.grid_hash = grid_hash;
  f.flow_hash = flow_hash;
  f.coords = CoordinateField(p.layout);
  gather_from_global(global_coords, f.coords);
  if (with_metrics) {
    CurvilinearMesh mesh = compute_metrics(f.coords);
    BlockField<1> jac(p.layout);
    for (std::size_t n = 0; n < jac.nodes(); ++n) {
      const double v = mesh.volume.at(n)[0];
      jac.at(n)[0] = v > 0.0 ? 1.0 / v : 0.0;
    }
    f.metrics = std::move(mesh.metrics);
    f.jacobian = std::move(jac);
  }
  return f;
}

fs::path checkpoint_path(const fs::path& dir, int id) { return dir / ("checkpoint_" + std::to_string(id) + ".jzsc"); }
fs::path solution_path(const fs::path& dir, int id) { return dir / ("solution_" + std::to_string(id) + ".jzsc"); }
fs::path partition_path(const fs::path& dir, int id) { return dir / ("partition_" + std::to_string(id) + ".jzsc"); }

// ---------------------------------------------------------------- snapshots

void append_snapshot(const fs::path& path, int partition_id, long iteration, double time, const ConservativeField& q) {
  Container c;
  c.header["kind"] = "snapshot";
  c.header["partition_id"] = std::to_string(partition_id);
  c.header["iteration"] = std::to_string(iteration);
  std::ostringstream t;
  t.precision(17);
  t << time;
  c.header["time"] = t.str();
  put_layout(c, q.layout());
  c.arrays.push_back(owned_array("conservative", q));
  const std::vector<std::uint8_t> bytes = encode(c);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw StorageError("cannot open " + path.string() + " for appending");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StorageError("append failed for " + path.string());
}

std::vector<Snapshot> read_snapshots(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  std::vector<Snapshot> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t used = 0;
    const Container c = decode(std::span(bytes).subspan(pos), &used, path.string() + " @" + std::to_string(pos));
    pos += used;
    if (c.value("kind") != "snapshot") throw StorageError(path.string() + " contains a non-snapshot record");
    Snapshot s;
    s.iteration = static_cast<long>(c.integer("iteration"));
    s.time = std::stod(c.value("time"));
    s.partition_id = static_cast<int>(c.integer("partition_id"));
    s.layout = get_layout(c);
    s.q = owned_from_array(c.array("conservative"), s.layout);
    if (!out.empty() && s.iteration <= out.back().iteration) {
      throw StorageError("snapshot iterations in " + path.string() + " do not increase (" +
                         std::to_string(out.back().iteration) + " then " + std::to_string(s.iteration) + ")");
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- checkpoints

void write_checkpoint(const fs::path& path, const ConservativeField& q, long iteration, const CheckpointKey& key) {
  Container c;
  c.header["kind"] = "checkpoint";
  c.header["partition_id"] = std::to_string(key.partition_id);
  c.header["iteration"] = std::to_string(iteration);
  c.header["grid_hash"] = hex64(key.grid_hash);
  c.header["flow_hash"] = hex64(key.flow_hash);
  c.header["npx"] = std::to_string(key.decomposition.npx);
  c.header["npz"] = std::to_string(key.decomposition.npz);
  put_layout(c, q.layout());
  c.arrays.push_back(owned_array("conservative", q));
  // Write-then-rename so that a crash never leaves a half-written checkpoint.
  const fs::path tmp = path.string() + ".tmp";
  write_container(tmp, c);
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path, const BlockLayout& layout, const CheckpointKey& key) {
  const Container c = read_container(path);
  if (c.value("kind") != "checkpoint") throw StorageError(path.string() + " is not a checkpoint");
  if (c.hash("grid_hash") != key.grid_hash) {
    throw IncompatibleCheckpointError(path.string() + " was written for grid " + c.value("grid_hash") +
                                      ", running grid is " + hex64(key.grid_hash));
  }
  if (c.hash("flow_hash") != key.flow_hash) {
    throw IncompatibleCheckpointError(path.string() + " was written for flow configuration " + c.value("flow_hash") +
                                      ", running configuration is " + hex64(key.flow_hash));
  }
  const int npx = static_cast<int>(c.integer("npx"));
  const int npz = static_cast<int>(c.integer("npz"));
  if (npx != key.decomposition.npx || npz != key.decomposition.npz) {
    throw IncompatibleCheckpointError(path.string() + " was written by a " + std::to_string(npx) + " x " +
                                      std::to_string(npz) + " decomposition, running " +
                                      std::to_string(key.decomposition.npx) + " x " +
                                      std::to_string(key.decomposition.npz) + " (repartitioning is not supported)");
  }
  if (c.integer("partition_id") != key.partition_id || !(get_layout(c) == layout)) {
    throw IncompatibleCheckpointError(path.string() + " belongs to partition " + c.value("partition_id") +
                                      " with different extents");
  }
  Checkpoint cp;
  cp.iteration = static_cast<long>(c.integer("iteration"));
  cp.q = owned_from_array(c.array("conservative"), layout);
  return cp;
}

// ---------------------------------------------------------------- manifest

PartitionTopology Manifest::topology() const {
  PartitionTopology t = build_topology(grid.dims(), decomposition);
  if (entries.size() != t.parts.size()) {
    throw PartitionError("manifest lists " + std::to_string(entries.size()) + " partitions, decomposition has " +
                         std::to_string(t.parts.size()));
  }
  return t;
}

Manifest make_manifest(const GridSpec& grid, const PartitionTopology& topology, std::uint64_t flow_hash,
                       const std::string& host, int base_port) {
  Manifest m;
  m.grid = grid;
  m.decomposition = topology.spec;
  m.grid_hash = grid.hash();
  m.flow_hash = flow_hash;
  for (const Partition& p : topology.parts) {
    m.entries.push_back({p, {host, base_port + p.id}, partition_path("", p.id).string()});
  }
  return m;
}

namespace {

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "-1"; }

std::string flags(const Partition& p) {
  std::string f;
  if (p.holds_entrance) f += 'E';
  if (p.holds_exit) f += 'X';
  if (p.holds_centerline) f += 'C';
  if (p.holds_farfield) f += 'F';
  return f.empty() ? "-" : f;
}

}  // namespace

std::string format_manifest(const Manifest& m) {
  std::ostringstream os;
  os.precision(17);
  os << "jetflow-manifest 1\n";
  os << "grid " << m.grid.n_axial << ' ' << m.grid.n_radial << ' ' << m.grid.n_azimuthal << ' ' << m.grid.length_axial
     << ' ' << m.grid.height_radial << ' ' << m.grid.stretch_axial << ' ' << m.grid.stretch_radial << ' '
     << m.grid.lip_radius << '\n';
  os << "decomposition " << m.decomposition.npx << ' ' << m.decomposition.npz << '\n';
  os << "hashes " << hex64(m.grid_hash) << ' ' << hex64(m.flow_hash) << '\n';
  os << "# partition id px pz i_begin i_end k_begin k_end west east south north flags endpoint file\n";
  for (const ManifestEntry& e : m.entries) {
    const Partition& p = e.partition;
    os << "partition " << p.id << ' ' << p.px << ' ' << p.pz << ' ' << p.layout.i_begin << ' ' << p.layout.i_end << ' '
       << p.layout.k_begin << ' ' << p.layout.k_end << ' ' << opt(p.west) << ' ' << opt(p.east) << ' '
       << opt(p.south) << ' ' << opt(p.north) << ' ' << flags(p) << ' ' << e.endpoint.host << ':' << e.endpoint.port
       << ' ' << e.file << '\n';
  }
  return os.str();
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  bool have_magic = false, have_grid = false, have_decomp = false;
  std::vector<std::pair<int, ManifestEntry>> raw;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!have_magic) {
      int version = 0;
      if (word != "jetflow-manifest" || !(ls >> version)) throw ConfigError("not a jetflow manifest", number);
      if (version != 1) throw ConfigError("unsupported manifest version " + std::to_string(version), number);
      have_magic = true;
      continue;
    }
    if (word == "grid") {
      GridSpec& g = m.grid;
      if (!(ls >> g.n_axial >> g.n_radial >> g.n_azimuthal >> g.length_axial >> g.height_radial >> g.stretch_axial >>
            g.stretch_radial >> g.lip_radius)) {
        throw ConfigError("malformed grid line", number);
      }
      have_grid = true;
    } else if (word == "decomposition") {
      if (!(ls >> m.decomposition.npx >> m.decomposition.npz)) throw ConfigError("malformed decomposition line", number);
      have_decomp = true;
    } else if (word == "hashes") {
      std::string g, f;
      if (!(ls >> g >> f)) throw ConfigError("malformed hashes line", number);
      try {
        m.grid_hash = parse_hex64(g);
        m.flow_hash = parse_hex64(f);
      } catch (const StorageError& e) {
        throw ConfigError(e.what(), number);
      }
    } else if (word == "partition") {
      ManifestEntry e;
      Partition& p = e.partition;
      int w, ea, s, n;
      std::string fl, endpoint;
      if (!(ls >> p.id >> p.px >> p.pz >> p.layout.i_begin >> p.layout.i_end >> p.layout.k_begin >> p.layout.k_end >>
            w >> ea >> s >> n >> fl >> endpoint >> e.file)) {
        throw ConfigError("malformed partition line", number);
      }
      const auto colon = endpoint.rfind(':');
      if (colon == std::string::npos) throw ConfigError("endpoint must be host:port", number);
      e.endpoint.host = endpoint.substr(0, colon);
      try {
        e.endpoint.port = std::stoi(endpoint.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad endpoint port in '" + endpoint + "'", number);
      }
      if (w >= 0) p.west = w;
      if (ea >= 0) p.east = ea;
      if (s >= 0) p.south = s;
      if (n >= 0) p.north = n;
      p.holds_entrance = fl.find('E') != std::string::npos;
      p.holds_exit = fl.find('X') != std::string::npos;
      p.holds_centerline = fl.find('C') != std::string::npos;
      p.holds_farfield = fl.find('F') != std::string::npos;
      raw.emplace_back(number, std::move(e));
    } else {
      throw ConfigError("unknown manifest record '" + word + "'", number);
    }
  }
  if (!have_magic || !have_grid || !have_decomp) throw ConfigError("manifest lacks the header, grid or decomposition line");

  const PartitionTopology topo = build_topology(m.grid.dims(), m.decomposition);
  if (raw.size() != topo.parts.size()) {
    throw PartitionError("manifest lists " + std::to_string(raw.size()) + " partitions, decomposition " +
                         std::to_string(m.decomposition.npx) + " x " + std::to_string(m.decomposition.npz) + " has " +
                         std::to_string(topo.parts.size()));
  }
  for (auto& [line_no, e] : raw) {
    if (e.partition.id < 0 || e.partition.id >= static_cast<int>(topo.parts.size())) {
      throw ConfigError("partition id " + std::to_string(e.partition.id) + " out of range", line_no);
    }
    const Partition& ref = topo.parts[static_cast<std::size_t>(e.partition.id)];
    e.partition.layout.dims = ref.layout.dims;
    if (!(e.partition.layout == ref.layout) || e.partition.px != ref.px || e.partition.pz != ref.pz ||
        e.partition.west != ref.west || e.partition.east != ref.east || e.partition.south != ref.south ||
        e.partition.north != ref.north) {
      throw PartitionError("line " + std::to_string(line_no) + ": partition " + std::to_string(ref.id) +
                           " extents or neighbours disagree with the decomposition");
    }
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.second.partition.id < b.second.partition.id; });
  for (auto& [line_no, e] : raw) m.entries.push_back(std::move(e));
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (m.entries[i].partition.id != static_cast<int>(i)) throw PartitionError("duplicate partition ids in manifest");
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StorageError("cannot open " + path.string() + " for writing");
  out << format_manifest(m);
  if (!out) throw StorageError("write failed for " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

// ---------------------------------------------------------------- VTK

void export_vtk(const fs::path& path, const CoordinateField& coords, const ConservativeField& q, const FlowConfig& cfg) {
  const BlockLayout& b = q.layout();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StorageError("cannot open " + path.string() + " for writing");
  const int ni = b.i_end - b.i_begin, nj = b.nj(), nk = b.k_end - b.k_begin;
  const long long n = static_cast<long long>(ni) * nj * nk;
  out.precision(10);
  out << "# vtk DataFile Version 3.0\njetflow solution\nASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << ni << ' ' << nj << ' ' << nk << "\nPOINTS " << n << " double\n";
  // VTK orders points with the first dimension fastest.
  auto each = [&](auto f) {
    for (int gk = b.k_begin; gk < b.k_end; ++gk)
      for (int j = 0; j < nj; ++j)
        for (int gi = b.i_begin; gi < b.i_end; ++gi) f(b.index(b.local_i(gi), j, b.local_k(gk)));
  };
  each([&](std::size_t m) {
    const double* x = coords.at(m);
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  });
  out << "POINT_DATA " << n << "\nSCALARS density double 1\nLOOKUP_TABLE default\n";
  each([&](std::size_t m) { out << q.at(m)[0] << '\n'; });
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  each([&](std::size_t m) {
    const double* s = q.at(m);
    const double ke = 0.5 * (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]) / s[0];
    out << (cfg.gamma - 1.0) * (s[4] - ke) << '\n';
  });
  out << "VECTORS velocity double\n";
  each([&](std::size_t m) {
    const double* s = q.at(m);
    out << s[1] / s[0] << ' ' << s[2] / s[0] << ' ' << s[3] / s[0] << '\n';
  });
  if (!out) throw StorageError("write failed for " + path.string());
}

}  // namespace jetflow
