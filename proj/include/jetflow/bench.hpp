#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jetflow/core.hpp"
#include "jetflow/mesh.hpp"
#include "jetflow/partition.hpp"

namespace jetflow {

struct MeshCase {
  std::string id;
  GridSpec grid;
  int start = 1;  // scalability starting point s
};

/// Optional timing source replacing live runs: seconds per iteration for a candidate.
using SyntheticTiming = std::function<double(const MeshCase&, const PartitionSpec&)>;

struct SweepPlan {
  std::vector<MeshCase> meshes;
  std::vector<int> workers{1, 2, 4, 8};
  long iterations = 1000;
  double wall_clock_cap = 0.0;  // seconds per run, <= 0 disables
  std::size_t warmup = 5;       // discarded leading iterations
  FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  SyntheticTiming synthetic;

  /// Throws ConfigError when a starting point is not among the worker counts.
  void validate() const;
};

/// Desk-scale family: the production mesh doubling pattern at 1/64 linear scale
/// (32 x 32 x 91 and up). `count` meshes starting at mesh A.
std::vector<MeshCase> desk_mesh_family(int count);

/// Azimuthal partition counts tried for N workers: every divisor of N.
std::vector<int> azimuthal_candidates(int workers);

struct ScalingRecord {
  std::string mesh;
  int workers = 1;
  int npx = 1;
  int npz = 1;
  double seconds = 0.0;  // mean wall time per main-loop iteration
  long iterations = 0;
  bool selected = false;
};

struct SkippedCandidate {
  std::string mesh;
  int workers = 1;
  int npx = 1;
  int npz = 1;
  std::string reason;
};

struct SweepResult {
  std::vector<ScalingRecord> records;
  std::vector<SkippedCandidate> skipped;
  std::vector<MeshCase> meshes;
};

/// Runs every feasible candidate of every (mesh, N), one run at a time, and
/// marks the fastest per (mesh, N) as selected (ties toward smaller npz).
SweepResult run_sweep(const SweepPlan& plan);

/// Marks the argmin of each (mesh, N) group as selected.
void select_fastest(std::vector<ScalingRecord>& records);

/// Sp(m, N) = T(m, s) / T(m, N) over selected records. Throws IncompleteSweepError
/// when either record is missing.
double speedup(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start);
/// Literal eta = Sp / N.
double efficiency(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start);
/// Baseline-shifted eta' = Sp * s / N.
double shifted_efficiency(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start);

/// Writes scaling.csv, speedup.svg and efficiency.svg into `dir`.
void report(const SweepResult& sweep, const std::filesystem::path& dir);

std::string format_csv(const SweepResult& sweep);
/// Reads records (and starting points) back from a report CSV.
SweepResult parse_csv(const std::string& text);

/// SVG line chart of Sp (or eta when `efficiency_chart`) against N, one series
/// per mesh plus the ideal line. Values above the ideal are not clipped.
std::string render_svg(const SweepResult& sweep, bool efficiency_chart);

}  // namespace jetflow
