#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jetflow/exchange.hpp"
#include "jetflow/field.hpp"
#include "jetflow/mesh.hpp"
#include "jetflow/numerics.hpp"
#include "jetflow/partition.hpp"
#include "jetflow/stats.hpp"

namespace jetflow {

/// Jameson low-storage multistage scheme q_l = q_n - alpha_l dt RHS(q_{l-1}).
struct RkScheme {
  std::array<double, 5> alphas{0.25, 1.0 / 6.0, 0.375, 0.5, 1.0};

  /// Throws ConfigError unless the last coefficient is 1 and all are positive.
  void validate() const;
  /// Amplification factor on dq/dt = lambda q, z = lambda dt, by nested product.
  double amplification(double z) const;
  /// Polynomial coefficients c_0..c_5 of the amplification factor.
  std::array<double, 6> amplification_coefficients() const;
};

/// q_stage <- q_n - alpha dt rhs on the active nodes of the block. Throws
/// DivergenceError on a non-finite result.
void rk_stage(const ConservativeField& q_n, ConservativeField& q_stage, double alpha, double dt, const RhsField& rhs,
              StageContext context = {});

/// Quiescent ambient state on every valid node (owned and ghost).
ConservativeField initial_condition(const BlockLayout& layout, const FlowConfig& cfg);
/// Uniform state on every valid node.
ConservativeField uniform_field(const BlockLayout& layout, const PrimitiveState& w, const FlowConfig& cfg);

enum class Phase { Barrier, Rhs, Update, Bc, Exchange, Snapshot, Checkpoint };
std::string to_string(Phase p);

struct PhaseEvent {
  int worker;
  long iteration;
  int stage;  // -1 outside the stage loop
  Phase phase;
};

/// Called from worker threads; must be thread-safe.
using PhaseTrace = std::function<void(const PhaseEvent&)>;

struct RunPlan {
  long n_iterations = 1000;
  double wall_clock_limit = 0.0;  // seconds, <= 0 disables; checked once per iteration
  long output_every = 0;          // snapshot cadence, 0 disables
  long checkpoint_every = 0;      // 0: checkpoint only at the end when a directory is set
  bool checkpoint_at_end = false;
  long stats_from = -1;           // first iteration accumulated into statistics, < 0 disables
  bool restart = false;           // restore from checkpoints in restart_dir
  std::filesystem::path restart_dir;
  std::filesystem::path output_dir;  // snapshots and checkpoints
  RkScheme scheme;
  RhsOptions rhs;
  bool freeze_dissipation = false;   // reserved: dissipation is recomputed every stage
  Millis exchange_timeout{120000};
  PhaseTrace trace;

  void validate() const;
};

/// One partition's inputs: coordinates with ghost images, and optionally a
/// starting field that overrides the initial condition.
struct WorkerInput {
  CoordinateField coords;
  std::optional<ConservativeField> initial;
};

struct RunCase {
  PartitionTopology topology;
  FlowConfig cfg;
  std::uint64_t grid_hash = 0;
  std::vector<WorkerInput> workers;  // indexed by partition id
};

/// Coordinates of every partition copied from the whole-domain grid.
std::vector<WorkerInput> split_coordinates(const CoordinateField& global, const PartitionTopology& topology);

struct WorkerResult {
  ConservativeField q;
  std::vector<double> iteration_seconds;
  long first_iteration = 0;  // iteration counter before the first step of this run
  long last_iteration = 0;
  long exit_fallbacks = 0;
  RunningMoments stats;
};

struct RunResult {
  std::vector<ConservativeField> fields;  // per partition, ghosts filled
  ConservativeField global;               // whole domain, periodic images filled
  std::vector<double> iteration_seconds;  // worker 0's wall time per main-loop iteration
  long first_iteration = 0;
  long last_iteration = 0;
  long exit_fallbacks = 0;
  bool stopped_by_wall_clock = false;
  RunningMoments stats;  // axial velocity, empty unless RunPlan::stats_from >= 0

  double mean_iteration_seconds(std::size_t discard = 0) const;
};

/// The processing loop of one worker. Stage order: barrier, RHS, update,
/// boundary conditions, exchange.
WorkerResult run_worker(const RunPlan& plan, const RunCase& c, int partition_id, Transport& transport);

/// Runs every partition as a thread over the shared-memory transport. On
/// divergence the last valid state is checkpointed (when an output directory is
/// set) and the DivergenceError is rethrown.
RunResult run(const RunPlan& plan, const RunCase& c);

/// Same as run() over TCP sockets on the loopback interface, one thread per worker.
RunResult run_sockets(const RunPlan& plan, const RunCase& c, const std::vector<Endpoint>& endpoints);

/// Assembles per-partition fields into a whole-domain field.
ConservativeField assemble_global(const PartitionTopology& topology, const std::vector<ConservativeField>& fields);

}  // namespace jetflow
