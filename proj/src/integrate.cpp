#include "jetflow/integrate.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "jetflow/boundary.hpp"
#include "jetflow/storage.hpp"

namespace jetflow {

void RkScheme::validate() const {
  for (double a : alphas)
    if (!(a > 0.0)) throw ConfigError("Runge-Kutta coefficients must be positive");
  if (alphas.back() != 1.0) throw ConfigError("the last Runge-Kutta coefficient must be 1");
}

double RkScheme::amplification(double z) const {
  double g = 1.0;
  for (double a : alphas) g = 1.0 + a * z * g;
  return g;
}

std::array<double, 6> RkScheme::amplification_coefficients() const {
  // g = 1 + a5 z (1 + a4 z (1 + a3 z (1 + a2 z (1 + a1 z)))), so c_m = a5 a4 ... a_{6-m}.
  std::array<double, 6> c{};
  c[0] = 1.0;
  double product = 1.0;
  for (int m = 1; m <= 5; ++m) {
    product *= alphas[static_cast<std::size_t>(5 - m)];
    c[static_cast<std::size_t>(m)] = product;
  }
  return c;
}

void rk_stage(const ConservativeField& q_n, ConservativeField& q, double alpha, double dt, const RhsField& rhs,
              StageContext context) {
  const BlockLayout& b = q.layout();
  const ActiveRange a = active_range(b);
  const double f = alpha * dt;
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int li = a.li_begin; li < a.li_end; ++li) {
      std::size_t n = b.index(li, a.j_begin, lk);
      for (int j = a.j_begin; j < a.j_end; ++j, ++n) {
        const double* s = q_n.at(n);
        const double* r = rhs.at(n);
        double* d = q.at(n);
        for (int c = 0; c < 5; ++c) d[c] = s[c] - f * r[c];
        if (!std::isfinite(d[0] + d[1] + d[2] + d[3] + d[4])) {
          throw DivergenceError("non-finite conservative state", b.node(li, j, lk), context.iteration, context.stage);
        }
      }
    }
}

ConservativeField uniform_field(const BlockLayout& layout, const PrimitiveState& w, const FlowConfig& cfg) {
  ConservativeField q(layout);
  const ConservativeState s = conservative_from_primitive(w, cfg);
  for (int lk = 0; lk < layout.nk(); ++lk) {
    if (!layout.valid_k(lk)) continue;
    for (int li = 0; li < layout.ni(); ++li) {
      if (!layout.valid_i(li)) continue;
      for (int j = 0; j < layout.nj(); ++j) store_state(q.at(li, j, lk), s);
    }
  }
  return q;
}

ConservativeField initial_condition(const BlockLayout& layout, const FlowConfig& cfg) {
  PrimitiveState w;
  w.rho = cfg.ambient_density();
  w.pressure = cfg.ambient_pressure();
  w.temperature = cfg.ambient_temperature();
  return uniform_field(layout, w, cfg);
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Barrier:
      return "barrier";
    case Phase::Rhs:
      return "rhs";
    case Phase::Update:
      return "update";
    case Phase::Bc:
      return "bc";
    case Phase::Exchange:
      return "exchange";
    case Phase::Snapshot:
      return "snapshot";
    case Phase::Checkpoint:
      return "checkpoint";
  }
  return "?";
}

void RunPlan::validate() const {
  if (n_iterations < 1) throw ConfigError("the iteration budget must be at least 1");
  if (output_every < 0 || checkpoint_every < 0) throw ConfigError("output cadences must be nonnegative");
  if ((output_every > 0 || checkpoint_every > 0 || checkpoint_at_end) && output_dir.empty()) {
    throw ConfigError("snapshots and checkpoints need an output directory");
  }
  if (restart && restart_dir.empty()) throw ConfigError("restart needs a checkpoint directory");
  scheme.validate();
}

double RunResult::mean_iteration_seconds(std::size_t discard) const {
  if (iteration_seconds.empty()) return 0.0;
  if (iteration_seconds.size() <= discard) discard = 0;
  double sum = 0.0;
  for (std::size_t i = discard; i < iteration_seconds.size(); ++i) sum += iteration_seconds[i];
  return sum / static_cast<double>(iteration_seconds.size() - discard);
}

std::vector<WorkerInput> split_coordinates(const CoordinateField& global, const PartitionTopology& topology) {
  std::vector<WorkerInput> out;
  for (const Partition& p : topology.parts) {
    WorkerInput w;
    w.coords = CoordinateField(p.layout);
    gather_from_global(global, w.coords);
    out.push_back(std::move(w));
  }
  return out;
}

ConservativeField assemble_global(const PartitionTopology& topology, const std::vector<ConservativeField>& fields) {
  ConservativeField global(BlockLayout::whole(topology.dims));
  for (const ConservativeField& f : fields) copy_owned(f, global);
  gather_from_global(global, global);
  return global;
}

namespace {

/// Boundary update of one block, including the ring gather for the centerline.
long apply_block_boundaries(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg,
                            const PartitionTopology& topo, const Partition& self, Transport& t, std::uint64_t seq,
                            Millis timeout) {
  apply_farfield(q, mesh, cfg);
  apply_entrance(q, mesh, cfg);
  const long fallbacks = apply_exit(q, mesh, cfg);
  if (topo.dims.axis_at_j0) {
    const std::vector<double> plane = axis_adjacent_plane(q);
    const BlockLayout& b = self.layout;
    const std::vector<double> ring =
        azimuthal_gather(t, topo.ring(self.px), b.k_begin, std::min(b.k_end, topo.dims.distinct_k()),
                         topo.dims.distinct_k(), plane, seq, timeout);
    apply_centerline(q, ring);
  }
  apply_periodicity(q);
  return fallbacks;
}

}  // namespace

WorkerResult run_worker(const RunPlan& plan, const RunCase& c, int id, Transport& transport) {
  const Partition& self = c.topology.parts.at(static_cast<std::size_t>(id));
  const FlowConfig& cfg = c.cfg;
  const WorkerInput& input = c.workers.at(static_cast<std::size_t>(id));
  if (!(input.coords.layout() == self.layout)) {
    throw PartitionError("coordinates of partition " + std::to_string(id) + " do not match its extents");
  }
  auto emit = [&](long it, int stage, Phase p) {
    if (plan.trace) plan.trace({id, it, stage, p});
  };

  const CurvilinearMesh mesh = compute_metrics(input.coords);
  RhsAssembler assembler(mesh);
  HaloExchanger exchanger(c.topology, id, transport, plan.exchange_timeout);
  const CheckpointKey key{c.grid_hash, cfg.hash(), c.topology.spec, id};

  WorkerResult result;
  ConservativeField q;
  if (plan.restart) {
    Checkpoint cp = read_checkpoint(checkpoint_path(plan.restart_dir, id), self.layout, key);
    q = std::move(cp.q);
    result.first_iteration = cp.iteration;
  } else if (input.initial) {
    q = *input.initial;
  } else {
    q = initial_condition(self.layout, cfg);
  }
  exchanger.exchange(q);

  const bool stats_on = plan.stats_from >= 0;
  if (stats_on) result.stats = RunningMoments(c.topology.dims);

  ConservativeField q_n = q;
  RhsField rhs(self.layout);
  std::uint64_t phase = 1;
  std::uint64_t gather_seq = 1;
  const auto started = Clock::now();
  long it = result.first_iteration;
  const long last = result.first_iteration + plan.n_iterations;

  try {
    while (it < last) {
      ++it;
      const auto t0 = Clock::now();
      std::copy(q.values().begin(), q.values().end(), q_n.values().begin());
      for (int stage = 0; stage < 5; ++stage) {
        const StageContext ctx{it, stage + 1};
        emit(it, stage, Phase::Barrier);
        barrier(transport, phase++, plan.exchange_timeout);
        emit(it, stage, Phase::Rhs);
        assembler.assemble(q, cfg, rhs, plan.rhs, ctx);
        emit(it, stage, Phase::Update);
        rk_stage(q_n, q, plan.scheme.alphas[static_cast<std::size_t>(stage)], cfg.dt, rhs, ctx);
        emit(it, stage, Phase::Bc);
        try {
          result.exit_fallbacks += apply_block_boundaries(q, mesh, cfg, c.topology, self, transport, gather_seq++,
                                                          plan.exchange_timeout);
        } catch (const InvalidStateError& e) {
          throw DivergenceError(std::string("invalid boundary state: ") + e.what(), e.node, it, stage + 1);
        }
        emit(it, stage, Phase::Exchange);
        ExchangeHandle h = exchanger.post(q);
        exchanger.complete(h);
      }
      result.iteration_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());

      if (stats_on && it >= plan.stats_from) result.stats.add_block(q, 1);
      if (plan.output_every > 0 && it % plan.output_every == 0) {
        emit(it, -1, Phase::Snapshot);
        append_snapshot(solution_path(plan.output_dir, id), id, it, static_cast<double>(it) * cfg.dt, q);
      }
      if ((plan.checkpoint_every > 0 && it % plan.checkpoint_every == 0) || (plan.checkpoint_at_end && it == last)) {
        emit(it, -1, Phase::Checkpoint);
        write_checkpoint(checkpoint_path(plan.output_dir, id), q, it, key);
      }
      if (plan.wall_clock_limit > 0.0 && it < last) {
        // Rank 0 decides so that every worker stops after the same iteration.
        bool stop = false;
        if (transport.rank() == 0) {
          stop = std::chrono::duration<double>(Clock::now() - started).count() >= plan.wall_clock_limit;
          for (int r = 1; r < transport.size(); ++r)
            transport.send(r, tag::control, static_cast<std::uint64_t>(it), {stop ? 1.0 : 0.0});
        } else {
          stop = transport.receive(0, tag::control, plan.exchange_timeout).payload.at(0) != 0.0;
        }
        if (stop) break;
      }
    }
  } catch (const DivergenceError& e) {
    if (!plan.output_dir.empty()) {
      emit(it, -1, Phase::Checkpoint);
      write_checkpoint(checkpoint_path(plan.output_dir, id), q_n, it - 1, key);
    }
    transport.abort(e.what());
    throw;
  } catch (const AbortedError&) {
    throw;
  } catch (const std::exception& e) {
    transport.abort(std::string("partition ") + std::to_string(id) + ": " + e.what());
    throw;
  }
  result.last_iteration = it;
  result.q = std::move(q);
  return result;
}

namespace {

RunResult collect(const RunPlan& plan, const RunCase& c, std::vector<WorkerResult>& results,
                  std::vector<std::exception_ptr>& errors) {
  std::exception_ptr first;
  for (std::exception_ptr& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const AbortedError&) {
      if (!first) first = e;
    } catch (...) {
      first = e;
      break;
    }
  }
  if (first) std::rethrow_exception(first);

  RunResult r;
  for (WorkerResult& w : results) {
    r.exit_fallbacks += w.exit_fallbacks;
    r.fields.push_back(std::move(w.q));
  }
  r.iteration_seconds = results.front().iteration_seconds;
  r.first_iteration = results.front().first_iteration;
  r.last_iteration = results.front().last_iteration;
  r.stopped_by_wall_clock = r.last_iteration < r.first_iteration + plan.n_iterations;
  r.global = assemble_global(c.topology, r.fields);
  if (plan.stats_from >= 0) {
    r.stats = RunningMoments(c.topology.dims);
    for (std::size_t p = 0; p < results.size(); ++p) r.stats.assemble(results[p].stats, c.topology.parts[p].layout);
  }
  return r;
}

void check_case(const RunPlan& plan, const RunCase& c) {
  plan.validate();
  c.cfg.validate();
  if (c.workers.size() != c.topology.parts.size()) {
    throw PartitionError("worker count " + std::to_string(c.workers.size()) + " does not match the " +
                         std::to_string(c.topology.parts.size()) + " partitions of the topology");
  }
  if (!plan.output_dir.empty()) std::filesystem::create_directories(plan.output_dir);
}

}  // namespace

RunResult run(const RunPlan& plan, const RunCase& c) {
  check_case(plan, c);
  const int n = static_cast<int>(c.topology.parts.size());
  SharedHub hub(n);
  std::vector<std::unique_ptr<Transport>> transports;
  for (int r = 0; r < n; ++r) transports.push_back(hub.connect(r));
  std::vector<WorkerResult> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  if (n == 1) {
    try {
      results[0] = run_worker(plan, c, 0, *transports[0]);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  } else {
    std::vector<std::thread> threads;
    for (int r = 0; r < n; ++r) {
      threads.emplace_back([&, r] {
        try {
          results[static_cast<std::size_t>(r)] = run_worker(plan, c, r, *transports[static_cast<std::size_t>(r)]);
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
          hub.abort("worker " + std::to_string(r) + " failed");
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }
  return collect(plan, c, results, errors);
}

RunResult run_sockets(const RunPlan& plan, const RunCase& c, const std::vector<Endpoint>& endpoints) {
  check_case(plan, c);
  const int n = static_cast<int>(c.topology.parts.size());
  if (static_cast<int>(endpoints.size()) != n) throw PartitionError("endpoint table does not match the partitions");
  std::vector<SocketListener> listeners;
  std::vector<Endpoint> bound = endpoints;
  for (int r = 0; r < n; ++r) {
    listeners.emplace_back(endpoints[static_cast<std::size_t>(r)].host, endpoints[static_cast<std::size_t>(r)].port);
    bound[static_cast<std::size_t>(r)].port = listeners.back().port();
  }
  std::vector<std::unique_ptr<SocketTransport>> transports;
  for (int r = 0; r < n; ++r) {
    transports.push_back(std::make_unique<SocketTransport>(r, bound, std::move(listeners[static_cast<std::size_t>(r)])));
  }
  std::vector<WorkerResult> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> threads;
  for (int r = 0; r < n; ++r) {
    threads.emplace_back([&, r] {
      try {
        results[static_cast<std::size_t>(r)] = run_worker(plan, c, r, *transports[static_cast<std::size_t>(r)]);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        for (auto& t : transports) t->abort("worker " + std::to_string(r) + " failed");
      }
    });
  }
  for (std::thread& t : threads) t.join();
  return collect(plan, c, results, errors);
}

}  // namespace jetflow
