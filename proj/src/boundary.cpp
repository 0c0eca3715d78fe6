#include "jetflow/boundary.hpp"

#include <cmath>

namespace jetflow {

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Entrance:
      return "entrance";
    case BoundaryKind::FarField:
      return "farfield";
    case BoundaryKind::Exit:
      return "exit";
    case BoundaryKind::PeriodicAzimuthal:
      return "periodic";
    case BoundaryKind::Centerline:
      return "centerline";
  }
  return "?";
}

namespace {

PrimitiveState with_temperature(PrimitiveState w, const FlowConfig& cfg) {
  w.temperature = w.pressure / (w.rho * cfg.gas_constant());
  return w;
}

Vec3 unit(const double* a, double sign) {
  const double len = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  return {sign * a[0] / len, sign * a[1] / len, sign * a[2] / len};
}

PrimitiveState load_primitive(const ConservativeField& q, std::size_t n, const FlowConfig& cfg) {
  const BlockLayout& b = q.layout();
  const int nj = b.nj();
  const int j = static_cast<int>(n % static_cast<std::size_t>(nj));
  const int rest = static_cast<int>(n / static_cast<std::size_t>(nj));
  const int li = rest % b.ni();
  const int lk = rest / b.ni();
  return primitive_from_conservative(load_state(q.at(n)), cfg, b.node(li, j, lk));
}

void store_primitive(ConservativeField& q, std::size_t n, const PrimitiveState& w, const FlowConfig& cfg) {
  store_state(q.at(n), conservative_from_primitive(w, cfg));
}

template <class F>
void for_owned_k(const BlockLayout& b, F f) {
  for (int lk = BlockLayout::ghost; lk < b.nk() - BlockLayout::ghost; ++lk) f(lk);
}

}  // namespace

PrimitiveState ambient_state(const FlowConfig& cfg) {
  PrimitiveState w;
  w.rho = cfg.ambient_density();
  w.velocity = cfg.ambient_velocity;
  w.pressure = cfg.ambient_pressure();
  w.temperature = cfg.ambient_temperature();
  return w;
}

PrimitiveState jet_state(const FlowConfig& cfg) {
  PrimitiveState w;
  w.rho = cfg.jet_density();
  w.velocity = {cfg.jet_velocity(), 0.0, 0.0};
  w.pressure = cfg.jet_pressure();
  w.temperature = cfg.jet_temperature();
  return w;
}

PrimitiveState riemann_state(const PrimitiveState& in, const PrimitiveState& ex, const Vec3& n, const FlowConfig& cfg) {
  const double g = cfg.gamma;
  const double c_in = sound_speed(in, cfg);
  const double c_ex = sound_speed(ex, cfg);
  const double un_in = dot(in.velocity, n);
  const double un_ex = dot(ex.velocity, n);
  if (un_ex <= -c_ex) return ex;  // supersonic inflow
  if (un_in >= c_in) return in;   // supersonic outflow

  const double r_plus = un_in + 2.0 * c_in / (g - 1.0);
  const double r_minus = un_ex - 2.0 * c_ex / (g - 1.0);
  const double un = 0.5 * (r_plus + r_minus);
  const double c = 0.25 * (g - 1.0) * (r_plus - r_minus);
  const PrimitiveState& upwind = un > 0.0 ? in : ex;
  const double entropy = upwind.pressure / std::pow(upwind.rho, g);
  const double un_up = dot(upwind.velocity, n);

  PrimitiveState w;
  w.rho = std::pow(c * c / (g * entropy), 1.0 / (g - 1.0));
  w.pressure = w.rho * c * c / g;
  for (int d = 0; d < 3; ++d) w.velocity[d] = upwind.velocity[d] + (un - un_up) * n[d];
  return with_temperature(w, cfg);
}

PrimitiveState entrance_state(const PrimitiveState& interior, double radius, const FlowConfig& cfg) {
  const Vec3 n{-1.0, 0.0, 0.0};
  if (cfg.jet_inflow && radius <= cfg.jet_radius) return riemann_state(interior, jet_state(cfg), n, cfg);
  return riemann_state(interior, ambient_state(cfg), n, cfg);
}

PrimitiveState farfield_state(const PrimitiveState& interior, const Vec3& n, const FlowConfig& cfg) {
  return riemann_state(interior, ambient_state(cfg), n, cfg);
}

ExitState exit_state(const PrimitiveState& interior, const Vec3& n, double p_exit, const FlowConfig& cfg) {
  const double c = sound_speed(interior, cfg);
  if (dot(interior.velocity, n) >= c) return {interior, true};
  const double e_int = interior.pressure / ((cfg.gamma - 1.0) * interior.rho);
  PrimitiveState w = interior;
  w.pressure = p_exit;
  w.rho = p_exit / ((cfg.gamma - 1.0) * e_int);
  return {with_temperature(w, cfg), false};
}

ConservativeState centerline_state(std::span<const ConservativeState> ring) {
  ConservativeState mean;
  for (const ConservativeState& s : ring) {
    mean.rho += s.rho;
    for (int d = 0; d < 3; ++d) mean.momentum[d] += s.momentum[d];
    mean.energy += s.energy;
  }
  const double inv = 1.0 / static_cast<double>(ring.size());
  mean.rho *= inv;
  for (int d = 0; d < 3; ++d) mean.momentum[d] *= inv;
  mean.energy *= inv;
  return mean;
}

void apply_farfield(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg) {
  const BlockLayout& b = q.layout();
  const int jb = b.nj() - 1;
  const int i_lo = b.local_i(std::max(b.i_begin, 1));
  const int i_hi = b.local_i(std::min(b.i_end, b.dims.ni - 1));
  for_owned_k(b, [&](int lk) {
    for (int li = i_lo; li < i_hi; ++li) {
      const std::size_t n = b.index(li, jb, lk);
      const PrimitiveState in = load_primitive(q, n - 1, cfg);
      const Vec3 normal = unit(mesh.area(n, 1), 1.0);
      store_primitive(q, n, farfield_state(in, normal, cfg), cfg);
    }
  });
}

void apply_entrance(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg) {
  const BlockLayout& b = q.layout();
  if (b.i_begin != 0) return;
  const int li = b.local_i(0);
  for_owned_k(b, [&](int lk) {
    for (int j = 1; j < b.nj(); ++j) {
      const std::size_t n = b.index(li, j, lk);
      const PrimitiveState in = load_primitive(q, n + b.stride_i(), cfg);
      const double* x = mesh.coords.at(n);
      const double radius = std::hypot(x[1], x[2]);
      store_primitive(q, n, entrance_state(in, radius, cfg), cfg);
    }
  });
}

long apply_exit(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg) {
  const BlockLayout& b = q.layout();
  if (b.i_end != b.dims.ni) return 0;
  const int li = b.local_i(b.dims.ni - 1);
  const double p_exit = cfg.exit_pressure_or_ambient();
  long fallbacks = 0;
  for_owned_k(b, [&](int lk) {
    for (int j = 1; j < b.nj(); ++j) {
      const std::size_t n = b.index(li, j, lk);
      const PrimitiveState in = load_primitive(q, n - b.stride_i(), cfg);
      const ExitState s = exit_state(in, unit(mesh.area(n, 0), 1.0), p_exit, cfg);
      if (s.supersonic_fallback) ++fallbacks;
      store_primitive(q, n, s.state, cfg);
    }
  });
  return fallbacks;
}

std::vector<double> axis_adjacent_plane(const ConservativeField& q) {
  const BlockLayout& b = q.layout();
  const int k_end = std::min(b.k_end, b.dims.distinct_k());
  std::vector<double> plane;
  plane.reserve(static_cast<std::size_t>(std::max(0, k_end - b.k_begin)) * (b.i_end - b.i_begin) * 5);
  for (int gk = b.k_begin; gk < k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi) {
      const double* s = q.at(b.local_i(gi), 1, b.local_k(gk));
      plane.insert(plane.end(), s, s + 5);
    }
  return plane;
}

void apply_centerline(ConservativeField& q, std::span<const double> ring_plane) {
  const BlockLayout& b = q.layout();
  if (!b.dims.axis_at_j0) return;
  const int owned_i = b.i_end - b.i_begin;
  const int stations = b.dims.distinct_k();
  if (ring_plane.size() != static_cast<std::size_t>(stations) * owned_i * 5) {
    throw PartitionError("centerline ring plane has " + std::to_string(ring_plane.size()) + " values, expected " +
                         std::to_string(static_cast<std::size_t>(stations) * owned_i * 5));
  }
  const double inv = 1.0 / static_cast<double>(stations);
  for (int oi = 0; oi < owned_i; ++oi) {
    double mean[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < stations; ++k) {
      const double* s = ring_plane.data() + (static_cast<std::size_t>(k) * owned_i + oi) * 5;
      for (int c = 0; c < 5; ++c) mean[c] += s[c];
    }
    for (int c = 0; c < 5; ++c) mean[c] *= inv;
    const int li = BlockLayout::ghost + oi;
    for_owned_k(b, [&](int lk) {
      double* d = q.at(li, 0, lk);
      for (int c = 0; c < 5; ++c) d[c] = mean[c];
    });
  }
}

void apply_periodicity(ConservativeField& q) {
  const BlockLayout& b = q.layout();
  if (!b.dims.periodic_k || b.k_begin != 0 || b.k_end != b.dims.nk) return;
  const int last = b.dims.nk - 1;
  const int nk_local = b.nk();
  for (int lk = 0; lk < nk_local; ++lk) {
    const int gk = b.global_k(lk);
    if (gk >= 0 && gk < last) continue;
    const int src = b.local_k(b.dims.wrap_k(gk));
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      const double* s = q.at(li, 0, src);
      double* d = q.at(li, 0, lk);
      std::copy(s, s + 5 * static_cast<std::size_t>(b.nj()), d);
    }
  }
}

BoundaryReport apply_boundaries(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg) {
  BoundaryReport report;
  apply_farfield(q, mesh, cfg);
  apply_entrance(q, mesh, cfg);
  report.exit_fallbacks = apply_exit(q, mesh, cfg);
  if (q.layout().dims.axis_at_j0) apply_centerline(q, axis_adjacent_plane(q));
  apply_periodicity(q);
  return report;
}

}  // namespace jetflow
