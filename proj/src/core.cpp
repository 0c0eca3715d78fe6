#include "jetflow/core.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace jetflow {

std::string to_string(const NodeIndex& n) {
  return "(" + std::to_string(n.i) + ", " + std::to_string(n.j) + ", " + std::to_string(n.k) + ")";
}

FlowConfig FlowConfig::jet(double mach, double reynolds, double pressure_ratio, double temperature_ratio,
                           double gamma) {
  FlowConfig cfg;
  cfg.gamma = gamma;
  cfg.mach_jet = mach;
  cfg.reynolds = reynolds;
  cfg.pressure_ratio = pressure_ratio;
  cfg.temperature_ratio = temperature_ratio;
  cfg.mu_ref = 1.0 / reynolds;
  cfg.cv = 1.0 / (gamma * (gamma - 1.0) * mach * mach);
  cfg.cp = gamma * cfg.cv;
  return cfg;
}

void FlowConfig::validate() const {
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  if (!(prandtl > 0.0)) throw ConfigError("prandtl must be positive");
  if (!(prandtl_sgs > 0.0)) throw ConfigError("prandtl_sgs must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cv > 0.0) || !(cp > cv)) throw ConfigError("specific heats must satisfy cp > cv > 0");
  if (!(k4 > 0.0)) throw ConfigError("k4 must be positive");
  if (!(k2 >= 0.0)) throw ConfigError("k2 must be nonnegative");
  if (!(mach_jet > 0.0)) throw ConfigError("mach_jet must be positive");
  if (!(reynolds > 0.0)) throw ConfigError("reynolds must be positive");
  if (!(pressure_ratio > 0.0) || !(temperature_ratio > 0.0)) throw ConfigError("PR and TR must be positive");
  if (!(t_ref > 0.0)) throw ConfigError("t_ref must be positive");
  if (!(mu_ref >= 0.0)) throw ConfigError("mu_ref must be nonnegative");
  if (!(jet_radius > 0.0)) throw ConfigError("jet_radius must be positive");
}

std::string FlowConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "gamma=" << gamma << ";prandtl=" << prandtl << ";prandtl_sgs=" << prandtl_sgs << ";mach_jet=" << mach_jet
     << ";reynolds=" << reynolds << ";pressure_ratio=" << pressure_ratio << ";temperature_ratio="
     << temperature_ratio << ";dt=" << dt << ";sutherland_s1=" << sutherland_s1 << ";t_ref=" << t_ref
     << ";mu_ref=" << mu_ref << ";cp=" << cp << ";cv=" << cv << ";k2=" << k2 << ";k4=" << k4
     << ";sgs_enabled=" << sgs_enabled << ";jet_radius=" << jet_radius << ";jet_inflow=" << jet_inflow
     << ";ambient_velocity=" << ambient_velocity[0] << "," << ambient_velocity[1] << "," << ambient_velocity[2]
     << ";exit_pressure=" << exit_pressure;
  return os.str();
}

std::uint64_t FlowConfig::hash() const { return fnv1a(canonical()); }

PrimitiveState primitive_from_conservative(const ConservativeState& q, const FlowConfig& cfg, NodeIndex where) {
  if (!(q.rho > 0.0)) throw InvalidStateError("nonpositive density " + std::to_string(q.rho), where);
  PrimitiveState w;
  w.rho = q.rho;
  const double inv_rho = 1.0 / q.rho;
  for (int d = 0; d < 3; ++d) w.velocity[d] = q.momentum[d] * inv_rho;
  w.pressure = (cfg.gamma - 1.0) * (q.energy - 0.5 * q.rho * dot(w.velocity, w.velocity));
  if (!(w.pressure > 0.0)) throw InvalidStateError("nonpositive pressure " + std::to_string(w.pressure), where);
  w.temperature = w.pressure / (q.rho * cfg.gas_constant());
  return w;
}

ConservativeState conservative_from_primitive(const PrimitiveState& w, const FlowConfig& cfg) {
  ConservativeState q;
  q.rho = w.rho;
  for (int d = 0; d < 3; ++d) q.momentum[d] = w.rho * w.velocity[d];
  q.energy = w.pressure / (cfg.gamma - 1.0) + 0.5 * w.rho * dot(w.velocity, w.velocity);
  return q;
}

double sound_speed(const PrimitiveState& w, const FlowConfig& cfg) { return std::sqrt(cfg.gamma * w.pressure / w.rho); }

double sutherland_viscosity(double t, const FlowConfig& cfg) {
  const double ratio = t / cfg.ambient_temperature();
  const double t_dim = cfg.t_ref * ratio;
  return cfg.mu_ref * ratio * std::sqrt(ratio) * (cfg.t_ref + cfg.sutherland_s1) / (t_dim + cfg.sutherland_s1);
}

Conductivity conductivity(double mu, double mu_sgs, const FlowConfig& cfg) {
  return {mu * cfg.cp / cfg.prandtl, mu_sgs * cfg.cp / cfg.prandtl_sgs};
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t n = 0; n < size; ++n) {
    h ^= bytes[n];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

}  // namespace jetflow
