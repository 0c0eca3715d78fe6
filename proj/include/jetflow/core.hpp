#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "jetflow/errors.hpp"

namespace jetflow {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Physical and numerical constants of a jet case.
///
/// Units are jet-entrance nondimensional: rho_j = 1, U_j = 1, lengths in jet
/// diameters, p_j = 1/(gamma M^2), mu_ref = 1/Re. The default specific heats
/// are chosen so that R = p_j and therefore T_j = 1.
struct FlowConfig {
  double gamma = 1.4;
  double prandtl = 0.72;
  double prandtl_sgs = 0.9;
  double mach_jet = 1.4;
  double reynolds = 1.57e6;
  double pressure_ratio = 1.0;
  double temperature_ratio = 1.0;
  double dt = 1.0e-4;
  double sutherland_s1 = 110.4;  // kelvin
  double t_ref = 288.15;         // kelvin, dimensional ambient temperature
  double mu_ref = 1.0 / 1.57e6;
  double cp = 0.0;
  double cv = 0.0;
  double k2 = 0.5;
  double k4 = 1.0 / 64.0;
  bool sgs_enabled = false;

  // Boundary data.
  double jet_radius = 0.5;
  bool jet_inflow = true;          // false: the entrance behaves as far field everywhere
  Vec3 ambient_velocity{0.0, 0.0, 0.0};
  double exit_pressure = 0.0;      // <= 0 selects the ambient pressure

  /// Default case at the given jet condition, with derived cp/cv/mu_ref.
  static FlowConfig jet(double mach, double reynolds, double pressure_ratio = 1.0,
                        double temperature_ratio = 1.0, double gamma = 1.4);

  double gas_constant() const { return cp - cv; }
  double jet_density() const { return 1.0; }
  double jet_velocity() const { return 1.0; }
  double jet_pressure() const { return 1.0 / (gamma * mach_jet * mach_jet); }
  double jet_temperature() const { return jet_pressure() / (jet_density() * gas_constant()); }
  double ambient_pressure() const { return jet_pressure() / pressure_ratio; }
  double ambient_temperature() const { return jet_temperature() / temperature_ratio; }
  double ambient_density() const { return ambient_pressure() / (gas_constant() * ambient_temperature()); }
  double exit_pressure_or_ambient() const { return exit_pressure > 0.0 ? exit_pressure : ambient_pressure(); }

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  /// Canonical text form; hashed into checkpoints and partition files.
  std::string canonical() const;
  std::uint64_t hash() const;
};

struct ConservativeState {
  double rho = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
};

struct PrimitiveState {
  double rho = 0.0;
  Vec3 velocity{0.0, 0.0, 0.0};
  double pressure = 0.0;
  double temperature = 0.0;
};

/// Throws InvalidStateError (tagged with `where`) for nonpositive density or pressure.
PrimitiveState primitive_from_conservative(const ConservativeState& q, const FlowConfig& cfg,
                                           NodeIndex where = {});
ConservativeState conservative_from_primitive(const PrimitiveState& w, const FlowConfig& cfg);

double sound_speed(const PrimitiveState& w, const FlowConfig& cfg);

/// Sutherland law with the reference temperature taken at ambient conditions.
/// `t` is nondimensional; the dimensional value is t_ref * t / T_inf.
double sutherland_viscosity(double t, const FlowConfig& cfg);

struct Conductivity {
  double kappa = 0.0;
  double kappa_sgs = 0.0;
};

Conductivity conductivity(double mu, double mu_sgs, const FlowConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& s);

}  // namespace jetflow
