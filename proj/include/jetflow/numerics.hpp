#pragma once

#include <array>
#include <functional>
#include <vector>

#include "jetflow/field.hpp"
#include "jetflow/mesh.hpp"
#include "jetflow/stencil.hpp"

namespace jetflow {

using Flux5 = std::array<double, 5>;
using Tensor3 = std::array<std::array<double, 3>, 3>;

/// Cartesian inviscid flux vectors E_d, d = 0..2.
std::array<Flux5, 3> inviscid_flux(const PrimitiveState& w, const ConservativeState& q);

/// Inviscid flux through the area-weighted metric vector `area` = grad(xi)/J.
Flux5 contravariant_inviscid_flux(const PrimitiveState& w, const ConservativeState& q, const Vec3& area);

/// Cartesian gradients: velocity[i][j] = d u_i / d x_j, temperature[j] = d T / d x_j.
struct FlowGradients {
  Tensor3 velocity{};
  Vec3 temperature{0.0, 0.0, 0.0};
};

Tensor3 rate_of_strain(const Tensor3& velocity_gradient);

struct ViscousFlux {
  std::array<Flux5, 3> F{};  // Cartesian viscous flux vectors, F_d = [0, tau_id, tau_id u_i - q_d]
  Tensor3 tau{};
  Vec3 heat_flux{0.0, 0.0, 0.0};  // Fourier law, q_d = -(kappa + kappa_sgs) dT/dx_d
};

ViscousFlux viscous_flux(const PrimitiveState& w, const FlowGradients& grad, const FlowConfig& cfg,
                         double mu_sgs = 0.0);

/// Deviatoric eddy-viscosity stress -2 mu_sgs (S_ij - S_kk delta_ij / 3); the isotropic part is not modelled.
Tensor3 sgs_stress(const Tensor3& strain, double mu_sgs);

/// Eddy viscosity callback, consulted only when FlowConfig::sgs_enabled is set.
using SgsModel = std::function<double(const PrimitiveState&, const FlowGradients&)>;

/// Per-node, per-direction spectral radius and pressure sensor.
struct DissipationCoefficients {
  BlockField<3> lambda;  // |grad(xi_m)/J . u| + c |grad(xi_m)/J|
  BlockField<3> sensor;  // |p+ - 2p + p-| / |p+ + 2p + p-|, zero at physical boundaries
};

DissipationCoefficients dissipation_coefficients(const ConservativeField& q, const CurvilinearMesh& mesh,
                                                 const FlowConfig& cfg);

/// Blended second/fourth difference dissipation D_m = d_{+1/2} - d_{-1/2} with
/// d = lambda (eps2 dq - eps4 d3q), summed over the three directions, written to
/// the active nodes of `out` (not divided by the cell volume). Linear in q for
/// fixed coefficients.
void apply_dissipation(const ConservativeField& q, const DissipationCoefficients& coeff,
                       const CurvilinearMesh& mesh, const FlowConfig& cfg, RhsField& out);

/// Dissipative rate of change per node (adds to dQ/dt) on the active nodes.
RhsField artificial_dissipation(const ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg);

struct RhsOptions {
  bool inviscid = true;
  bool viscous = true;
  bool dissipation = true;
};

/// Iteration and stage tags for divergence reports.
struct StageContext {
  long iteration = -1;
  int stage = -1;
};

/// Index ranges of nodes whose RHS is assembled: owned and off the physical boundaries.
struct ActiveRange {
  int li_begin, li_end;
  int j_begin, j_end;
  int lk_begin, lk_end;
  bool empty() const { return li_begin >= li_end || j_begin >= j_end || lk_begin >= lk_end; }
};

ActiveRange active_range(const BlockLayout& layout);

/// Assembles RHS = (sum_m delta_m(E_m - F_m) - D) / volume so that dQ/dt = -RHS.
/// Keeps scratch storage between calls; one assembler per worker.
class RhsAssembler {
 public:
  explicit RhsAssembler(const CurvilinearMesh& mesh);

  void set_sgs_model(SgsModel model) { sgs_model_ = std::move(model); }

  /// Throws DivergenceError when a non-finite value appears on an active node.
  void assemble(const ConservativeField& q, const FlowConfig& cfg, RhsField& rhs, const RhsOptions& options = {},
                StageContext context = {});

 private:
  void compute_primitives(const ConservativeField& q, const FlowConfig& cfg, bool need_viscosity);
  void compute_viscous_terms(const FlowConfig& cfg);

  const CurvilinearMesh* mesh_;
  ActiveRange active_;
  int li_lo_, li_hi_, lk_lo_, lk_hi_;
  std::vector<Diff> di_, dj_, dk_;
  std::vector<double> prim_;   // rho u v w p T c mu
  std::vector<double> visc_;   // tau_xx tau_yy tau_zz tau_xy tau_xz tau_yz, (tau u - q)_x,y,z
  std::vector<double> flux_;
  DissipationCoefficients coeff_;
  RhsField dissipation_;
  SgsModel sgs_model_;
};

RhsField assemble_rhs(const ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg,
                      const RhsOptions& options = {});

}  // namespace jetflow
