#pragma once

#include <span>
#include <vector>

#include "jetflow/field.hpp"
#include "jetflow/mesh.hpp"

namespace jetflow {

enum class BoundaryKind { Entrance, FarField, Exit, PeriodicAzimuthal, Centerline };

std::string to_string(BoundaryKind kind);

/// One-dimensional characteristic state at a boundary face with outward unit
/// normal `n`. Subsonic faces combine R+ = u_n + 2c/(gamma-1) from the
/// interior with R- = u_n - 2c/(gamma-1) from the exterior; entropy and
/// tangential velocity follow the flow direction. A supersonic inflow imposes
/// the exterior state, a supersonic outflow keeps the interior state.
PrimitiveState riemann_state(const PrimitiveState& interior, const PrimitiveState& exterior, const Vec3& n,
                             const FlowConfig& cfg);

/// Quiescent or coflowing ambient state used as far-field exterior data.
PrimitiveState ambient_state(const FlowConfig& cfg);
/// Flat-hat jet state: rho_j, U_j along +x, p_j.
PrimitiveState jet_state(const FlowConfig& cfg);

/// Entrance face at radius r (outward normal -x). Inside the jet radius the
/// exterior data is the jet state; outside it behaves as far field.
PrimitiveState entrance_state(const PrimitiveState& interior, double radius, const FlowConfig& cfg);

PrimitiveState farfield_state(const PrimitiveState& interior, const Vec3& n, const FlowConfig& cfg);

struct ExitState {
  PrimitiveState state;
  bool supersonic_fallback = false;
};

/// Imposed exit pressure with velocity and specific internal energy taken from
/// the interior. Falls back to plain extrapolation when the normal Mach number
/// reaches one.
ExitState exit_state(const PrimitiveState& interior, const Vec3& n, double p_exit, const FlowConfig& cfg);

/// Axis value: arithmetic mean of the ring, summed in the given order.
ConservativeState centerline_state(std::span<const ConservativeState> ring);

/// Counters of one boundary sweep.
struct BoundaryReport {
  long exit_fallbacks = 0;
};

/// Block-level treatments. Each acts only on the physical faces the block owns
/// and leaves ghost layers untouched.
void apply_farfield(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg);
void apply_entrance(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg);
long apply_exit(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg);

/// Conservative values at j = 1 for the owned axial range and the owned
/// distinct azimuthal stations, packed as [k][i][5].
std::vector<double> axis_adjacent_plane(const ConservativeField& q);

/// Sets every owned axis node to the azimuthal mean of `ring_plane`, the
/// concatenation of axis_adjacent_plane over all ring members in azimuthal
/// order (nk - 1 stations).
void apply_centerline(ConservativeField& q, std::span<const double> ring_plane);

/// Copies station 0 onto the superposed last station and fills azimuthal
/// ghosts by their periodic images. Only meaningful when the block spans the
/// whole azimuth; otherwise the halo exchange provides the images.
void apply_periodicity(ConservativeField& q);

/// Far field, entrance, exit, centerline (from the single block's own ring) and
/// periodicity, in that order. For undecomposed azimuth only.
BoundaryReport apply_boundaries(ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg);

}  // namespace jetflow
