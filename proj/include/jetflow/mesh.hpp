#pragma once

#include <cstdint>
#include <string>

#include "jetflow/field.hpp"

namespace jetflow {

/// Cylindrical jet grid: an axial x radial plane extruded over the full azimuth.
struct GridSpec {
  int n_axial = 128;
  int n_radial = 128;
  int n_azimuthal = 361;
  double length_axial = 30.0;
  double height_radial = 10.0;
  double stretch_axial = 1.5;   // tanh clustering toward the entrance, 0 = uniform
  double stretch_radial = 7.0;  // sinh clustering toward the lip line, 0 = uniform
  double lip_radius = 0.5;

  GridDims dims() const { return {n_axial, n_radial, n_azimuthal, true, true}; }
  long long total_points() const { return dims().points(); }

  /// Throws ConfigError when a count is below five-point stencil support or a length is not positive.
  void validate() const;
  std::string canonical() const;
  std::uint64_t hash() const;
};

using CoordinateField = BlockField<3>;

/// Axial stations on [0, length], clustered toward x = 0.
std::vector<double> axial_stations(const GridSpec& spec);
/// Radial stations on [0, height] with r = 0 the centerline, clustered toward the lip radius.
std::vector<double> radial_stations(const GridSpec& spec);

/// Whole-domain node coordinates (x axial, y = r cos theta, z = r sin theta).
/// The last azimuthal station is a bitwise copy of the first.
CoordinateField generate(const GridSpec& spec);

/// Uniform Cartesian box with spacing lengths/(n-1), nonperiodic in every direction.
CoordinateField generate_box(int ni, int nj, int nk, double lx, double ly, double lz);

/// Coordinates plus curvilinear metrics of one block.
///
/// `metrics` holds, per node, the three rows grad(xi_m)/J (area-weighted
/// cofactors, row-major m * 3 + d) and `volume` holds det(dx/dxi) = 1/J.
/// Both stay finite on the centerline, where grad(xi)/J and the volume vanish.
struct CurvilinearMesh {
  CoordinateField coords;
  BlockField<9> metrics;
  BlockField<1> volume;

  const BlockLayout& layout() const { return coords.layout(); }
  const double* area(std::size_t node, int direction) const { return metrics.at(node) + 3 * direction; }
  double jacobian(std::size_t node) const { return 1.0 / volume.at(node)[0]; }
  /// d(xi_m)/d(x_d) at a node.
  double metric(std::size_t node, int direction, int d) const {
    return metrics.at(node)[3 * direction + d] / volume.at(node)[0];
  }
  bool is_axis(int j) const { return layout().dims.axis_at_j0 && j == 0; }
};

/// Metrics by the flux scheme's own second-order difference operator, one-sided at
/// the edges of the valid range. Throws MeshQualityError on a nonpositive
/// Jacobian at an owned off-axis node.
CurvilinearMesh compute_metrics(const CoordinateField& coords);

/// Whole-domain mesh restricted to a partition (ghost coordinates copied, not
/// extrapolated), with metrics recomputed on the block.
CurvilinearMesh partition_mesh(const CoordinateField& global_coords, const BlockLayout& layout);

}  // namespace jetflow
