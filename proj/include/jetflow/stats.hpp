#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jetflow/field.hpp"
#include "jetflow/mesh.hpp"

namespace jetflow {

/// Single-pass mean and second central moment (Welford), mergeable (Chan et al.).
struct Moments {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Moments& other);
  /// Population variance m2 / n.
  double variance() const { return count > 0 ? m2 / static_cast<double>(count) : 0.0; }
  double rms() const;
};

/// Per-node moments of one scalar over a whole grid (ni x nj x nk, no ghosts).
/// Every node shares the same sample count.
class RunningMoments {
 public:
  RunningMoments() = default;
  explicit RunningMoments(const GridDims& dims);

  const GridDims& dims() const { return dims_; }
  long long count() const { return count_; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_.ni + i) * dims_.nj + j;
  }

  /// Adds one snapshot; `values` is indexed like index(i, j, k).
  void add(std::span<const double> values);
  /// Adds velocity component `component` (1..3 = x, y, z) at the owned nodes of
  /// one block. The accumulator then holds only that block's nodes.
  void add_block(const ConservativeField& q, int component);
  void merge(const RunningMoments& other);

  double mean(std::size_t n) const { return mean_[n]; }
  double variance(std::size_t n) const { return count_ > 0 ? m2_[n] / static_cast<double>(count_) : 0.0; }
  double rms(std::size_t n) const;
  std::span<const double> means() const { return mean_; }

  /// Copies the owned nodes of a per-block accumulator into this one.
  void assemble(const RunningMoments& block_part, const BlockLayout& block);

 private:
  GridDims dims_;
  long long count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Axial velocity u = (rho u)/rho of the owned nodes, indexed like RunningMoments.
std::vector<double> axial_velocity(const ConservativeField& q);

/// Mean over the distinct azimuthal stations; the superposed last value, if
/// present, is ignored.
double azimuthal_average(std::span<const double> ring, int distinct_stations);

enum class ProfileQuantity { Mean, Rms };

struct RadialProfile {
  double station = 0.0;   // requested x/D
  int plane = 0;          // nearest axial grid plane
  double plane_x = 0.0;
  std::vector<double> radii;
  std::vector<double> values;  // normalized by the jet velocity
};

/// Index of the grid plane nearest to `station` (ties to the lower index).
/// Throws RangeError when the station lies outside [x.front(), x.back()].
int nearest_plane(std::span<const double> x, double station);

RadialProfile extract_profile(const RunningMoments& moments, std::span<const double> axial_x,
                              std::span<const double> radii, double station, ProfileQuantity quantity,
                              double jet_velocity);

struct CoreSample {
  double x = 0.0;
  double radius = 0.0;   // largest radius of the contiguous region from the axis with U >= threshold
  bool on_axis = false;  // axis value reaches the threshold
};

/// Potential-core boundary from an azimuthally averaged mean field `u_mean`
/// indexed [i * nj + j].
std::vector<CoreSample> potential_core(std::span<const double> u_mean, std::span<const double> axial_x,
                                       std::span<const double> radii, double jet_velocity, double fraction = 0.95);

/// Axial extent of the core measured from the entrance: the last x of the run of
/// stations, starting at i = 0, whose axis value reaches the threshold.
double potential_core_length(const std::vector<CoreSample>& core);

/// Azimuthal mean of a whole-grid node field, indexed [i * nj + j].
std::vector<double> azimuthal_mean_plane(const GridDims& dims, std::span<const double> values);
std::vector<double> azimuthal_rms_plane(const RunningMoments& moments);

}  // namespace jetflow
