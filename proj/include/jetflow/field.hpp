#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "jetflow/core.hpp"

namespace jetflow {

/// Global point counts of a structured grid.
///
/// i is axial, j radial, k azimuthal. With `periodic_k` the first and last
/// azimuthal stations are superposed, so nk - 1 stations are distinct.
/// With `axis_at_j0` the j = 0 line is the degenerate centerline.
struct GridDims {
  int ni = 0;
  int nj = 0;
  int nk = 0;
  bool periodic_k = true;
  bool axis_at_j0 = true;

  long long points() const { return static_cast<long long>(ni) * nj * nk; }
  int distinct_k() const { return periodic_k ? nk - 1 : nk; }
  /// Canonical station of an unwrapped azimuthal index.
  int wrap_k(int k) const {
    if (!periodic_k) return k;
    const int n = nk - 1;
    return ((k % n) + n) % n;
  }
  bool operator==(const GridDims&) const = default;
};

/// Index space of one partition: the owned global ranges [i_begin, i_end) and
/// [k_begin, k_end), all radial points, and two ghost layers on both sides in i and k.
/// Local node (li, j, lk) is stored at ((lk * ni_local) + li) * nj + j.
struct BlockLayout {
  static constexpr int ghost = 2;

  GridDims dims;
  int i_begin = 0;
  int i_end = 0;
  int k_begin = 0;
  int k_end = 0;

  static BlockLayout whole(const GridDims& dims) { return {dims, 0, dims.ni, 0, dims.nk}; }

  int ni() const { return i_end - i_begin + 2 * ghost; }
  int nj() const { return dims.nj; }
  int nk() const { return k_end - k_begin + 2 * ghost; }
  std::size_t size() const { return static_cast<std::size_t>(ni()) * nj() * nk(); }
  std::size_t stride_i() const { return static_cast<std::size_t>(nj()); }
  std::size_t stride_k() const { return static_cast<std::size_t>(ni()) * nj(); }

  std::size_t index(int li, int j, int lk) const {
    return (static_cast<std::size_t>(lk) * ni() + li) * nj() + j;
  }
  int global_i(int li) const { return i_begin - ghost + li; }
  int global_k(int lk) const { return k_begin - ghost + lk; }
  int local_i(int gi) const { return gi - i_begin + ghost; }
  int local_k(int gk) const { return gk - k_begin + ghost; }

  bool owns_i(int li) const { return li >= ghost && li < ni() - ghost; }
  bool owns_k(int lk) const { return lk >= ghost && lk < nk() - ghost; }

  /// Local index lies inside storage and its global image lies inside the physical domain.
  bool valid_i(int li) const {
    if (li < 0 || li >= ni()) return false;
    const int g = global_i(li);
    return g >= 0 && g < dims.ni;
  }
  bool valid_k(int lk) const {
    if (lk < 0 || lk >= nk()) return false;
    if (dims.periodic_k) return true;
    const int g = global_k(lk);
    return g >= 0 && g < dims.nk;
  }

  NodeIndex node(int li, int j, int lk) const { return {global_i(li), j, dims.wrap_k(global_k(lk))}; }

  bool operator==(const BlockLayout&) const = default;
};

/// Node-interleaved storage of C doubles per node over a BlockLayout.
template <int C>
class BlockField {
 public:
  static constexpr int components = C;

  BlockField() = default;
  explicit BlockField(const BlockLayout& layout, double fill = 0.0)
      : layout_(layout), data_(layout.size() * C, fill) {}

  const BlockLayout& layout() const { return layout_; }
  std::size_t nodes() const { return layout_.size(); }

  double* at(std::size_t node) { return data_.data() + node * C; }
  const double* at(std::size_t node) const { return data_.data() + node * C; }
  double* at(int li, int j, int lk) { return at(layout_.index(li, j, lk)); }
  const double* at(int li, int j, int lk) const { return at(layout_.index(li, j, lk)); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const BlockField&) const = default;

 private:
  BlockLayout layout_;
  std::vector<double> data_;
};

/// Q = [rho, rho u, rho v, rho w, e] per node.
using ConservativeField = BlockField<5>;
using RhsField = BlockField<5>;

inline ConservativeState load_state(const double* q) { return {q[0], {q[1], q[2], q[3]}, q[4]}; }
inline void store_state(double* q, const ConservativeState& s) {
  q[0] = s.rho;
  q[1] = s.momentum[0];
  q[2] = s.momentum[1];
  q[3] = s.momentum[2];
  q[4] = s.energy;
}

/// Copies the overlapping owned nodes of `src` into `dst` (same global dims).
template <int C>
void copy_owned(const BlockField<C>& src, BlockField<C>& dst) {
  const BlockLayout& a = src.layout();
  const BlockLayout& b = dst.layout();
  for (int gk = std::max(a.k_begin, b.k_begin); gk < std::min(a.k_end, b.k_end); ++gk) {
    for (int gi = std::max(a.i_begin, b.i_begin); gi < std::min(a.i_end, b.i_end); ++gi) {
      for (int j = 0; j < a.nj(); ++j) {
        const double* s = src.at(a.local_i(gi), j, a.local_k(gk));
        double* d = dst.at(b.local_i(gi), j, b.local_k(gk));
        for (int c = 0; c < C; ++c) d[c] = s[c];
      }
    }
  }
}

/// Fills every valid node of `dst` (owned and ghost) from the whole-domain field
/// `global`, wrapping azimuthal ghosts onto their periodic images.
template <int C>
void gather_from_global(const BlockField<C>& global, BlockField<C>& dst) {
  const BlockLayout& g = global.layout();
  const BlockLayout& b = dst.layout();
  for (int lk = 0; lk < b.nk(); ++lk) {
    if (!b.valid_k(lk)) continue;
    const int gk = g.local_k(b.dims.wrap_k(b.global_k(lk)));
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      const int gi = g.local_i(b.global_i(li));
      for (int j = 0; j < b.nj(); ++j) {
        const double* s = global.at(gi, j, gk);
        double* d = dst.at(li, j, lk);
        for (int c = 0; c < C; ++c) d[c] = s[c];
      }
    }
  }
}

/// Maximum absolute difference over owned nodes common to both fields.
template <int C>
double max_abs_difference(const BlockField<C>& x, const BlockField<C>& y) {
  const BlockLayout& a = x.layout();
  const BlockLayout& b = y.layout();
  double worst = 0.0;
  for (int gk = std::max(a.k_begin, b.k_begin); gk < std::min(a.k_end, b.k_end); ++gk) {
    for (int gi = std::max(a.i_begin, b.i_begin); gi < std::min(a.i_end, b.i_end); ++gi) {
      for (int j = 0; j < a.nj(); ++j) {
        const double* s = x.at(a.local_i(gi), j, a.local_k(gk));
        const double* d = y.at(b.local_i(gi), j, b.local_k(gk));
        for (int c = 0; c < C; ++c) {
          const double diff = s[c] > d[c] ? s[c] - d[c] : d[c] - s[c];
          if (!(diff <= worst)) worst = diff;  // NaN propagates as the worst value
        }
      }
    }
  }
  return worst;
}

}  // namespace jetflow
