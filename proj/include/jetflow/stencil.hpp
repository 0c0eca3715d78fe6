#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jetflow/field.hpp"

namespace jetflow {

/// Second-order first-derivative stencil selected per node and direction.
enum class Diff : std::uint8_t { None, Central, Forward, Backward };

/// Central where both neighbours are valid, one-sided second order at the edge
/// of the valid range, None where fewer than three valid points are available.
template <class Valid>
std::vector<Diff> stencil_kinds(int n, Valid valid) {
  std::vector<Diff> kinds(static_cast<std::size_t>(n), Diff::None);
  for (int p = 0; p < n; ++p) {
    if (!valid(p)) continue;
    if (valid(p - 1) && valid(p + 1)) {
      kinds[p] = Diff::Central;
    } else if (valid(p + 1) && valid(p + 2)) {
      kinds[p] = Diff::Forward;
    } else if (valid(p - 1) && valid(p - 2)) {
      kinds[p] = Diff::Backward;
    }
  }
  return kinds;
}

inline std::vector<Diff> stencil_i(const BlockLayout& b) {
  return stencil_kinds(b.ni(), [&](int p) { return b.valid_i(p); });
}
inline std::vector<Diff> stencil_j(const BlockLayout& b) {
  return stencil_kinds(b.nj(), [&](int p) { return p >= 0 && p < b.nj(); });
}
inline std::vector<Diff> stencil_k(const BlockLayout& b) {
  return stencil_kinds(b.nk(), [&](int p) { return b.valid_k(p); });
}

/// Derivative in index space of the value at `p` with neighbours `stride` apart.
inline double apply_diff(Diff kind, const double* p, std::ptrdiff_t stride) {
  switch (kind) {
    case Diff::Central:
      return 0.5 * (p[stride] - p[-stride]);
    case Diff::Forward:
      return 0.5 * (-3.0 * p[0] + 4.0 * p[stride] - p[2 * stride]);
    case Diff::Backward:
      return 0.5 * (3.0 * p[0] - 4.0 * p[-stride] + p[-2 * stride]);
    case Diff::None:
      break;
  }
  return 0.0;
}

}  // namespace jetflow
