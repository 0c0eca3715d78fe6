#include "jetflow/stats.hpp"

#include <cmath>

namespace jetflow {

void Moments::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void Moments::merge(const Moments& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(count + o.count);
  const double delta = o.mean - mean;
  mean += delta * static_cast<double>(o.count) / n;
  m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
  count += o.count;
}

double Moments::rms() const { return std::sqrt(std::max(0.0, variance())); }

RunningMoments::RunningMoments(const GridDims& dims)
    : dims_(dims), mean_(static_cast<std::size_t>(dims.points()), 0.0), m2_(mean_.size(), 0.0) {}

void RunningMoments::add(std::span<const double> values) {
  if (values.size() != mean_.size()) throw RangeError("snapshot size does not match the accumulator");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t n = 0; n < mean_.size(); ++n) {
    const double delta = values[n] - mean_[n];
    mean_[n] += delta * inv;
    m2_[n] += delta * (values[n] - mean_[n]);
  }
}

void RunningMoments::add_block(const ConservativeField& q, int component) {
  const BlockLayout& b = q.layout();
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (int gk = b.k_begin; gk < b.k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi)
      for (int j = 0; j < b.nj(); ++j) {
        const double* s = q.at(b.local_i(gi), j, b.local_k(gk));
        const double x = s[component] / s[0];
        const std::size_t n = index(gi, j, gk);
        const double delta = x - mean_[n];
        mean_[n] += delta * inv;
        m2_[n] += delta * (x - mean_[n]);
      }
}

void RunningMoments::merge(const RunningMoments& o) {
  if (!(o.dims_ == dims_)) throw RangeError("cannot merge accumulators of different grids");
  if (o.count_ == 0) return;
  if (count_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count_), nb = static_cast<double>(o.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = o.mean_[i] - mean_[i];
    mean_[i] += delta * nb / n;
    m2_[i] += o.m2_[i] + delta * delta * na * nb / n;
  }
  count_ += o.count_;
}

double RunningMoments::rms(std::size_t n) const { return std::sqrt(std::max(0.0, variance(n))); }

void RunningMoments::assemble(const RunningMoments& part, const BlockLayout& b) {
  if (!(part.dims_ == dims_)) throw RangeError("cannot assemble accumulators of different grids");
  if (count_ != 0 && count_ != part.count_) {
    throw RangeError("block accumulators hold different sample counts (" + std::to_string(count_) + " vs " +
                     std::to_string(part.count_) + ")");
  }
  count_ = part.count_;
  for (int gk = b.k_begin; gk < b.k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi)
      for (int j = 0; j < b.nj(); ++j) {
        const std::size_t n = index(gi, j, gk);
        mean_[n] = part.mean_[n];
        m2_[n] = part.m2_[n];
      }
}

std::vector<double> axial_velocity(const ConservativeField& q) {
  const BlockLayout& b = q.layout();
  std::vector<double> u(static_cast<std::size_t>(b.dims.points()), 0.0);
  for (int gk = b.k_begin; gk < b.k_end; ++gk)
    for (int gi = b.i_begin; gi < b.i_end; ++gi)
      for (int j = 0; j < b.nj(); ++j) {
        const double* s = q.at(b.local_i(gi), j, b.local_k(gk));
        u[(static_cast<std::size_t>(gk) * b.dims.ni + gi) * b.dims.nj + j] = s[1] / s[0];
      }
  return u;
}

double azimuthal_average(std::span<const double> ring, int distinct_stations) {
  if (distinct_stations < 1 || ring.size() < static_cast<std::size_t>(distinct_stations)) {
    throw RangeError("ring holds " + std::to_string(ring.size()) + " values, need " + std::to_string(distinct_stations));
  }
  double sum = 0.0;
  for (int k = 0; k < distinct_stations; ++k) sum += ring[static_cast<std::size_t>(k)];
  return sum / static_cast<double>(distinct_stations);
}

int nearest_plane(std::span<const double> x, double station) {
  if (x.empty() || !(station >= x.front() && station <= x.back())) {
    throw RangeError("station x/D = " + std::to_string(station) + " lies outside the domain [" +
                     std::to_string(x.empty() ? 0.0 : x.front()) + ", " + std::to_string(x.empty() ? 0.0 : x.back()) +
                     "]");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(x.size()); ++i) {
    if (std::abs(x[static_cast<std::size_t>(i)] - station) < std::abs(x[static_cast<std::size_t>(best)] - station)) best = i;
  }
  return best;
}

std::vector<double> azimuthal_mean_plane(const GridDims& dims, std::span<const double> values) {
  const int stations = dims.distinct_k();
  std::vector<double> plane(static_cast<std::size_t>(dims.ni) * dims.nj, 0.0);
  std::vector<double> ring(static_cast<std::size_t>(stations));
  for (int i = 0; i < dims.ni; ++i)
    for (int j = 0; j < dims.nj; ++j) {
      for (int k = 0; k < stations; ++k)
        ring[static_cast<std::size_t>(k)] = values[(static_cast<std::size_t>(k) * dims.ni + i) * dims.nj + j];
      plane[static_cast<std::size_t>(i) * dims.nj + j] = azimuthal_average(ring, stations);
    }
  return plane;
}

std::vector<double> azimuthal_rms_plane(const RunningMoments& m) {
  std::vector<double> rms(static_cast<std::size_t>(m.dims().points()));
  for (std::size_t n = 0; n < rms.size(); ++n) rms[n] = m.rms(n);
  return azimuthal_mean_plane(m.dims(), rms);
}

RadialProfile extract_profile(const RunningMoments& moments, std::span<const double> axial_x,
                              std::span<const double> radii, double station, ProfileQuantity quantity,
                              double jet_velocity) {
  const GridDims& d = moments.dims();
  if (axial_x.size() != static_cast<std::size_t>(d.ni) || radii.size() != static_cast<std::size_t>(d.nj)) {
    throw RangeError("station coordinates do not match the accumulator grid");
  }
  RadialProfile p;
  p.station = station;
  p.plane = nearest_plane(axial_x, station);
  p.plane_x = axial_x[static_cast<std::size_t>(p.plane)];
  const std::vector<double> plane = quantity == ProfileQuantity::Mean
                                        ? azimuthal_mean_plane(d, moments.means())
                                        : azimuthal_rms_plane(moments);
  p.radii.assign(radii.begin(), radii.end());
  for (int j = 0; j < d.nj; ++j)
    p.values.push_back(plane[static_cast<std::size_t>(p.plane) * d.nj + j] / jet_velocity);
  return p;
}

std::vector<CoreSample> potential_core(std::span<const double> u_mean, std::span<const double> axial_x,
                                       std::span<const double> radii, double jet_velocity, double fraction) {
  const std::size_t ni = axial_x.size(), nj = radii.size();
  if (u_mean.size() != ni * nj) throw RangeError("mean field size does not match the station coordinates");
  const double threshold = fraction * jet_velocity;
  std::vector<CoreSample> core;
  for (std::size_t i = 0; i < ni; ++i) {
    CoreSample s;
    s.x = axial_x[i];
    const double* row = u_mean.data() + i * nj;
    s.on_axis = row[0] >= threshold;
    if (s.on_axis) {
      std::size_t j = 0;
      while (j + 1 < nj && row[j + 1] >= threshold) ++j;
      s.radius = radii[j];
    }
    core.push_back(s);
  }
  return core;
}

double potential_core_length(const std::vector<CoreSample>& core) {
  double length = 0.0;
  for (const CoreSample& s : core) {
    if (!s.on_axis) break;
    length = s.x;
  }
  return length;
}

}  // namespace jetflow
