#include "jetflow/mesh.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "jetflow/stencil.hpp"

namespace jetflow {

void GridSpec::validate() const {
  if (n_axial < 5 || n_radial < 5 || n_azimuthal < 5) {
    throw ConfigError("grid point counts must be at least 5 for the five-point stencil (got " +
                      std::to_string(n_axial) + " x " + std::to_string(n_radial) + " x " +
                      std::to_string(n_azimuthal) + ")");
  }
  if (!(length_axial > 0.0) || !(height_radial > 0.0)) throw ConfigError("domain length and height must be positive");
  if (!(stretch_axial >= 0.0) || !(stretch_radial >= 0.0)) throw ConfigError("stretching parameters must be >= 0");
  if (!(lip_radius > 0.0 && lip_radius < height_radial)) throw ConfigError("lip radius must lie inside the domain");
}

std::string GridSpec::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "n_axial=" << n_axial << ";n_radial=" << n_radial << ";n_azimuthal=" << n_azimuthal
     << ";length_axial=" << length_axial << ";height_radial=" << height_radial << ";stretch_axial=" << stretch_axial
     << ";stretch_radial=" << stretch_radial << ";lip_radius=" << lip_radius;
  return os.str();
}

std::uint64_t GridSpec::hash() const { return fnv1a(canonical()); }

std::vector<double> axial_stations(const GridSpec& spec) {
  const int n = spec.n_axial;
  const double length = spec.length_axial;
  const double beta = spec.stretch_axial;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    if (beta < 1e-8) {
      x[i] = length * static_cast<double>(i) / static_cast<double>(n - 1);
    } else {
      x[i] = length * (1.0 - std::tanh(beta * (1.0 - s)) / std::tanh(beta));
    }
  }
  x.front() = 0.0;
  x.back() = length;
  return x;
}

std::vector<double> radial_stations(const GridSpec& spec) {
  const int n = spec.n_radial;
  const double height = spec.height_radial;
  const double beta = spec.stretch_radial;
  const double lip = spec.lip_radius;
  std::vector<double> r(n);
  // Interior-point clustering: r(s) = lip * (1 + sinh(beta (s - a)) / sinh(beta a)).
  const double a = beta < 1e-8 ? 0.0
                               : 0.5 / beta *
                                     std::log((1.0 + (std::exp(beta) - 1.0) * lip / height) /
                                              (1.0 + (std::exp(-beta) - 1.0) * lip / height));
  for (int j = 0; j < n; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(n - 1);
    if (beta < 1e-8) {
      r[j] = height * static_cast<double>(j) / static_cast<double>(n - 1);
    } else {
      r[j] = lip * (1.0 + std::sinh(beta * (s - a)) / std::sinh(beta * a));
    }
  }
  r.front() = 0.0;
  r.back() = height;
  return r;
}

CoordinateField generate(const GridSpec& spec) {
  spec.validate();
  const GridDims dims = spec.dims();
  const BlockLayout layout = BlockLayout::whole(dims);
  CoordinateField coords(layout);
  const std::vector<double> x = axial_stations(spec);
  const std::vector<double> r = radial_stations(spec);
  const int distinct = dims.distinct_k();
  for (int k = 0; k < distinct; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(distinct);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < dims.ni; ++i) {
      for (int j = 0; j < dims.nj; ++j) {
        double* p = coords.at(layout.local_i(i), j, layout.local_k(k));
        p[0] = x[i];
        p[1] = r[j] * c;
        p[2] = r[j] * s;
      }
    }
  }
  gather_from_global(coords, coords);  // superposed last station and ghost images
  return coords;
}

CoordinateField generate_box(int ni, int nj, int nk, double lx, double ly, double lz) {
  const GridDims dims{ni, nj, nk, false, false};
  const BlockLayout layout = BlockLayout::whole(dims);
  CoordinateField coords(layout);
  for (int k = 0; k < nk; ++k) {
    for (int i = 0; i < ni; ++i) {
      for (int j = 0; j < nj; ++j) {
        double* p = coords.at(layout.local_i(i), j, layout.local_k(k));
        p[0] = lx * static_cast<double>(i) / static_cast<double>(ni - 1);
        p[1] = ly * static_cast<double>(j) / static_cast<double>(nj - 1);
        p[2] = lz * static_cast<double>(k) / static_cast<double>(nk - 1);
      }
    }
  }
  return coords;
}

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

CurvilinearMesh compute_metrics(const CoordinateField& coords) {
  const BlockLayout& b = coords.layout();
  CurvilinearMesh mesh{coords, BlockField<9>(b), BlockField<1>(b)};
  const std::vector<Diff> di = stencil_i(b);
  const std::vector<Diff> dj = stencil_j(b);
  const std::vector<Diff> dk = stencil_k(b);
  const auto si = static_cast<std::ptrdiff_t>(b.stride_i() * 3);
  const auto sj = static_cast<std::ptrdiff_t>(3);
  const auto sk = static_cast<std::ptrdiff_t>(b.stride_k() * 3);

  double worst = 0.0;
  NodeIndex worst_node{};
  bool bad = false;
  for (int lk = 0; lk < b.nk(); ++lk) {
    if (!b.valid_k(lk)) continue;
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      for (int j = 0; j < b.nj(); ++j) {
        const std::size_t n = b.index(li, j, lk);
        const double* p = coords.at(n);
        Vec3 xi, eta, zeta;
        for (int d = 0; d < 3; ++d) {
          xi[d] = apply_diff(di[li], p + d, si);
          eta[d] = apply_diff(dj[j], p + d, sj);
          zeta[d] = apply_diff(dk[lk], p + d, sk);
        }
        const Vec3 s_xi = cross(eta, zeta);
        const Vec3 s_eta = cross(zeta, xi);
        const Vec3 s_zeta = cross(xi, eta);
        double* m = mesh.metrics.at(n);
        for (int d = 0; d < 3; ++d) {
          m[d] = s_xi[d];
          m[3 + d] = s_eta[d];
          m[6 + d] = s_zeta[d];
        }
        const double vol = dot(xi, s_xi);
        mesh.volume.at(n)[0] = vol;
        const bool checked = b.owns_i(li) && b.owns_k(lk) && !mesh.is_axis(j);
        if (checked && !(vol > 0.0) && (!bad || vol < worst)) {
          bad = true;
          worst = vol;
          worst_node = b.node(li, j, lk);
        }
      }
    }
  }
  if (bad) throw MeshQualityError("nonpositive Jacobian " + std::to_string(worst), worst_node);
  return mesh;
}

CurvilinearMesh partition_mesh(const CoordinateField& global_coords, const BlockLayout& layout) {
  CoordinateField local(layout);
  gather_from_global(global_coords, local);
  return compute_metrics(local);
}

}  // namespace jetflow
