#include "jetflow/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace jetflow {

std::array<Flux5, 3> inviscid_flux(const PrimitiveState& w, const ConservativeState& q) {
  std::array<Flux5, 3> e{};
  for (int d = 0; d < 3; ++d) {
    const double ud = w.velocity[d];
    e[d][0] = q.rho * ud;
    for (int i = 0; i < 3; ++i) e[d][1 + i] = q.momentum[i] * ud + (i == d ? w.pressure : 0.0);
    e[d][4] = (q.energy + w.pressure) * ud;
  }
  return e;
}

Flux5 contravariant_inviscid_flux(const PrimitiveState& w, const ConservativeState& q, const Vec3& area) {
  const double contravariant = dot(area, w.velocity);
  Flux5 f;
  f[0] = q.rho * contravariant;
  for (int i = 0; i < 3; ++i) f[1 + i] = q.momentum[i] * contravariant + area[i] * w.pressure;
  f[4] = (q.energy + w.pressure) * contravariant;
  return f;
}

Tensor3 rate_of_strain(const Tensor3& g) {
  Tensor3 s{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = 0.5 * (g[i][j] + g[j][i]);
  return s;
}

ViscousFlux viscous_flux(const PrimitiveState& w, const FlowGradients& grad, const FlowConfig& cfg, double mu_sgs) {
  ViscousFlux out;
  const double mu = sutherland_viscosity(w.temperature, cfg);
  const Tensor3 s = rate_of_strain(grad.velocity);
  const double trace = s[0][0] + s[1][1] + s[2][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.tau[i][j] = 2.0 * (mu + mu_sgs) * (s[i][j] - (i == j ? trace / 3.0 : 0.0));
  const Conductivity k = conductivity(mu, mu_sgs, cfg);
  for (int d = 0; d < 3; ++d) out.heat_flux[d] = -(k.kappa + k.kappa_sgs) * grad.temperature[d];
  for (int d = 0; d < 3; ++d) {
    out.F[d][0] = 0.0;
    double work = 0.0;
    for (int i = 0; i < 3; ++i) {
      out.F[d][1 + i] = out.tau[i][d];
      work += out.tau[i][d] * w.velocity[i];
    }
    out.F[d][4] = work - out.heat_flux[d];
  }
  return out;
}

Tensor3 sgs_stress(const Tensor3& strain, double mu_sgs) {
  const double trace = strain[0][0] + strain[1][1] + strain[2][2];
  Tensor3 sigma{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sigma[i][j] = -2.0 * mu_sgs * (strain[i][j] - (i == j ? trace / 3.0 : 0.0));
  return sigma;
}

ActiveRange active_range(const BlockLayout& b) {
  ActiveRange a;
  a.li_begin = b.local_i(std::max(b.i_begin, 1));
  a.li_end = b.local_i(std::min(b.i_end, b.dims.ni - 1));
  a.j_begin = 1;
  a.j_end = b.nj() - 1;
  if (b.dims.periodic_k) {
    a.lk_begin = b.local_k(b.k_begin);
    a.lk_end = b.local_k(b.k_end);
  } else {
    a.lk_begin = b.local_k(std::max(b.k_begin, 1));
    a.lk_end = b.local_k(std::min(b.k_end, b.dims.nk - 1));
  }
  return a;
}

namespace {

constexpr int kPrim = 8;  // rho u v w p T c mu
constexpr int kVisc = 9;

struct ValidRange {
  int li_lo, li_hi, lk_lo, lk_hi;
};

ValidRange valid_range(const BlockLayout& b) {
  ValidRange r{0, b.ni(), 0, b.nk()};
  while (r.li_lo < b.ni() && !b.valid_i(r.li_lo)) ++r.li_lo;
  while (r.li_hi > r.li_lo && !b.valid_i(r.li_hi - 1)) --r.li_hi;
  while (r.lk_lo < b.nk() && !b.valid_k(r.lk_lo)) ++r.lk_lo;
  while (r.lk_hi > r.lk_lo && !b.valid_k(r.lk_hi - 1)) --r.lk_hi;
  return r;
}

void fill_primitives(const ConservativeField& q, const FlowConfig& cfg, const ValidRange& v, bool need_mu,
                     std::vector<double>& prim) {
  const BlockLayout& b = q.layout();
  prim.resize(b.size() * kPrim);
  const double gm1 = cfg.gamma - 1.0;
  const double inv_r = 1.0 / cfg.gas_constant();
  for (int lk = v.lk_lo; lk < v.lk_hi; ++lk) {
    for (int li = v.li_lo; li < v.li_hi; ++li) {
      std::size_t n = b.index(li, 0, lk);
      for (int j = 0; j < b.nj(); ++j, ++n) {
        const double* s = q.at(n);
        double* w = prim.data() + n * kPrim;
        const double rho = s[0];
        const double inv_rho = 1.0 / rho;
        const double u = s[1] * inv_rho, vv = s[2] * inv_rho, ww = s[3] * inv_rho;
        const double p = gm1 * (s[4] - 0.5 * rho * (u * u + vv * vv + ww * ww));
        w[0] = rho;
        w[1] = u;
        w[2] = vv;
        w[3] = ww;
        w[4] = p;
        w[5] = p * inv_rho * inv_r;
        w[6] = std::sqrt(cfg.gamma * p * inv_rho);
        w[7] = need_mu ? sutherland_viscosity(w[5], cfg) : 0.0;
      }
    }
  }
}

void fill_coefficients(const std::vector<double>& prim, const CurvilinearMesh& mesh, const ValidRange& v,
                       DissipationCoefficients& coeff) {
  const BlockLayout& b = mesh.layout();
  if (!(coeff.lambda.layout() == b)) {
    coeff.lambda = BlockField<3>(b);
    coeff.sensor = BlockField<3>(b);
  }
  const std::ptrdiff_t strides[3] = {static_cast<std::ptrdiff_t>(b.stride_i()), 1,
                                     static_cast<std::ptrdiff_t>(b.stride_k())};
  for (int lk = v.lk_lo; lk < v.lk_hi; ++lk) {
    const bool k_ok = b.valid_k(lk - 1) && b.valid_k(lk + 1);
    for (int li = v.li_lo; li < v.li_hi; ++li) {
      const bool i_ok = b.valid_i(li - 1) && b.valid_i(li + 1);
      std::size_t n = b.index(li, 0, lk);
      for (int j = 0; j < b.nj(); ++j, ++n) {
        const double* w = prim.data() + n * kPrim;
        const double* m = mesh.metrics.at(n);
        double* lam = coeff.lambda.at(n);
        double* nu = coeff.sensor.at(n);
        const bool ok[3] = {i_ok, j > 0 && j + 1 < b.nj(), k_ok};
        for (int dir = 0; dir < 3; ++dir) {
          const double* a = m + 3 * dir;
          const double un = a[0] * w[1] + a[1] * w[2] + a[2] * w[3];
          lam[dir] = std::abs(un) + w[6] * std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
          if (ok[dir]) {
            const double pm = prim[(n - strides[dir]) * kPrim + 4];
            const double pp = prim[(n + strides[dir]) * kPrim + 4];
            const double p0 = w[4];
            nu[dir] = std::abs(pp - 2.0 * p0 + pm) / std::abs(pp + 2.0 * p0 + pm);
          } else {
            nu[dir] = 0.0;
          }
        }
      }
    }
  }
}

// Accumulates d_{p+1/2} - d_{p-1/2} along one grid line into `out` for positions in [a_begin, a_end).
template <class Valid>
void dissipate_line(const double* q, const DissipationCoefficients& coeff, int dir, std::size_t base,
                    std::ptrdiff_t stride, int a_begin, int a_end, Valid valid, bool axis_line, double k2,
                    double k4, double* out) {
  for (int p = a_begin - 1; p < a_end; ++p) {
    const std::size_t n0 = base + static_cast<std::ptrdiff_t>(p) * stride;
    const std::size_t n1 = n0 + stride;
    const double lam = 0.5 * (coeff.lambda.at(n0)[dir] + coeff.lambda.at(n1)[dir]);
    const double eps2 = k2 * std::max(coeff.sensor.at(n0)[dir], coeff.sensor.at(n1)[dir]);
    const double eps4 = std::max(0.0, k4 - eps2);
    const double* q0 = q + n0 * 5;
    const double* q1 = q + n1 * 5;
    double d[5];
    if (axis_line && p <= 1) {
      // Second-difference form next to the centerline.
      for (int c = 0; c < 5; ++c) d[c] = lam * (eps2 + eps4) * (q1[c] - q0[c]);
    } else if (!valid(p - 1)) {
      const double* q2 = q1 + stride * 5;
      for (int c = 0; c < 5; ++c)
        d[c] = lam * (eps2 * (q1[c] - q0[c]) - eps4 * (q2[c] - 2.0 * q1[c] + q0[c]));
    } else if (!valid(p + 2)) {
      const double* qm = q0 - stride * 5;
      for (int c = 0; c < 5; ++c)
        d[c] = lam * (eps2 * (q1[c] - q0[c]) + eps4 * (q1[c] - 2.0 * q0[c] + qm[c]));
    } else {
      const double* q2 = q1 + stride * 5;
      const double* qm = q0 - stride * 5;
      for (int c = 0; c < 5; ++c)
        d[c] = lam * (eps2 * (q1[c] - q0[c]) - eps4 * (q2[c] - 3.0 * q1[c] + 3.0 * q0[c] - qm[c]));
    }
    if (p >= a_begin) {
      double* o = out + n0 * 5;
      for (int c = 0; c < 5; ++c) o[c] += d[c];
    }
    if (p + 1 < a_end) {
      double* o = out + n1 * 5;
      for (int c = 0; c < 5; ++c) o[c] -= d[c];
    }
  }
}

void zero_active(RhsField& f, const ActiveRange& a) {
  const BlockLayout& b = f.layout();
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int li = a.li_begin; li < a.li_end; ++li) {
      double* p = f.at(li, a.j_begin, lk);
      std::fill(p, p + 5 * static_cast<std::size_t>(a.j_end - a.j_begin), 0.0);
    }
  (void)b;
}

}  // namespace

DissipationCoefficients dissipation_coefficients(const ConservativeField& q, const CurvilinearMesh& mesh,
                                                 const FlowConfig& cfg) {
  const ValidRange v = valid_range(q.layout());
  std::vector<double> prim;
  fill_primitives(q, cfg, v, false, prim);
  DissipationCoefficients coeff;
  fill_coefficients(prim, mesh, v, coeff);
  return coeff;
}

void apply_dissipation(const ConservativeField& q, const DissipationCoefficients& coeff, const CurvilinearMesh& mesh,
                       const FlowConfig& cfg, RhsField& out) {
  const BlockLayout& b = q.layout();
  if (!(out.layout() == b)) out = RhsField(b);
  const ActiveRange a = active_range(b);
  zero_active(out, a);
  if (a.empty()) return;
  const double* qd = q.values().data();
  double* od = out.values().data();
  const auto si = static_cast<std::ptrdiff_t>(b.stride_i());
  const auto sk = static_cast<std::ptrdiff_t>(b.stride_k());
  const bool axis = b.dims.axis_at_j0;
  (void)mesh;
  // axial
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int j = a.j_begin; j < a.j_end; ++j)
      dissipate_line(qd, coeff, 0, b.index(0, j, lk), si, a.li_begin, a.li_end,
                     [&](int p) { return b.valid_i(p); }, false, cfg.k2, cfg.k4, od);
  // radial
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int li = a.li_begin; li < a.li_end; ++li)
      dissipate_line(qd, coeff, 1, b.index(li, 0, lk), 1, a.j_begin, a.j_end,
                     [&](int p) { return p >= 0 && p < b.nj(); }, axis, cfg.k2, cfg.k4, od);
  // azimuthal
  for (int li = a.li_begin; li < a.li_end; ++li)
    for (int j = a.j_begin; j < a.j_end; ++j)
      dissipate_line(qd, coeff, 2, b.index(li, j, 0), sk, a.lk_begin, a.lk_end,
                     [&](int p) { return b.valid_k(p); }, false, cfg.k2, cfg.k4, od);
}

RhsField artificial_dissipation(const ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg) {
  const DissipationCoefficients coeff = dissipation_coefficients(q, mesh, cfg);
  RhsField out(q.layout());
  apply_dissipation(q, coeff, mesh, cfg, out);
  const ActiveRange a = active_range(q.layout());
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int li = a.li_begin; li < a.li_end; ++li)
      for (int j = a.j_begin; j < a.j_end; ++j) {
        const std::size_t n = q.layout().index(li, j, lk);
        const double inv_vol = 1.0 / mesh.volume.at(n)[0];
        for (int c = 0; c < 5; ++c) out.at(n)[c] *= inv_vol;
      }
  return out;
}

RhsAssembler::RhsAssembler(const CurvilinearMesh& mesh)
    : mesh_(&mesh),
      active_(active_range(mesh.layout())),
      di_(stencil_i(mesh.layout())),
      dj_(stencil_j(mesh.layout())),
      dk_(stencil_k(mesh.layout())) {
  const ValidRange v = valid_range(mesh.layout());
  li_lo_ = v.li_lo;
  li_hi_ = v.li_hi;
  lk_lo_ = v.lk_lo;
  lk_hi_ = v.lk_hi;
  const std::size_t n = mesh.layout().size();
  prim_.assign(n * kPrim, 0.0);
  visc_.assign(n * kVisc, 0.0);
  flux_.assign(n * 5, 0.0);
}

void RhsAssembler::compute_primitives(const ConservativeField& q, const FlowConfig& cfg, bool need_viscosity) {
  fill_primitives(q, cfg, {li_lo_, li_hi_, lk_lo_, lk_hi_}, need_viscosity, prim_);
}

void RhsAssembler::compute_viscous_terms(const FlowConfig& cfg) {
  const CurvilinearMesh& mesh = *mesh_;
  const BlockLayout& b = mesh.layout();
  const auto si = static_cast<std::ptrdiff_t>(b.stride_i() * kPrim);
  const auto sj = static_cast<std::ptrdiff_t>(kPrim);
  const auto sk = static_cast<std::ptrdiff_t>(b.stride_k() * kPrim);
  const bool use_sgs = cfg.sgs_enabled && static_cast<bool>(sgs_model_);
  for (int lk = lk_lo_; lk < lk_hi_; ++lk) {
    for (int li = li_lo_; li < li_hi_; ++li) {
      std::size_t n = b.index(li, 0, lk);
      for (int j = 0; j < b.nj(); ++j, ++n) {
        double* out = visc_.data() + n * kVisc;
        const double vol = mesh.volume.at(n)[0];
        if (mesh.is_axis(j) || !(vol > 0.0)) {
          std::fill(out, out + kVisc, 0.0);
          continue;
        }
        const double* w = prim_.data() + n * kPrim;
        const double* m = mesh.metrics.at(n);
        // index-space derivatives of u, v, w (slots 1-3) and T (slot 5)
        double dxi[4], deta[4], dzeta[4];
        for (int f = 0; f < 4; ++f) {
          const double* src = w + (f < 3 ? 1 + f : 5);
          dxi[f] = apply_diff(di_[li], src, si);
          deta[f] = apply_diff(dj_[j], src, sj);
          dzeta[f] = apply_diff(dk_[lk], src, sk);
        }
        const double inv_vol = 1.0 / vol;
        FlowGradients g;
        for (int d = 0; d < 3; ++d) {
          for (int f = 0; f < 3; ++f) g.velocity[f][d] = inv_vol * (m[d] * dxi[f] + m[3 + d] * deta[f] + m[6 + d] * dzeta[f]);
          g.temperature[d] = inv_vol * (m[d] * dxi[3] + m[3 + d] * deta[3] + m[6 + d] * dzeta[3]);
        }
        double mu_sgs = 0.0;
        const double mu = w[7];
        if (use_sgs) {
          PrimitiveState ws{w[0], {w[1], w[2], w[3]}, w[4], w[5]};
          mu_sgs = sgs_model_(ws, g);
        }
        const double mu_t = mu + mu_sgs;
        const double kappa = mu * cfg.cp / cfg.prandtl + mu_sgs * cfg.cp / cfg.prandtl_sgs;
        const double div = g.velocity[0][0] + g.velocity[1][1] + g.velocity[2][2];
        const double txx = 2.0 * mu_t * (g.velocity[0][0] - div / 3.0);
        const double tyy = 2.0 * mu_t * (g.velocity[1][1] - div / 3.0);
        const double tzz = 2.0 * mu_t * (g.velocity[2][2] - div / 3.0);
        const double txy = mu_t * (g.velocity[0][1] + g.velocity[1][0]);
        const double txz = mu_t * (g.velocity[0][2] + g.velocity[2][0]);
        const double tyz = mu_t * (g.velocity[1][2] + g.velocity[2][1]);
        out[0] = txx;
        out[1] = tyy;
        out[2] = tzz;
        out[3] = txy;
        out[4] = txz;
        out[5] = tyz;
        out[6] = txx * w[1] + txy * w[2] + txz * w[3] + kappa * g.temperature[0];
        out[7] = txy * w[1] + tyy * w[2] + tyz * w[3] + kappa * g.temperature[1];
        out[8] = txz * w[1] + tyz * w[2] + tzz * w[3] + kappa * g.temperature[2];
      }
    }
  }
}

void RhsAssembler::assemble(const ConservativeField& q, const FlowConfig& cfg, RhsField& rhs,
                            const RhsOptions& options, StageContext context) {
  const CurvilinearMesh& mesh = *mesh_;
  const BlockLayout& b = mesh.layout();
  if (!(rhs.layout() == b)) rhs = RhsField(b);
  const ActiveRange& a = active_;
  compute_primitives(q, cfg, options.viscous);
  if (options.viscous) compute_viscous_terms(cfg);
  zero_active(rhs, a);
  if (a.empty()) return;

  const std::ptrdiff_t strides[3] = {static_cast<std::ptrdiff_t>(b.stride_i()), 1,
                                     static_cast<std::ptrdiff_t>(b.stride_k())};
  if (options.inviscid || options.viscous) {
    for (int dir = 0; dir < 3; ++dir) {
      for (int lk = lk_lo_; lk < lk_hi_; ++lk) {
        for (int li = li_lo_; li < li_hi_; ++li) {
          std::size_t n = b.index(li, 0, lk);
          for (int j = 0; j < b.nj(); ++j, ++n) {
            const double* s = mesh.metrics.at(n) + 3 * dir;
            const double* w = prim_.data() + n * kPrim;
            const double* qn = q.at(n);
            double* f = flux_.data() + n * 5;
            if (options.inviscid) {
              const double un = s[0] * w[1] + s[1] * w[2] + s[2] * w[3];
              f[0] = qn[0] * un;
              f[1] = qn[1] * un + s[0] * w[4];
              f[2] = qn[2] * un + s[1] * w[4];
              f[3] = qn[3] * un + s[2] * w[4];
              f[4] = (qn[4] + w[4]) * un;
            } else {
              std::fill(f, f + 5, 0.0);
            }
            if (options.viscous) {
              const double* v = visc_.data() + n * kVisc;
              f[1] -= s[0] * v[0] + s[1] * v[3] + s[2] * v[4];
              f[2] -= s[0] * v[3] + s[1] * v[1] + s[2] * v[5];
              f[3] -= s[0] * v[4] + s[1] * v[5] + s[2] * v[2];
              f[4] -= s[0] * v[6] + s[1] * v[7] + s[2] * v[8];
            }
          }
        }
      }
      const std::ptrdiff_t st = strides[dir] * 5;
      for (int lk = a.lk_begin; lk < a.lk_end; ++lk) {
        for (int li = a.li_begin; li < a.li_end; ++li) {
          std::size_t n = b.index(li, a.j_begin, lk);
          for (int j = a.j_begin; j < a.j_end; ++j, ++n) {
            const double* f = flux_.data() + n * 5;
            double* r = rhs.at(n);
            for (int c = 0; c < 5; ++c) r[c] += 0.5 * (f[st + c] - f[c - st]);
          }
        }
      }
    }
  }

  if (options.dissipation) {
    fill_coefficients(prim_, mesh, {li_lo_, li_hi_, lk_lo_, lk_hi_}, coeff_);
    apply_dissipation(q, coeff_, mesh, cfg, dissipation_);
  }

  for (int lk = a.lk_begin; lk < a.lk_end; ++lk) {
    for (int li = a.li_begin; li < a.li_end; ++li) {
      std::size_t n = b.index(li, a.j_begin, lk);
      for (int j = a.j_begin; j < a.j_end; ++j, ++n) {
        double* r = rhs.at(n);
        const double inv_vol = 1.0 / mesh.volume.at(n)[0];
        if (options.dissipation) {
          const double* d = dissipation_.at(n);
          for (int c = 0; c < 5; ++c) r[c] = (r[c] - d[c]) * inv_vol;
        } else {
          for (int c = 0; c < 5; ++c) r[c] *= inv_vol;
        }
        if (!std::isfinite(r[0] + r[1] + r[2] + r[3] + r[4])) {
          throw DivergenceError("non-finite right-hand side", b.node(li, j, lk), context.iteration, context.stage);
        }
      }
    }
  }
}

RhsField assemble_rhs(const ConservativeField& q, const CurvilinearMesh& mesh, const FlowConfig& cfg,
                      const RhsOptions& options) {
  RhsAssembler assembler(mesh);
  RhsField rhs(q.layout());
  assembler.assemble(q, cfg, rhs, options);
  return rhs;
}

}  // namespace jetflow
