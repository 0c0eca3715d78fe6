#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "jetflow/integrate.hpp"
#include "jetflow/numerics.hpp"

using namespace jetflow;

namespace {

const double kPi = std::acos(-1.0);

FlowConfig gas(double re = 1.57e6) { return FlowConfig::jet(1.4, re); }

// Box mesh and a primitive field given by a function of position.
ConservativeField field_on(const CurvilinearMesh& m, const FlowConfig& cfg,
                           const std::function<PrimitiveState(const double*)>& w) {
  const BlockLayout& b = m.layout();
  ConservativeField q(b);
  for (int lk = 0; lk < b.nk(); ++lk) {
    if (!b.valid_k(lk)) continue;
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      for (int j = 0; j < b.nj(); ++j) {
        const std::size_t n = b.index(li, j, lk);
        store_state(q.at(n), conservative_from_primitive(w(m.coords.at(n)), cfg));
      }
    }
  }
  return q;
}

double max_active(const RhsField& r, int component) {
  const ActiveRange a = active_range(r.layout());
  double worst = 0.0;
  for (int lk = a.lk_begin; lk < a.lk_end; ++lk)
    for (int li = a.li_begin; li < a.li_end; ++li)
      for (int j = a.j_begin; j < a.j_end; ++j) worst = std::max(worst, std::abs(r.at(li, j, lk)[component]));
  return worst;
}

}  // namespace

TEST(InviscidFlux, RestStateCarriesPressureOnly) {
  const FlowConfig cfg = gas();
  const PrimitiveState w{1.0, {0, 0, 0}, 0.7, 0.0};
  const auto E = inviscid_flux(w, conservative_from_primitive(w, cfg));
  for (int d = 0; d < 3; ++d) {
    EXPECT_EQ(E[d][0], 0.0);
    EXPECT_EQ(E[d][4], 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(E[d][1 + i], i == d ? 0.7 : 0.0);
  }
}

TEST(InviscidFlux, AxialExample) {
  const PrimitiveState w{1.0, {1.0, 0, 0}, 1.0, 0.0};
  const ConservativeState q{1.0, {1.0, 0, 0}, 3.0};
  const auto E = inviscid_flux(w, q);
  const Flux5 expect{1.0, 2.0, 0.0, 0.0, 4.0};
  for (int c = 0; c < 5; ++c) EXPECT_DOUBLE_EQ(E[0][c], expect[c]);
}

TEST(InviscidFlux, ContravariantIsProjection) {
  const FlowConfig cfg = gas();
  const PrimitiveState w{1.2, {0.3, -0.4, 0.5}, 0.6, 0.0};
  const ConservativeState q = conservative_from_primitive(w, cfg);
  const Vec3 s{0.2, -1.1, 0.7};
  const auto E = inviscid_flux(w, q);
  const Flux5 f = contravariant_inviscid_flux(w, q, s);
  for (int c = 0; c < 5; ++c) EXPECT_NEAR(f[c], s[0] * E[0][c] + s[1] * E[1][c] + s[2] * E[2][c], 1e-14);
}

TEST(ViscousFlux, PureShear) {
  FlowConfig cfg = gas();
  cfg.mu_ref = 1.0;
  FlowGradients g;
  g.velocity[0][1] = 1.0;
  const PrimitiveState w{1.0, {0, 0, 0}, cfg.ambient_pressure(), cfg.ambient_temperature()};
  const Tensor3 s = rate_of_strain(g.velocity);
  EXPECT_DOUBLE_EQ(s[0][1], 0.5);
  EXPECT_DOUBLE_EQ(s[1][0], 0.5);
  const ViscousFlux v = viscous_flux(w, g, cfg);
  EXPECT_NEAR(v.tau[0][1], 1.0, 1e-15);
  for (int d = 0; d < 3; ++d) EXPECT_EQ(v.tau[d][d], 0.0);
  for (int d = 0; d < 3; ++d) EXPECT_EQ(v.heat_flux[d], 0.0);
}

TEST(ViscousFlux, DilatationIsTraceFree) {
  FlowConfig cfg = gas();
  cfg.mu_ref = 1.0;
  FlowGradients g;
  for (int d = 0; d < 3; ++d) g.velocity[d][d] = 1.0;
  const PrimitiveState w{1.0, {0, 0, 0}, cfg.ambient_pressure(), cfg.ambient_temperature()};
  const ViscousFlux v = viscous_flux(w, g, cfg);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(v.tau[a][b], 0.0, 1e-15);
}

TEST(ViscousFlux, FourierHeatFlux) {
  FlowConfig cfg = gas();
  cfg.mu_ref = 1.0;
  FlowGradients g;
  g.temperature = {2.0, 0.0, 0.0};
  const PrimitiveState w{1.0, {0.5, 0, 0}, cfg.ambient_pressure(), cfg.ambient_temperature()};
  const ViscousFlux v = viscous_flux(w, g, cfg);
  const double kappa = conductivity(sutherland_viscosity(w.temperature, cfg), 0.0, cfg).kappa;
  EXPECT_NEAR(v.heat_flux[0], -2.0 * kappa, 1e-12);
  // Energy row of F_x: tau_xj u_j - q_x, heat flows down the gradient.
  EXPECT_NEAR(v.F[0][4], 2.0 * kappa, 1e-12);
}

TEST(SgsStress, Cases) {
  Tensor3 shear{};
  shear[0][1] = shear[1][0] = 0.5;
  EXPECT_DOUBLE_EQ(sgs_stress(shear, 1.0)[0][1], -1.0);
  const Tensor3 zero = sgs_stress(shear, 0.0);
  for (const auto& row : zero)
    for (double x : row) EXPECT_EQ(x, 0.0);
  Tensor3 iso{};
  for (int d = 0; d < 3; ++d) iso[d][d] = 1.0;
  for (const auto& row : sgs_stress(iso, 3.7))
    for (double x : row) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(Dissipation, UniformFieldGivesZero) {
  const FlowConfig cfg = gas();
  const CurvilinearMesh m = compute_metrics(generate_box(9, 9, 9, 1.0, 1.0, 1.0));
  const ConservativeField q = field_on(m, cfg, [&](const double*) {
    return PrimitiveState{1.0, {0.4, 0.1, 0.0}, cfg.ambient_pressure(), 0.0};
  });
  const RhsField d = artificial_dissipation(q, m, cfg);
  for (int c = 0; c < 5; ++c) EXPECT_EQ(max_active(d, c), 0.0);
}

TEST(Dissipation, FourthDifferenceIsThirdOrder) {
  const FlowConfig cfg = gas();
  auto at_center = [&](int n) {
    const CurvilinearMesh m = compute_metrics(generate_box(n, 5, 5, 1.0, 0.1, 0.1));
    const ConservativeField q = field_on(m, cfg, [&](const double* x) {
      return PrimitiveState{1.0 + 0.01 * std::sin(2.0 * kPi * x[0] + 0.3), {0, 0, 0}, cfg.ambient_pressure(), 0.0};
    });
    const RhsField d = artificial_dissipation(q, m, cfg);
    const BlockLayout& b = d.layout();
    return std::abs(d.at(b.local_i((n - 1) / 2), 2, b.local_k(2))[0]);
  };
  const double ratio = at_center(33) / at_center(65);
  EXPECT_GT(ratio, 7.0);
  EXPECT_LT(ratio, 9.0);
}

TEST(Dissipation, SensorSaturatesAtSpike) {
  const FlowConfig cfg = gas();
  const CurvilinearMesh m = compute_metrics(generate_box(9, 5, 5, 1.0, 1.0, 1.0));
  const BlockLayout& b = m.layout();
  ConservativeField q = field_on(m, cfg, [&](const double*) {
    return PrimitiveState{1.0, {0, 0, 0}, cfg.ambient_pressure(), 0.0};
  });
  const std::size_t spike = b.index(b.local_i(4), 2, b.local_k(2));
  store_state(q.at(spike), conservative_from_primitive({1.0, {0, 0, 0}, 100.0 * cfg.ambient_pressure(), 0.0}, cfg));
  const DissipationCoefficients c = dissipation_coefficients(q, m, cfg);
  const double nu = c.sensor.at(spike)[0];
  EXPECT_NEAR(nu, 99.0 / 101.0, 1e-12);
  EXPECT_EQ(std::max(0.0, cfg.k4 - cfg.k2 * nu), 0.0);
  EXPECT_EQ(c.sensor.at(b.index(b.local_i(1), 2, b.local_k(2)))[0], 0.0);
}

TEST(Rhs, FreeStreamOnCylindricalMesh) {
  FlowConfig cfg = gas();
  cfg.ambient_velocity = {0.3, 0.05, -0.02};
  GridSpec g;
  g.n_axial = 16;
  g.n_radial = 12;
  g.n_azimuthal = 13;
  const CurvilinearMesh m = compute_metrics(generate(g));
  PrimitiveState w{1.0, cfg.ambient_velocity, cfg.ambient_pressure(), 0.0};
  const ConservativeField q = uniform_field(m.layout(), w, cfg);
  const RhsField r = assemble_rhs(q, m, cfg);
  for (int c = 0; c < 5; ++c) EXPECT_LT(max_active(r, c), 1e-12);
}

TEST(Rhs, AdvectedDensityWaveConverges) {
  FlowConfig cfg = gas();
  auto error = [&](int n) {
    const CurvilinearMesh m = compute_metrics(generate_box(n, 5, 5, 1.0, 0.1, 0.1));
    const ConservativeField q = field_on(m, cfg, [&](const double* x) {
      return PrimitiveState{1.0 + 0.2 * std::sin(2.0 * kPi * x[0]), {1.0, 0, 0}, cfg.ambient_pressure(), 0.0};
    });
    const RhsField r = assemble_rhs(q, m, cfg, {true, false, false});
    const BlockLayout& b = r.layout();
    double worst = 0.0;
    for (int gi = 1; gi < n - 1; ++gi) {
      const double x = m.coords.at(b.local_i(gi), 2, b.local_k(2))[0];
      const double exact = 0.2 * 2.0 * kPi * std::cos(2.0 * kPi * x);
      worst = std::max(worst, std::abs(r.at(b.local_i(gi), 2, b.local_k(2))[0] - exact));
    }
    return worst;
  };
  const double e1 = error(17), e2 = error(33), e3 = error(65);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(Rhs, ViscousShearConverges) {
  FlowConfig cfg = gas(100.0);
  auto error = [&](int n) {
    const CurvilinearMesh m = compute_metrics(generate_box(5, n, 5, 0.1, 1.0, 0.1));
    const ConservativeField q = field_on(m, cfg, [&](const double* x) {
      return PrimitiveState{1.0, {std::sin(2.0 * x[1]), 0, 0}, cfg.ambient_pressure(), 0.0};
    });
    const RhsField r = assemble_rhs(q, m, cfg, {false, true, false});
    const BlockLayout& b = r.layout();
    double worst = 0.0;
    for (int j = 2; j < n - 2; ++j) {
      const double y = m.coords.at(b.local_i(2), j, b.local_k(2))[1];
      // RHS = -d(tau_xy)/dy = -mu u''
      const double exact = 4.0 * cfg.mu_ref * std::sin(2.0 * y);
      worst = std::max(worst, std::abs(r.at(b.local_i(2), j, b.local_k(2))[1] - exact));
    }
    return worst;
  };
  const double e1 = error(17), e2 = error(33), e3 = error(65);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(Rhs, HeatConductionConverges) {
  FlowConfig cfg = gas(100.0);
  const double p = cfg.ambient_pressure(), t0 = cfg.ambient_temperature();
  auto temp = [&](double y) { return t0 * (1.0 + 0.2 * std::sin(2.0 * y)); };
  // kappa(T(y)) T'(y); the exact energy RHS is minus its derivative.
  auto conduction = [&](double y) {
    const double kappa = conductivity(sutherland_viscosity(temp(y), cfg), 0.0, cfg).kappa;
    return kappa * 0.4 * t0 * std::cos(2.0 * y);
  };
  auto error = [&](int n) {
    const CurvilinearMesh m = compute_metrics(generate_box(5, n, 5, 0.1, 1.0, 0.1));
    const ConservativeField q = field_on(m, cfg, [&](const double* x) {
      return PrimitiveState{p / (cfg.gas_constant() * temp(x[1])), {0, 0, 0}, p, 0.0};
    });
    const RhsField r = assemble_rhs(q, m, cfg, {false, true, false});
    const BlockLayout& b = r.layout();
    double worst = 0.0;
    for (int j = 2; j < n - 2; ++j) {
      const double y = m.coords.at(b.local_i(2), j, b.local_k(2))[1];
      const double h = 1e-4;
      const double exact = -(conduction(y + h) - conduction(y - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(r.at(b.local_i(2), j, b.local_k(2))[4] - exact));
    }
    return worst;
  };
  const double e1 = error(17), e2 = error(33), e3 = error(65);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(Rhs, NonFiniteStateRaisesDivergence) {
  const FlowConfig cfg = gas();
  const CurvilinearMesh m = compute_metrics(generate_box(7, 7, 7, 1.0, 1.0, 1.0));
  ConservativeField q = uniform_field(m.layout(), {1.0, {0, 0, 0}, cfg.ambient_pressure(), 0.0}, cfg);
  const BlockLayout& b = m.layout();
  q.at(b.local_i(3), 3, b.local_k(3))[1] = std::nan("");
  RhsField r(b);
  RhsAssembler a(m);
  try {
    a.assemble(q, cfg, r, {}, {12, 3});
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.iteration, 12);
    EXPECT_EQ(e.stage, 3);
  }
}
