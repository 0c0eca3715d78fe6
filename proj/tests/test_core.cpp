#include <gtest/gtest.h>

#include <cmath>

#include "jetflow/core.hpp"

using namespace jetflow;

namespace {

FlowConfig unit_gas() {
  FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  return cfg;
}

}  // namespace

TEST(Core, PrimitiveFromConservativeMovingState) {
  const FlowConfig cfg = unit_gas();
  const PrimitiveState w = primitive_from_conservative({1.0, {1.0, 0.0, 0.0}, 3.0}, cfg);
  EXPECT_DOUBLE_EQ(w.velocity[0], 1.0);
  EXPECT_DOUBLE_EQ(w.velocity[1], 0.0);
  EXPECT_NEAR(w.pressure, 1.0, 1e-15);
  EXPECT_NEAR(w.temperature, 1.0 / cfg.gas_constant(), 1e-12);
}

TEST(Core, PrimitiveFromConservativeRest) {
  const PrimitiveState w = primitive_from_conservative({1.0, {0.0, 0.0, 0.0}, 2.5}, unit_gas());
  EXPECT_NEAR(w.pressure, 1.0, 1e-15);
  EXPECT_EQ(w.velocity[0], 0.0);
}

TEST(Core, PrimitiveFromConservativeDenseState) {
  const PrimitiveState w = primitive_from_conservative({2.0, {2.0, 2.0, 0.0}, 6.0}, unit_gas());
  EXPECT_DOUBLE_EQ(w.velocity[0], 1.0);
  EXPECT_DOUBLE_EQ(w.velocity[1], 1.0);
  EXPECT_NEAR(w.pressure, 0.4 * (6.0 - 2.0), 1e-14);
}

TEST(Core, NonpositiveStateReportsNode) {
  try {
    primitive_from_conservative({-1.0, {0, 0, 0}, 1.0}, unit_gas(), {3, 4, 5});
    FAIL() << "expected InvalidStateError";
  } catch (const InvalidStateError& e) {
    EXPECT_EQ(e.node.i, 3);
    EXPECT_EQ(e.node.j, 4);
    EXPECT_EQ(e.node.k, 5);
  }
  EXPECT_THROW(primitive_from_conservative({1.0, {2.0, 0, 0}, 1.0}, unit_gas()), InvalidStateError);
}

TEST(Core, ConservativeFromPrimitive) {
  const FlowConfig cfg = unit_gas();
  const double g = cfg.gamma;
  PrimitiveState rest{1.0, {0, 0, 0}, 1.0 / g, 0.0};
  EXPECT_NEAR(conservative_from_primitive(rest, cfg).energy, 1.0 / (g * (g - 1.0)), 1e-15);
  PrimitiveState moving{1.0, {1.4, 0, 0}, 1.0 / g, 0.0};
  EXPECT_NEAR(conservative_from_primitive(moving, cfg).energy, 1.0 / (g * (g - 1.0)) + 0.98, 1e-14);
}

TEST(Core, RoundTripIsExactToRoundoff) {
  const FlowConfig cfg = unit_gas();
  PrimitiveState w{0.7, {0.3, -0.2, 0.1}, 0.45, 0.0};
  const PrimitiveState back = primitive_from_conservative(conservative_from_primitive(w, cfg), cfg);
  EXPECT_NEAR(back.rho, w.rho, 1e-15);
  EXPECT_NEAR(back.pressure, w.pressure, 1e-15);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(back.velocity[d], w.velocity[d], 1e-15);
}

TEST(Core, JetNondimensionalization) {
  const FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  EXPECT_NEAR(cfg.jet_temperature(), 1.0, 1e-14);
  EXPECT_NEAR(cfg.ambient_temperature(), 1.0, 1e-14);
  EXPECT_NEAR(cfg.ambient_density(), 1.0, 1e-14);
  EXPECT_NEAR(sound_speed(PrimitiveState{1.0, {0, 0, 0}, cfg.jet_pressure(), 1.0}, cfg), 1.0 / 1.4, 1e-14);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(FlowConfig{}.validate(), ConfigError);
}

TEST(Core, SutherlandReferencePoint) {
  const FlowConfig cfg = unit_gas();
  EXPECT_NEAR(sutherland_viscosity(cfg.ambient_temperature(), cfg), cfg.mu_ref, 1e-20);
}

TEST(Core, SutherlandDoubledTemperature) {
  FlowConfig cfg = unit_gas();
  cfg.t_ref = 300.0;
  const double ratio = sutherland_viscosity(2.0 * cfg.ambient_temperature(), cfg) / cfg.mu_ref;
  EXPECT_NEAR(ratio, std::pow(2.0, 1.5) * 410.4 / 710.4, 1e-12);
  EXPECT_NEAR(ratio, 1.6340, 5e-5);
}

TEST(Core, SutherlandVanishesAtZero) {
  const FlowConfig cfg = unit_gas();
  EXPECT_LT(sutherland_viscosity(1e-12, cfg), 1e-15 * cfg.mu_ref);
}

TEST(Core, Conductivity) {
  FlowConfig cfg = unit_gas();
  cfg.cp = 1.0;
  cfg.prandtl = 0.72;
  EXPECT_NEAR(conductivity(0.72, 0.0, cfg).kappa, 1.0, 1e-15);
  EXPECT_EQ(conductivity(0.72, 0.0, cfg).kappa_sgs, 0.0);
  cfg.cp = 1004.5;
  EXPECT_NEAR(conductivity(1.0, 0.0, cfg).kappa, 1395.14, 5e-3);
}

TEST(Core, HashDependsOnTimeStep) {
  FlowConfig a = unit_gas();
  FlowConfig b = a;
  b.dt = 2e-4;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), unit_gas().hash());
}

TEST(Core, Fnv1aKnownVector) {
  EXPECT_EQ(fnv1a(std::string("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a(std::string("a")), 0xaf63dc4c8601ec8cULL);
}
