// Acceptance suite: one PASS/FAIL line per criterion.
//
//   jetflow_acceptance [--criteria 1,2,...] [--out DIR]
//
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "jetflow/bench.hpp"
#include "jetflow/boundary.hpp"
#include "jetflow/exchange.hpp"
#include "jetflow/integrate.hpp"
#include "jetflow/numerics.hpp"
#include "jetflow/stats.hpp"
#include "jetflow/storage.hpp"

using namespace jetflow;
namespace fs = std::filesystem;

namespace {

const double kPi = std::acos(-1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

GridSpec jet_grid(int ni, int nj, int nk) {
  GridSpec g;
  g.n_axial = ni;
  g.n_radial = nj;
  g.n_azimuthal = nk;
  return g;
}

RunCase make_case(const GridSpec& g, const CoordinateField& coords, PartitionSpec spec, const FlowConfig& cfg) {
  const PartitionTopology topo = build_topology(g.dims(), spec);
  return RunCase{topo, cfg, g.hash(), split_coordinates(coords, topo)};
}

// ------------------------------------------------------------------ 1

Outcome partition_balance() {
  Stopwatch sw;
  std::mt19937_64 rng(20240611);
  int bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const int nb = std::uniform_int_distribution<int>(1, 2000)(rng);
    const long long tot = std::uniform_int_distribution<long long>(nb, 2000000)(rng);
    const std::vector<int> p = balance(tot, nb);
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    if (static_cast<int>(p.size()) != nb || std::accumulate(p.begin(), p.end(), 0LL) != tot || *hi - *lo > 1) ++bad;
  }
  std::vector<int> expect(20, 18);
  expect[0] = 19;
  const bool example = balance(361, 20) == expect;
  const double s = sw.seconds();
  return {bad == 0 && example && s < 1.0,
          std::to_string(bad) + " bad of 10000 random splits, (361, 20) " + (example ? "= [19, 18 x 19]" : "wrong") +
              ", " + fmt("%.3f s", s) + " (limit 1 s)"};
}

// ------------------------------------------------------------------ 2

Outcome free_stream() {
  Stopwatch sw;
  FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  cfg.jet_inflow = false;
  cfg.ambient_velocity = {0.3, 0.0, 0.0};
  const GridSpec g = jet_grid(64, 32, 24);
  const CoordinateField coords = generate(g);
  const PrimitiveState w = ambient_state(cfg);
  const ConservativeField ref = uniform_field(BlockLayout::whole(g.dims()), w, cfg);
  double worst = 0.0;
  std::ostringstream d;
  for (PartitionSpec spec : {PartitionSpec{1, 1}, PartitionSpec{2, 2}, PartitionSpec{4, 1}}) {
    RunCase c = make_case(g, coords, spec, cfg);
    for (std::size_t p = 0; p < c.topology.parts.size(); ++p)
      c.workers[p].initial = uniform_field(c.topology.parts[p].layout, w, cfg);
    RunPlan plan;
    plan.n_iterations = 100;
    const double diff = max_abs_difference(ref, run(plan, c).global);
    worst = std::max(worst, diff);
    d << "(" << spec.npx << "," << spec.npz << ") " << fmt("%.2e", diff) << "; ";
  }
  const double s = sw.seconds();
  d << fmt("%.1f s", s) << " (limits 1e-12, 60 s)";
  return {worst < 1e-12 && s < 60.0, "max change " + d.str()};
}

// ------------------------------------------------------------------ 3

Outcome decomposition_invariance() {
  Stopwatch sw;
  const FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  const GridSpec g = jet_grid(64, 32, 24);
  const CoordinateField coords = generate(g);
  RunPlan plan;
  plan.n_iterations = 50;
  const RunResult one = run(plan, make_case(g, coords, {1, 1}, cfg));
  const RunResult four = run(plan, make_case(g, coords, {2, 2}, cfg));
  const double diff = max_abs_difference(one.global, four.global);
  const double s = sw.seconds();
  return {diff <= 1e-12 && s < 120.0,
          "1 vs 4 workers (2 x 2) max diff " + fmt("%.2e", diff) + ", " + fmt("%.1f s", s) + " (limits 1e-12, 120 s)"};
}

// ------------------------------------------------------------------ 4
// Forward-mode dual numbers give the exact divergence of the analytic fluxes.

template <class T>
struct Dual {
  T v{}, d{};
  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}
  Dual(T x, T dx) : v(x), d(dx) {}
};
template <class T> Dual<T> operator+(Dual<T> a, Dual<T> b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(Dual<T> a, Dual<T> b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator-(Dual<T> a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator*(Dual<T> a, Dual<T> b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(Dual<T> a, Dual<T> b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
template <class T> Dual<T> operator+(Dual<T> a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, Dual<T> b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(Dual<T> a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, Dual<T> b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(Dual<T> a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, Dual<T> b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(Dual<T> a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, Dual<T> b) { return Dual<T>(a) / b; }
template <class T> Dual<T> sin(Dual<T> a) { using std::sin, std::cos; return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(Dual<T> a) { using std::sin, std::cos; return {cos(a.v), -(a.d * sin(a.v))}; }
template <class T> Dual<T> sqrt(Dual<T> a) {
  using std::sqrt;
  const T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

template <class T> T value_of(const T& x) { return x; }
template <class T> T value_of(const Dual<T>& x) { return x.v; }

template <class T>
struct MmsPrim {
  T rho, u[3], p;
};

// Smooth, non-symmetric state on the annulus test domain.
template <class T>
MmsPrim<T> mms_state(const T x[3], const FlowConfig& cfg) {
  using std::sin, std::cos;
  const double p0 = cfg.ambient_pressure();
  MmsPrim<T> w;
  w.rho = 1.0 + 0.2 * sin(1.3 * x[0] + 0.7 * x[1]) * cos(0.9 * x[2]);
  w.u[0] = 0.5 + 0.2 * cos(0.8 * x[0] - 1.1 * x[2]);
  w.u[1] = 0.1 * sin(1.2 * x[1] + 0.5 * x[0]);
  w.u[2] = -0.15 * cos(0.6 * x[1] + 1.4 * x[2]);
  w.p = p0 * (1.0 + 0.15 * cos(1.1 * x[0] + 0.4 * x[1] - 0.6 * x[2]));
  return w;
}

// Cartesian E_d - F_d for component c at x, with the laminar Navier-Stokes
// closures: Sutherland viscosity, mu cp / Pr conductivity, Fourier heat flux.
template <class T>
T net_flux(const T x[3], int d, int c, const FlowConfig& cfg) {
  using std::sqrt;
  const MmsPrim<T> w = mms_state(x, cfg);
  const double g = cfg.gamma, R = cfg.gas_constant();
  const T ke = 0.5 * w.rho * (w.u[0] * w.u[0] + w.u[1] * w.u[1] + w.u[2] * w.u[2]);
  const T e = w.p / (g - 1.0) + ke;
  T E;
  if (c == 0) E = w.rho * w.u[d];
  else if (c <= 3) E = w.rho * w.u[c - 1] * w.u[d] + (c - 1 == d ? w.p : T(0.0));
  else E = (e + w.p) * w.u[d];
  if (c == 0) return E;

  // Gradients by an inner dual layer.
  T du[3][3], dT[3];
  for (int j = 0; j < 3; ++j) {
    Dual<T> xs[3];
    for (int a = 0; a < 3; ++a) xs[a] = Dual<T>(x[a], T(a == j ? 1.0 : 0.0));
    const MmsPrim<Dual<T>> wj = mms_state(xs, cfg);
    for (int i = 0; i < 3; ++i) du[i][j] = wj.u[i].d;
    dT[j] = (wj.p / (wj.rho * R)).d;
  }
  const T temp = w.p / (w.rho * R);
  const T ratio = temp / cfg.ambient_temperature();
  const T mu = cfg.mu_ref * ratio * sqrt(ratio) * (cfg.t_ref + cfg.sutherland_s1) / (cfg.t_ref * ratio + cfg.sutherland_s1);
  const T kappa = mu * (cfg.cp / cfg.prandtl);
  const T div = du[0][0] + du[1][1] + du[2][2];
  auto tau = [&](int i, int j) { return mu * (du[i][j] + du[j][i]) - (i == j ? (2.0 / 3.0) * mu * div : T(0.0)); };
  T F;
  if (c <= 3) F = tau(c - 1, d);
  else F = tau(0, d) * w.u[0] + tau(1, d) * w.u[1] + tau(2, d) * w.u[2] + kappa * dT[d];
  return E - F;
}

// Exact RHS = div(E - F) for component c.
double exact_rhs(const double x[3], int c, const FlowConfig& cfg) {
  double sum = 0.0;
  for (int d = 0; d < 3; ++d) {
    Dual<double> xs[3];
    for (int a = 0; a < 3; ++a) xs[a] = Dual<double>(x[a], a == d ? 1.0 : 0.0);
    sum += net_flux(xs, d, c, cfg).d;
  }
  return sum;
}

// Curvilinear annulus x in [0, 1.5], r in [1, 2], full azimuth, no axis.
CoordinateField annulus(int n) {
  const int nk = 4 * (n - 1) + 1;
  const GridDims dims{n, n, nk, true, false};
  CoordinateField c(BlockLayout::whole(dims));
  const BlockLayout& b = c.layout();
  const double h = 1.0 / (n - 1), dth = 2.0 * kPi / (nk - 1);
  for (int lk = 0; lk < b.nk(); ++lk)
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      const double xi = h * b.global_i(li), th = dth * b.global_k(lk);
      for (int j = 0; j < n; ++j) {
        const double eta = h * j;
        const double r = 1.0 + eta + 0.08 * std::sin(kPi * eta) * std::cos(th);
        double* x = c.at(li, j, lk);
        x[0] = 1.5 * xi + 0.05 * std::sin(kPi * eta);
        x[1] = r * std::cos(th + 0.1 * xi);
        x[2] = r * std::sin(th + 0.1 * xi);
      }
    }
  return c;
}

Outcome spatial_order() {
  Stopwatch sw;
  const FlowConfig cfg = FlowConfig::jet(1.4, 200.0);
  std::vector<double> errors;
  for (int n : {9, 17, 33, 65}) {
    const CurvilinearMesh m = compute_metrics(annulus(n));
    const BlockLayout& b = m.layout();
    ConservativeField q(b);
    for (int lk = 0; lk < b.nk(); ++lk)
      for (int li = 0; li < b.ni(); ++li) {
        if (!b.valid_i(li)) continue;
        for (int j = 0; j < b.nj(); ++j) {
          const double* x = m.coords.at(li, j, lk);
          const MmsPrim<double> w = mms_state(x, cfg);
          store_state(q.at(li, j, lk),
                      conservative_from_primitive({w.rho, {w.u[0], w.u[1], w.u[2]}, w.p, 0.0}, cfg));
        }
      }
    const RhsField r = assemble_rhs(q, m, cfg);
    // Error over a fixed interior region of index space, away from the open boundaries.
    double worst = 0.0;
    for (int lk = BlockLayout::ghost; lk < b.nk() - BlockLayout::ghost; ++lk)
      for (int gi = (n - 1) / 4; gi <= 3 * (n - 1) / 4; ++gi)
        for (int j = (n - 1) / 4; j <= 3 * (n - 1) / 4; ++j) {
          const std::size_t node = b.index(b.local_i(gi), j, lk);
          for (int c = 0; c < 5; ++c)
            worst = std::max(worst, std::abs(r.at(node)[c] - exact_rhs(m.coords.at(node), c, cfg)));
        }
    errors.push_back(worst);
  }
  std::ostringstream d;
  double min_order = 1e9;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double order = std::log2(errors[k] / errors[k + 1]);
    min_order = std::min(min_order, order);
    d << fmt("%.3f", order) << (k + 2 < errors.size() ? ", " : "");
  }
  const double s = sw.seconds();
  return {min_order >= 1.9 && s < 60.0,
          "RHS orders " + d.str() + " (errors " + fmt("%.2e", errors.front()) + " .. " + fmt("%.2e", errors.back()) +
              "), " + fmt("%.1f s", s) + " (limits 1.9, 60 s)"};
}

// ------------------------------------------------------------------ 5

Outcome temporal_order() {
  Stopwatch sw;
  const RkScheme scheme;
  const double lambda = -1.0, t_end = 1.0;
  // The library's own stage update on a single active node with rhs = -lambda q.
  const GridDims dims{3, 3, 3, false, false};
  const BlockLayout b = BlockLayout::whole(dims);
  const std::size_t node = b.index(b.local_i(1), 1, b.local_k(1));
  auto integrate = [&](int steps) {
    const double dt = t_end / steps;
    ConservativeField q(b, 1.0), q_n(b);
    RhsField rhs(b);
    for (int s = 0; s < steps; ++s) {
      q_n = q;
      for (int l = 0; l < 5; ++l) {
        for (int c = 0; c < 5; ++c) rhs.at(node)[c] = -lambda * q.at(node)[c];
        rk_stage(q_n, q, scheme.alphas[static_cast<std::size_t>(l)], dt, rhs);
      }
    }
    return std::abs(q.at(node)[0] - std::exp(lambda * t_end));
  };
  std::vector<double> e;
  for (int steps : {10, 20, 40, 80}) e.push_back(integrate(steps));
  double min_order = 1e9;
  std::ostringstream d;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    const double order = std::log2(e[k] / e[k + 1]);
    min_order = std::min(min_order, order);
    d << fmt("%.3f", order) << (k + 2 < e.size() ? ", " : "");
  }

  // Independent expansion of 1 + a5 z (1 + a4 z (1 + a3 z (1 + a2 z (1 + a1 z)))).
  std::vector<double> poly{1.0};
  for (int l = 0; l < 5; ++l) {
    std::vector<double> next(poly.size() + 1, 0.0);
    next[0] = 1.0;
    for (std::size_t k = 0; k < poly.size(); ++k) next[k + 1] += scheme.alphas[static_cast<std::size_t>(l)] * poly[k];
    poly = next;
  }
  const auto lib = scheme.amplification_coefficients();
  double coeff_err = 0.0;
  for (std::size_t k = 0; k < 6; ++k) coeff_err = std::max(coeff_err, std::abs(lib[k] - poly[k]));
  const double c3_err = std::abs(lib[3] - 3.0 / 16.0);
  const double z = -0.1;
  double horner = 0.0;
  for (int k = 5; k >= 0; --k) horner = horner * z + poly[static_cast<std::size_t>(k)];
  const double g_err = std::abs(scheme.amplification(z) - horner);
  const double s = sw.seconds();
  return {min_order >= 1.95 && c3_err <= 1e-12 && coeff_err <= 1e-12 && g_err <= 1e-14 && s < 1.0,
          "orders " + d.str() + "; c3 = " + fmt("%.15f", lib[3]) + " (|c3 - 3/16| = " + fmt("%.1e", c3_err) +
              "), g(-0.1) error " + fmt("%.1e", g_err) + ", " + fmt("%.3f s", s) + " (limits 1.95, 1e-12, 1 s)"};
}

// ------------------------------------------------------------------ 6

Outcome restart_equivalence(const fs::path& out) {
  Stopwatch sw;
  const FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  const GridSpec g = jet_grid(64, 32, 24);
  const RunCase c = make_case(g, generate(g), {2, 2}, cfg);
  const fs::path dir = out / "restart";
  fs::remove_all(dir);
  fs::create_directories(dir);

  RunPlan straight;
  straight.n_iterations = 100;
  const RunResult full = run(straight, c);

  RunPlan first;
  first.n_iterations = 50;
  first.output_dir = dir;
  first.checkpoint_at_end = true;
  run(first, c);
  RunPlan second;
  second.n_iterations = 50;
  second.restart = true;
  second.restart_dir = dir;
  const RunResult resumed = run(second, c);

  bool bitwise = resumed.global.values().size() == full.global.values().size();
  if (bitwise) {
    bitwise = std::memcmp(resumed.global.values().data(), full.global.values().data(),
                          full.global.values().size() * sizeof(double)) == 0;
  }
  const double s = sw.seconds();
  return {bitwise && resumed.last_iteration == 100 && s < 120.0,
          std::string("checkpoint at 50, resumed to ") + std::to_string(resumed.last_iteration) + ": " +
              (bitwise ? "bit-exact" : "differs, max " + fmt("%.2e", max_abs_difference(full.global, resumed.global))) +
              ", " + fmt("%.1f s", s) + " (limit 120 s)"};
}

// ------------------------------------------------------------------ 7

Outcome scaling_methodology() {
  Stopwatch sw;
  const std::vector<int> counts{1, 2, 5, 10, 20, 40, 80, 100, 200, 400};
  // Production mesh A dimensions: enough points for every worker count's candidates.
  GridSpec big = jet_grid(128, 128, 361);
  SweepPlan plan;
  plan.meshes = {{"A", big, 1}, {"F", big, 40}};
  plan.workers = counts;
  plan.synthetic = [](const MeshCase&, const PartitionSpec& s) { return 1000.0 / s.workers(); };
  const SweepResult r = run_sweep(plan);

  bool ok = true;
  std::ostringstream d;
  for (int n : counts) {
    if (speedup(r.records, "A", n, 1) != n || efficiency(r.records, "A", n, 1) != 1.0) {
      ok = false;
      d << "Sp(A," << n << ") = " << speedup(r.records, "A", n, 1) << "; ";
    }
    if (n >= 40 && (speedup(r.records, "F", n, 40) != n / 40.0 || shifted_efficiency(r.records, "F", n, 40) != 1.0)) {
      ok = false;
      d << "Sp(F," << n << ") = " << speedup(r.records, "F", n, 40) << "; ";
    }
  }
  const double sp_s = speedup(r.records, "F", 40, 40);
  ok = ok && sp_s == 1.0;
  const double s = sw.seconds();
  return {ok && s < 1.0,
          "T(N) = T(1)/N: Sp(N) = N and eta = 1 exactly for N in {1..400}; Sp(F, 40) with s = 40 is " + fmt("%g", sp_s) +
              (d.str().empty() ? "" : "; mismatches: " + d.str()) + ", " + fmt("%.3f s", s) + " (limit 1 s)"};
}

// ------------------------------------------------------------------ 8

Outcome live_scaling(const fs::path& out) {
  Stopwatch sw;
  SweepPlan plan;
  plan.meshes = {desk_mesh_family(1).front()};
  plan.workers = {1, 2, 4, 8};
  plan.iterations = 1000;
  const SweepResult r = run_sweep(plan);
  const fs::path dir = out / "live_scaling";
  report(r, dir);

  std::ostringstream d;
  std::vector<double> t;
  for (int n : plan.workers) {
    for (const ScalingRecord& rec : r.records)
      if (rec.selected && rec.workers == n) {
        t.push_back(rec.seconds);
        d << "T(" << n << ") = " << fmt("%.4f", rec.seconds) << " s [" << rec.npx << "x" << rec.npz << "]; ";
      }
  }
  bool decreasing = t.size() == plan.workers.size();
  for (std::size_t k = 1; decreasing && k < t.size(); ++k) decreasing = t[k] < t[k - 1];
  double eta8 = 0.0;
  try {
    eta8 = efficiency(r.records, "A", 8, 1);
  } catch (const IncompleteSweepError&) {
  }
  const double s = sw.seconds();
  d << "eta(8) = " << fmt("%.3f", eta8) << "; " << std::thread::hardware_concurrency() << " hardware threads; "
    << fmt("%.0f s", s) << " (limits strictly decreasing, eta(8) >= 0.6, 1800 s)";
  return {decreasing && eta8 >= 0.6 && s < 1800.0, d.str()};
}

// ------------------------------------------------------------------ 9

bool non_increasing_outside(const RadialProfile& p, double r_min) {
  for (std::size_t j = 1; j < p.values.size(); ++j)
    if (p.radii[j - 1] >= r_min && p.values[j] > p.values[j - 1]) return false;
  return true;
}

Outcome jet_physics(const fs::path& out) {
  Stopwatch sw;
  const FlowConfig cfg = FlowConfig::jet(1.4, 1.57e6);
  const GridSpec g = jet_grid(128, 64, 91);
  const RunCase c = make_case(g, generate(g), {1, 1}, cfg);
  RunPlan plan;
  plan.n_iterations = 5000;
  plan.stats_from = 2501;
  plan.output_dir = out / "jet_physics";
  fs::create_directories(plan.output_dir);
  plan.checkpoint_at_end = true;
  RunResult r;
  try {
    r = run(plan, c);
  } catch (const DivergenceError& e) {
    return {false, std::string("diverged: ") + e.what()};
  }
  const std::vector<double> x = axial_stations(g), radii = radial_stations(g);
  const std::vector<double> plane = azimuthal_mean_plane(g.dims(), r.stats.means());
  const double core = potential_core_length(potential_core(plane, x, radii, cfg.jet_velocity()));
  const RadialProfile p25 = extract_profile(r.stats, x, radii, 2.5, ProfileQuantity::Mean, cfg.jet_velocity());
  const RadialProfile p50 = extract_profile(r.stats, x, radii, 5.0, ProfileQuantity::Mean, cfg.jet_velocity());
  const bool m25 = non_increasing_outside(p25, 0.25), m50 = non_increasing_outside(p50, 0.25);
  const double s = sw.seconds();
  return {core >= 3.0 && m25 && m50,
          "no divergence over 5000 iterations; potential core length " + fmt("%.3f", core) + " D (limit 3 D); profile " +
              "at 2.5D " + (m25 ? "" : "not ") + "monotone, at 5.0D " + (m50 ? "" : "not ") + "monotone outside 0.25D; " +
              fmt("%.0f s", s)};
}

// ------------------------------------------------------------------ 10

Outcome centerline() {
  Stopwatch sw;
  const GridSpec g = jet_grid(12, 8, 37);
  const CoordinateField coords = generate(g);
  const double rho = 1.1, U = 0.3, V = 0.45;
  ConservativeField global(coords.layout());
  const BlockLayout& gb = global.layout();
  for (int lk = 0; lk < gb.nk(); ++lk)
    for (int li = 0; li < gb.ni(); ++li) {
      if (!gb.valid_i(li)) continue;
      for (int j = 0; j < gb.nj(); ++j) {
        const double* x = coords.at(li, 1, lk);
        const double th = std::atan2(x[2], x[1]);
        // Radial velocity V cos(theta), azimuthal -V sin(theta): uniform (0, V, 0) in Cartesian form.
        const double ur = V * std::cos(th), ut = -V * std::sin(th);
        double* s = global.at(li, j, lk);
        s[0] = rho;
        s[1] = rho * U;
        s[2] = rho * (ur * std::cos(th) - ut * std::sin(th));
        s[3] = rho * (ur * std::sin(th) + ut * std::cos(th));
        s[4] = 2.0;
        if (j == 0) std::fill(s, s + 5, -1.0);
      }
    }

  double worst = 0.0;
  for (int npz : {1, 3, 4}) {
    const PartitionTopology topo = build_topology(g.dims(), {2, npz});
    const int n = static_cast<int>(topo.parts.size());
    std::vector<ConservativeField> fields;
    for (const Partition& p : topo.parts) {
      ConservativeField f(p.layout);
      gather_from_global(global, f);
      fields.push_back(std::move(f));
    }
    SharedHub hub(n);
    std::vector<std::thread> threads;
    for (int r = 0; r < n; ++r)
      threads.emplace_back([&, r] {
        auto t = hub.connect(r);
        const Partition& p = topo.parts[static_cast<std::size_t>(r)];
        const std::vector<double> local = axis_adjacent_plane(fields[static_cast<std::size_t>(r)]);
        const std::vector<double> ring = azimuthal_gather(*t, topo.ring(p.px), p.layout.k_begin,
                                                          std::min(p.layout.k_end, g.dims().distinct_k()),
                                                          g.dims().distinct_k(), local, 1, Millis(10000));
        apply_centerline(fields[static_cast<std::size_t>(r)], ring);
      });
    for (auto& t : threads) t.join();
    const double expect[5] = {rho, rho * U, rho * V, 0.0, 2.0};
    for (const ConservativeField& f : fields) {
      const BlockLayout& b = f.layout();
      for (int lk = BlockLayout::ghost; lk < b.nk() - BlockLayout::ghost; ++lk)
        for (int li = BlockLayout::ghost; li < b.ni() - BlockLayout::ghost; ++li)
          for (int c = 0; c < 5; ++c) worst = std::max(worst, std::abs(f.at(li, 0, lk)[c] - expect[c]));
    }
  }
  const double s = sw.seconds();
  return {worst <= 1e-12 && s < 1.0,
          "axis vs uniform crossflow vector, npz in {1, 3, 4}: max error " + fmt("%.2e", worst) + ", " +
              fmt("%.3f s", s) + " (limits 1e-12, 1 s)"};
}

// ------------------------------------------------------------------ 11

Outcome storage(const fs::path& out) {
  Stopwatch sw;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);

  // Round trip through a file, including values that text formats lose.
  Container c;
  c.header["kind"] = "acceptance";
  c.header["iteration"] = "123";
  NamedArray a{"q", {7, 11, 5}, {}};
  for (int n = 0; n < 7 * 11 * 5; ++n) a.data.push_back(u(rng));
  a.data[0] = -0.0;
  a.data[1] = std::numeric_limits<double>::denorm_min();
  a.data[2] = std::numeric_limits<double>::quiet_NaN();
  a.data[3] = std::numeric_limits<double>::infinity();
  c.arrays.push_back(a);
  const fs::path dir = out / "storage";
  fs::create_directories(dir);
  write_container(dir / "roundtrip.jzsc", c);
  const Container back = read_container(dir / "roundtrip.jzsc");
  const bool exact = back.header == c.header && back.arrays.size() == 1 && back.arrays[0].shape == a.shape &&
                     std::memcmp(back.arrays[0].data.data(), a.data.data(), a.data.size() * sizeof(double)) == 0;

  // Single-byte corruption at random offsets.
  const std::vector<std::uint8_t> bytes = encode(c);
  std::uniform_int_distribution<std::size_t> where(0, bytes.size() - 1);
  std::uniform_int_distribution<int> flip(1, 255);
  int missed = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint8_t> bad = bytes;
    bad[where(rng)] ^= static_cast<std::uint8_t>(flip(rng));
    try {
      decode(bad);
      ++missed;
    } catch (const ChecksumError&) {
    } catch (const std::exception&) {
      ++missed;
    }
  }
  const double s = sw.seconds();
  return {exact && missed == 0 && s < 10.0,
          std::string("round trip ") + (exact ? "bit-exact" : "NOT exact") + "; " + std::to_string(1000 - missed) +
              " of 1000 corruptions detected by checksum (" + std::to_string(bytes.size()) + "-byte container), " +
              fmt("%.2f s", s) + " (limit 10 s)"};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  fs::path out = fs::temp_directory_path() / "jetflow_acceptance";
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criteria" && a + 1 < argc) {
      selected = parse_list(argv[++a]);
    } else if (arg == "--out" && a + 1 < argc) {
      out = argv[++a];
    } else {
      std::fprintf(stderr, "usage: %s [--criteria 1,2,...] [--out DIR]\n", argv[0]);
      return 2;
    }
  }
  fs::create_directories(out);

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"partition balance", partition_balance}},
      {2, {"free-stream preservation", free_stream}},
      {3, {"decomposition invariance", decomposition_invariance}},
      {4, {"spatial order", spatial_order}},
      {5, {"temporal order", temporal_order}},
      {6, {"restart equivalence", [&] { return restart_equivalence(out); }}},
      {7, {"scaling methodology", scaling_methodology}},
      {8, {"live strong scaling", [&] { return live_scaling(out); }}},
      {9, {"jet physics smoke test", [&] { return jet_physics(out); }}},
      {10, {"centerline treatment", centerline}},
      {11, {"storage", [&] { return storage(out); }}},
  };

  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL  unknown criterion\n", id);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d (%s): %s  %s\n", id, it->second.first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
