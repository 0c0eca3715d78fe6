#include "jetflow/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace jetflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("not a number: '" + v + "'", line);
  return x;
}

long to_long(const std::string& v, int line) {
  long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("not an integer: '" + v + "'", line);
  return x;
}

bool to_bool(const std::string& v, int line) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("not a boolean: '" + v + "'", line);
}

std::vector<double> to_list(const std::string& v, std::size_t n, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line));
  if (out.size() != n) throw ConfigError("expected " + std::to_string(n) + " comma-separated values", line);
  return out;
}

}  // namespace

CaseConfig parse_case(const std::string& text) {
  CaseConfig c;
  // Jet-condition keys determine the derived constants; explicit cp, cv and
  // mu_ref (if present) are applied afterwards.
  double mach = 1.4, re = 1.57e6, pr = 1.0, tr = 1.0, gamma = 1.4;
  std::optional<double> cp, cv, mu_ref;
  std::map<std::string, int> seen;
  FlowConfig& f = c.flow;
  FlowConfig flow_extra = f;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string v = trim(body.substr(eq + 1));
    if (v.empty()) throw ConfigError("missing value for '" + key + "'", line);
    if (seen.count(key)) throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")", line);
    seen[key] = line;

    if (key == "gamma") gamma = to_double(v, line);
    else if (key == "mach_jet") mach = to_double(v, line);
    else if (key == "reynolds") re = to_double(v, line);
    else if (key == "pressure_ratio") pr = to_double(v, line);
    else if (key == "temperature_ratio") tr = to_double(v, line);
    else if (key == "cp") cp = to_double(v, line);
    else if (key == "cv") cv = to_double(v, line);
    else if (key == "mu_ref") mu_ref = to_double(v, line);
    else if (key == "prandtl") flow_extra.prandtl = to_double(v, line);
    else if (key == "prandtl_sgs") flow_extra.prandtl_sgs = to_double(v, line);
    else if (key == "dt") flow_extra.dt = to_double(v, line);
    else if (key == "sutherland_s1") flow_extra.sutherland_s1 = to_double(v, line);
    else if (key == "t_ref") flow_extra.t_ref = to_double(v, line);
    else if (key == "k2") flow_extra.k2 = to_double(v, line);
    else if (key == "k4") flow_extra.k4 = to_double(v, line);
    else if (key == "sgs_enabled") flow_extra.sgs_enabled = to_bool(v, line);
    else if (key == "jet_radius") flow_extra.jet_radius = to_double(v, line);
    else if (key == "jet_inflow") flow_extra.jet_inflow = to_bool(v, line);
    else if (key == "exit_pressure") flow_extra.exit_pressure = to_double(v, line);
    else if (key == "ambient_velocity") {
      const std::vector<double> a = to_list(v, 3, line);
      flow_extra.ambient_velocity = {a[0], a[1], a[2]};
    }
    else if (key == "n_axial") c.grid.n_axial = static_cast<int>(to_long(v, line));
    else if (key == "n_radial") c.grid.n_radial = static_cast<int>(to_long(v, line));
    else if (key == "n_azimuthal") c.grid.n_azimuthal = static_cast<int>(to_long(v, line));
    else if (key == "length_axial") c.grid.length_axial = to_double(v, line);
    else if (key == "height_radial") c.grid.height_radial = to_double(v, line);
    else if (key == "stretch_axial") c.grid.stretch_axial = to_double(v, line);
    else if (key == "stretch_radial") c.grid.stretch_radial = to_double(v, line);
    else if (key == "lip_radius") c.grid.lip_radius = to_double(v, line);
    else if (key == "npx") c.decomposition.npx = static_cast<int>(to_long(v, line));
    else if (key == "npz") c.decomposition.npz = static_cast<int>(to_long(v, line));
    else if (key == "iterations") c.plan.n_iterations = to_long(v, line);
    else if (key == "wall_clock_limit") c.plan.wall_clock_limit = to_double(v, line);
    else if (key == "output_every") c.plan.output_every = to_long(v, line);
    else if (key == "checkpoint_every") c.plan.checkpoint_every = to_long(v, line);
    else if (key == "stats_from") c.plan.stats_from = to_long(v, line);
    else if (key == "rk_alphas") {
      const std::vector<double> a = to_list(v, 5, line);
      std::copy(a.begin(), a.end(), c.plan.scheme.alphas.begin());
    }
    else throw ConfigError("unknown key '" + key + "'", line);
  }

  f = FlowConfig::jet(mach, re, pr, tr, gamma);
  f.prandtl = flow_extra.prandtl;
  f.prandtl_sgs = flow_extra.prandtl_sgs;
  f.dt = flow_extra.dt;
  f.sutherland_s1 = flow_extra.sutherland_s1;
  f.t_ref = flow_extra.t_ref;
  f.k2 = flow_extra.k2;
  f.k4 = flow_extra.k4;
  f.sgs_enabled = flow_extra.sgs_enabled;
  f.jet_radius = flow_extra.jet_radius;
  f.jet_inflow = flow_extra.jet_inflow;
  f.exit_pressure = flow_extra.exit_pressure;
  f.ambient_velocity = flow_extra.ambient_velocity;
  if (cp) f.cp = *cp;
  if (cv) f.cv = *cv;
  if (mu_ref) f.mu_ref = *mu_ref;
  f.validate();
  c.grid.validate();
  c.plan.scheme.validate();
  return c;
}

CaseConfig read_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open case file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_case(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_case(const CaseConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const FlowConfig& f = c.flow;
  os << "# flow\n";
  os << "gamma = " << f.gamma << "\nmach_jet = " << f.mach_jet << "\nreynolds = " << f.reynolds
     << "\npressure_ratio = " << f.pressure_ratio << "\ntemperature_ratio = " << f.temperature_ratio
     << "\nprandtl = " << f.prandtl << "\nprandtl_sgs = " << f.prandtl_sgs << "\ndt = " << f.dt
     << "\nsutherland_s1 = " << f.sutherland_s1 << "\nt_ref = " << f.t_ref << "\nmu_ref = " << f.mu_ref
     << "\ncp = " << f.cp << "\ncv = " << f.cv << "\nk2 = " << f.k2 << "\nk4 = " << f.k4
     << "\nsgs_enabled = " << (f.sgs_enabled ? "true" : "false") << "\njet_radius = " << f.jet_radius
     << "\njet_inflow = " << (f.jet_inflow ? "true" : "false") << "\nambient_velocity = " << f.ambient_velocity[0]
     << ", " << f.ambient_velocity[1] << ", " << f.ambient_velocity[2] << "\nexit_pressure = " << f.exit_pressure
     << "\n";
  os << "# grid\n";
  os << "n_axial = " << c.grid.n_axial << "\nn_radial = " << c.grid.n_radial << "\nn_azimuthal = "
     << c.grid.n_azimuthal << "\nlength_axial = " << c.grid.length_axial << "\nheight_radial = "
     << c.grid.height_radial << "\nstretch_axial = " << c.grid.stretch_axial << "\nstretch_radial = "
     << c.grid.stretch_radial << "\nlip_radius = " << c.grid.lip_radius << "\n";
  os << "# decomposition and run\n";
  os << "npx = " << c.decomposition.npx << "\nnpz = " << c.decomposition.npz << "\niterations = "
     << c.plan.n_iterations << "\nwall_clock_limit = " << c.plan.wall_clock_limit << "\noutput_every = "
     << c.plan.output_every << "\ncheckpoint_every = " << c.plan.checkpoint_every << "\nstats_from = "
     << c.plan.stats_from << "\nrk_alphas = ";
  for (std::size_t i = 0; i < 5; ++i) os << (i ? ", " : "") << c.plan.scheme.alphas[i];
  os << "\n";
  return os.str();
}

}  // namespace jetflow
