#include "jetflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "jetflow/integrate.hpp"

namespace jetflow {

void SweepPlan::validate() const {
  if (workers.empty()) throw ConfigError("the sweep needs at least one worker count");
  if (iterations < 1) throw ConfigError("the sweep needs at least one iteration per run");
  for (const MeshCase& m : meshes) {
    if (std::find(workers.begin(), workers.end(), m.start) == workers.end()) {
      throw ConfigError("starting point " + std::to_string(m.start) + " of mesh " + m.id +
                        " is not among the worker counts");
    }
  }
}

std::vector<MeshCase> desk_mesh_family(int count) {
  static const int axial[] = {32, 64, 64, 128, 128, 256, 256, 512};
  static const int radial[] = {32, 32, 64, 64, 128, 128, 256, 256};
  std::vector<MeshCase> out;
  for (int m = 0; m < count && m < 8; ++m) {
    MeshCase c;
    c.id = std::string(1, static_cast<char>('A' + m));
    c.grid.n_axial = axial[m];
    c.grid.n_radial = radial[m];
    c.grid.n_azimuthal = 91;
    out.push_back(c);
  }
  return out;
}

std::vector<int> azimuthal_candidates(int workers) {
  std::vector<int> out;
  for (int d = 1; d <= workers; ++d)
    if (workers % d == 0) out.push_back(d);
  return out;
}

void select_fastest(std::vector<ScalingRecord>& records) {
  std::map<std::pair<std::string, int>, std::size_t> best;
  for (std::size_t r = 0; r < records.size(); ++r) {
    records[r].selected = false;
    const auto key = std::make_pair(records[r].mesh, records[r].workers);
    auto it = best.find(key);
    if (it == best.end()) {
      best[key] = r;
      continue;
    }
    const ScalingRecord& cur = records[it->second];
    if (records[r].seconds < cur.seconds || (records[r].seconds == cur.seconds && records[r].npz < cur.npz)) {
      it->second = r;
    }
  }
  for (const auto& [key, r] : best) records[r].selected = true;
}

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  SweepResult out;
  out.meshes = plan.meshes;
  for (const MeshCase& mesh : plan.meshes) {
    std::optional<CoordinateField> coords;
    for (int n : plan.workers) {
      for (int npz : azimuthal_candidates(n)) {
        const PartitionSpec spec{n / npz, npz};
        PartitionTopology topo;
        try {
          topo = build_topology(mesh.grid.dims(), spec);
        } catch (const PartitionError& e) {
          out.skipped.push_back({mesh.id, n, spec.npx, spec.npz, e.what()});
          continue;
        }
        ScalingRecord rec{mesh.id, n, spec.npx, spec.npz, 0.0, plan.iterations, false};
        if (plan.synthetic) {
          rec.seconds = plan.synthetic(mesh, spec);
        } else {
          if (!coords) coords = generate(mesh.grid);
          RunPlan rp;
          rp.n_iterations = plan.iterations;
          rp.wall_clock_limit = plan.wall_clock_cap;
          RunCase rc{topo, plan.cfg, mesh.grid.hash(), split_coordinates(*coords, topo)};
          try {
            const RunResult r = run(rp, rc);
            rec.seconds = r.mean_iteration_seconds(plan.warmup);
            rec.iterations = static_cast<long>(r.iteration_seconds.size());
          } catch (const DivergenceError& e) {
            out.skipped.push_back({mesh.id, n, spec.npx, spec.npz, std::string("diverged: ") + e.what()});
            continue;
          }
        }
        out.records.push_back(rec);
      }
    }
  }
  select_fastest(out.records);
  return out;
}

namespace {

const ScalingRecord& selected_record(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers) {
  for (const ScalingRecord& r : records)
    if (r.selected && r.mesh == mesh && r.workers == workers) return r;
  throw IncompleteSweepError("no selected record for mesh " + mesh + " at " + std::to_string(workers) + " workers");
}

int start_of(const SweepResult& s, const std::string& mesh) {
  for (const MeshCase& m : s.meshes)
    if (m.id == mesh) return m.start;
  return 1;
}

std::string number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

double speedup(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start) {
  const ScalingRecord& base = selected_record(records, mesh, start);
  const ScalingRecord& at = selected_record(records, mesh, workers);
  return base.seconds / at.seconds;
}

double efficiency(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start) {
  return speedup(records, mesh, workers, start) / static_cast<double>(workers);
}

double shifted_efficiency(const std::vector<ScalingRecord>& records, const std::string& mesh, int workers, int start) {
  return speedup(records, mesh, workers, start) * static_cast<double>(start) / static_cast<double>(workers);
}

std::string format_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "mesh,workers,npx,npz,seconds,iterations,speedup,efficiency,efficiency_shifted,selected,start\n";
  for (const ScalingRecord& r : s.records) {
    const int start = start_of(s, r.mesh);
    double sp = std::numeric_limits<double>::quiet_NaN();
    try {
      sp = selected_record(s.records, r.mesh, start).seconds / r.seconds;
    } catch (const IncompleteSweepError&) {
    }
    os << r.mesh << ',' << r.workers << ',' << r.npx << ',' << r.npz << ',' << number(r.seconds) << ',' << r.iterations
       << ',' << number(sp) << ',' << number(sp / r.workers) << ',' << number(sp * start / r.workers) << ','
       << (r.selected ? 1 : 0) << ',' << start << '\n';
  }
  return os.str();
}

SweepResult parse_csv(const std::string& text) {
  SweepResult s;
  std::istringstream in(text);
  std::string line;
  int number_line = 0;
  std::map<std::string, int> starts;
  while (std::getline(in, line)) {
    ++number_line;
    if (number_line == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw ConfigError("expected 11 columns, found " + std::to_string(f.size()), number_line);
    try {
      ScalingRecord r;
      r.mesh = f[0];
      r.workers = std::stoi(f[1]);
      r.npx = std::stoi(f[2]);
      r.npz = std::stoi(f[3]);
      r.seconds = std::stod(f[4]);
      r.iterations = std::stol(f[5]);
      r.selected = f[9] == "1";
      starts[r.mesh] = std::stoi(f[10]);
      s.records.push_back(r);
    } catch (const std::exception&) {
      throw ConfigError("malformed number in scaling record", number_line);
    }
  }
  for (const auto& [id, start] : starts) s.meshes.push_back({id, GridSpec{}, start});
  return s;
}

std::string render_svg(const SweepResult& s, bool efficiency_chart) {
  const double width = 640, height = 440, left = 70, right = 150, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  struct Series {
    std::string mesh;
    int start;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series;
  double max_n = 1, max_y = efficiency_chart ? 1.0 : 1.0;
  for (const MeshCase& m : s.meshes) {
    Series se{m.id, m.start, {}};
    std::set<int> counts;
    for (const ScalingRecord& r : s.records)
      if (r.mesh == m.id && r.selected) counts.insert(r.workers);
    for (int n : counts) {
      double y;
      try {
        y = efficiency_chart ? efficiency(s.records, m.id, n, m.start) : speedup(s.records, m.id, n, m.start);
      } catch (const IncompleteSweepError&) {
        continue;
      }
      se.points.emplace_back(n, y);
      max_n = std::max(max_n, static_cast<double>(n));
      max_y = std::max(max_y, y);
    }
    series.push_back(se);
  }
  if (!efficiency_chart) max_y = std::max(max_y, max_n);
  max_y *= 1.1;
  auto px = [&](double n) { return left + plot_w * n / max_n; };
  auto py = [&](double y) { return top + plot_h * (1.0 - y / max_y); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << (efficiency_chart ? "Parallel efficiency" : "Speedup") << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double n = max_n * t / 5.0, y = max_y * t / 5.0;
    os << "<text x=\"" << px(n) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << number(std::round(n * 10) / 10) << "</text>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << number(std::round(y * 100) / 100) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << "workers N</text>\n";
  os << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << top + plot_h / 2 << ")\">" << (efficiency_chart ? "eta = Sp/N" : "Sp") << "</text>\n";

  // Ideal line: Sp = N / s, eta = 1 (drawn for s = 1).
  os << "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"6 4\" points=\"";
  if (efficiency_chart) {
    os << px(0) << ',' << py(1.0) << ' ' << px(max_n) << ',' << py(1.0);
  } else {
    os << px(0) << ',' << py(0.0) << ' ' << px(max_n) << ',' << py(max_n);
  }
  os << "\"/>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& se = series[i];
    const char* color = colors[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [n, y] : se.points) os << px(n) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (const auto& [n, y] : se.points)
      os << "<circle cx=\"" << px(n) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(i);
    os << "<line x1=\"" << left + plot_w + 14 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 34 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">mesh " << se.mesh
       << " (s=" << se.start << ")</text>\n";
  }
  const double ly = top + 16 + 18 * static_cast<double>(series.size());
  os << "<line x1=\"" << left + plot_w + 14 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 34 << "\" y2=\"" << ly
     << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  os << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">ideal</text>\n";
  os << "</svg>\n";
  return os.str();
}

void report(const SweepResult& sweep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) throw StorageError("cannot write " + (dir / name).string());
    out << text;
  };
  write("scaling.csv", format_csv(sweep));
  write("speedup.svg", render_svg(sweep, false));
  write("efficiency.svg", render_svg(sweep, true));
}

}  // namespace jetflow
