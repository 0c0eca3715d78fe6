// jetflow command-line driver: partition, run, stats, bench, report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jetflow/bench.hpp"
#include "jetflow/config.hpp"
#include "jetflow/integrate.hpp"
#include "jetflow/stats.hpp"
#include "jetflow/storage.hpp"

using namespace jetflow;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw StorageError("cannot write " + path.string());
  out << text;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (double x : parse_doubles(s)) v.push_back(static_cast<int>(x));
  return v;
}

// ---------------------------------------------------------------- partition

struct PartitionArgs {
  std::string case_file;
  std::string out;
  std::string host = "127.0.0.1";
  int base_port = 47000;
  bool metrics = true;
};

int cmd_partition(const PartitionArgs& a) {
  const CaseConfig c = read_case(a.case_file);
  const PartitionTopology topo = build_topology(c.grid.dims(), c.decomposition);
  fs::create_directories(a.out);
  const CoordinateField coords = generate(c.grid);
  const Manifest m = make_manifest(c.grid, topo, c.flow.hash(), a.host, a.base_port);
  for (const ManifestEntry& e : m.entries) {
    write_partition(fs::path(a.out) / e.file,
                    make_partition_file(coords, topo, e.partition.id, m.grid_hash, m.flow_hash, a.metrics));
  }
  write_manifest(fs::path(a.out) / "manifest.txt", m);
  write_text(fs::path(a.out) / "case.cfg", format_case(c));
  std::printf("%d partitions (%d x %d) of a %d x %d x %d grid written to %s\n", topo.spec.workers(), topo.spec.npx,
              topo.spec.npz, c.grid.n_axial, c.grid.n_radial, c.grid.n_azimuthal, a.out.c_str());
  for (const Partition& p : topo.parts) {
    std::printf("  partition %d: i [%d, %d) k [%d, %d)\n", p.id, p.layout.i_begin, p.layout.i_end, p.layout.k_begin,
                p.layout.k_end);
  }
  return 0;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string dir;
  std::string case_file;
  std::string output;
  long iterations = -1;
  double wall_clock = -1.0;
  long output_every = -1;
  long checkpoint_every = -1;
  long stats_from = -2;
  bool restart = false;
  std::string transport = "shared";
  int rank = -1;
  std::string vtk;
};

struct LoadedCase {
  Manifest manifest;
  CaseConfig config;
  RunCase run;
};

LoadedCase load_case(const RunArgs& a, bool only_rank) {
  LoadedCase l;
  const fs::path dir(a.dir);
  l.manifest = read_manifest(dir / "manifest.txt");
  l.config = read_case(a.case_file.empty() ? dir / "case.cfg" : fs::path(a.case_file));
  if (l.config.flow.hash() != l.manifest.flow_hash) {
    throw ConfigError("the case file's flow configuration does not match the manifest (hash " +
                      hex64(l.config.flow.hash()) + " vs " + hex64(l.manifest.flow_hash) + ")");
  }
  l.run.topology = l.manifest.topology();
  l.run.cfg = l.config.flow;
  l.run.grid_hash = l.manifest.grid_hash;
  l.run.workers.resize(l.manifest.entries.size());
  for (const ManifestEntry& e : l.manifest.entries) {
    if (only_rank && e.partition.id != a.rank) continue;
    PartitionFile f = read_partition(dir / e.file, e.partition);
    if (f.grid_hash != l.manifest.grid_hash) {
      throw ExtentMismatchError(e.file + " was generated for a different grid");
    }
    l.run.workers[static_cast<std::size_t>(e.partition.id)].coords = std::move(f.coords);
  }
  return l;
}

RunPlan make_plan(const RunArgs& a, const CaseConfig& c) {
  RunPlan plan = c.plan;
  if (a.iterations >= 0) plan.n_iterations = a.iterations;
  if (a.wall_clock >= 0.0) plan.wall_clock_limit = a.wall_clock;
  if (a.output_every >= 0) plan.output_every = a.output_every;
  if (a.checkpoint_every >= 0) plan.checkpoint_every = a.checkpoint_every;
  if (a.stats_from >= -1) plan.stats_from = a.stats_from;
  plan.output_dir = a.output.empty() ? fs::path(a.dir) / "run" : fs::path(a.output);
  plan.checkpoint_at_end = true;
  plan.restart = a.restart;
  plan.restart_dir = plan.output_dir;
  fs::create_directories(plan.output_dir);
  return plan;
}

int cmd_run(const RunArgs& a) {
  const bool single = a.rank >= 0;
  LoadedCase l = load_case(a, single);
  const RunPlan plan = make_plan(a, l.config);

  if (single) {
    // One worker of a multi-process run; peers are listed in the manifest.
    if (a.rank >= static_cast<int>(l.manifest.entries.size())) throw ConfigError("rank outside the manifest");
    std::vector<Endpoint> endpoints;
    for (const ManifestEntry& e : l.manifest.entries) endpoints.push_back(e.endpoint);
    const Endpoint& me = endpoints[static_cast<std::size_t>(a.rank)];
    SocketTransport t(a.rank, endpoints, SocketListener(me.host, me.port));
    const WorkerResult w = run_worker(plan, l.run, a.rank, t);
    double mean = 0.0;
    for (double s : w.iteration_seconds) mean += s;
    if (!w.iteration_seconds.empty()) mean /= static_cast<double>(w.iteration_seconds.size());
    std::printf("rank %d: iterations %ld..%ld, %.4f s per iteration, %ld exit fallbacks\n", a.rank,
                w.first_iteration, w.last_iteration, mean, w.exit_fallbacks);
    return 0;
  }

  RunResult r;
  if (a.transport == "shared") {
    r = run(plan, l.run);
  } else if (a.transport == "socket") {
    std::vector<Endpoint> endpoints;
    for (const ManifestEntry& e : l.manifest.entries) endpoints.push_back({e.endpoint.host, 0});
    r = run_sockets(plan, l.run, endpoints);
  } else {
    throw ConfigError("unknown transport '" + a.transport + "' (shared or socket)");
  }
  std::printf("iterations %ld..%ld%s, %.4f s per iteration (first %zu discarded), %ld exit fallbacks\n",
              r.first_iteration, r.last_iteration, r.stopped_by_wall_clock ? " (wall-clock stop)" : "",
              r.mean_iteration_seconds(std::min<std::size_t>(5, r.iteration_seconds.size() / 2)),
              std::min<std::size_t>(5, r.iteration_seconds.size() / 2), r.exit_fallbacks);
  std::printf("checkpoints in %s\n", plan.output_dir.string().c_str());
  if (!a.vtk.empty()) {
    export_vtk(a.vtk, generate(l.manifest.grid), r.global, l.config.flow);
    std::printf("VTK field written to %s\n", a.vtk.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string dir;
  std::string output;
  std::string out;
  std::string stations = "2.5,5.0";
  long from = 0;
};

std::string polyline_svg(const std::string& title, const std::string& xlabel,
                         const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  double xmax = 1e-12, ymax = 1e-12, ymin = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.second) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
      ymin = std::min(ymin, y);
    }
  ymax *= 1.1;
  const double w = 640, h = 420, l = 70, r = 140, t = 40, b = 60, pw = w - l - r, ph = h - t - b;
  auto px = [&](double x) { return l + pw * x / xmax; };
  auto py = [&](double y) { return t + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << l + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
     << "<line x1=\"" << l << "\" y1=\"" << t + ph << "\" x2=\"" << l + pw << "\" y2=\"" << t + ph
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << t + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double x = xmax * k / 5, y = ymin + (ymax - ymin) * k / 5;
    os << "<text x=\"" << px(x) << "\" y=\"" << t + ph + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << std::round(x * 100) / 100 << "</text>\n"
       << "<text x=\"" << l - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << std::round(y * 1000) / 1000 << "</text>\n";
  }
  os << "<text x=\"" << l + pw / 2 << "\" y=\"" << h - 16 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
     << "</text>\n";
  for (std::size_t n = 0; n < series.size(); ++n) {
    const char* color = colors[n % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[n].second) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n<text x=\"" << l + pw + 10 << "\" y=\"" << t + 16 + 18 * n << "\" font-size=\"12\" fill=\"" << color
       << "\">" << series[n].first << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int cmd_stats(const StatsArgs& a) {
  const fs::path dir(a.dir);
  const Manifest m = read_manifest(dir / "manifest.txt");
  const CaseConfig c = read_case(dir / "case.cfg");
  const fs::path run_dir = a.output.empty() ? dir / "run" : fs::path(a.output);
  const GridDims dims = m.grid.dims();

  // Per iteration, the axial velocity assembled from every partition's snapshot.
  std::map<long, std::vector<double>> frames;
  std::map<long, int> parts_seen;
  for (const ManifestEntry& e : m.entries) {
    for (const Snapshot& s : read_snapshots(solution_path(run_dir, e.partition.id))) {
      if (s.iteration < a.from) continue;
      if (!(s.layout == e.partition.layout)) throw ExtentMismatchError("snapshot extents differ from the manifest");
      auto& f = frames[s.iteration];
      if (f.empty()) f.assign(static_cast<std::size_t>(dims.points()), 0.0);
      const std::vector<double> u = axial_velocity(s.q);
      const BlockLayout& b = s.layout;
      for (int gk = b.k_begin; gk < b.k_end; ++gk)
        for (int gi = b.i_begin; gi < b.i_end; ++gi)
          for (int j = 0; j < b.nj(); ++j) {
            const std::size_t n = (static_cast<std::size_t>(gk) * dims.ni + gi) * dims.nj + j;
            f[n] = u[n];
          }
      ++parts_seen[s.iteration];
    }
  }
  RunningMoments moments(dims);
  for (const auto& [it, f] : frames) {
    if (parts_seen[it] != static_cast<int>(m.entries.size())) {
      std::fprintf(stderr, "skipping iteration %ld: only %d of %zu partitions wrote it\n", it, parts_seen[it],
                   m.entries.size());
      continue;
    }
    moments.add(f);
  }
  if (moments.count() == 0) throw StorageError("no complete snapshots in " + run_dir.string());

  const std::vector<double> x = axial_stations(m.grid), radii = radial_stations(m.grid);
  const double uj = c.flow.jet_velocity();
  fs::create_directories(a.out);
  std::ostringstream csv;
  csv.precision(10);
  csv << "station,plane_x,r,u_mean,u_rms\n";
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> mean_series, rms_series;
  for (double st : parse_doubles(a.stations)) {
    const RadialProfile pm = extract_profile(moments, x, radii, st, ProfileQuantity::Mean, uj);
    const RadialProfile pr = extract_profile(moments, x, radii, st, ProfileQuantity::Rms, uj);
    std::vector<std::pair<double, double>> sm, sr;
    for (std::size_t j = 0; j < pm.radii.size(); ++j) {
      csv << st << ',' << pm.plane_x << ',' << pm.radii[j] << ',' << pm.values[j] << ',' << pr.values[j] << '\n';
      if (pm.radii[j] <= 3.0) {
        sm.emplace_back(pm.radii[j], pm.values[j]);
        sr.emplace_back(pr.radii[j], pr.values[j]);
      }
    }
    std::ostringstream label;
    label << "x/D = " << st;
    mean_series.emplace_back(label.str(), sm);
    rms_series.emplace_back(label.str(), sr);
  }
  write_text(fs::path(a.out) / "profiles.csv", csv.str());
  write_text(fs::path(a.out) / "profile_mean.svg", polyline_svg("Mean axial velocity <U>/Uj", "r/D", mean_series));
  write_text(fs::path(a.out) / "profile_rms.svg", polyline_svg("Axial velocity RMS u*/Uj", "r/D", rms_series));

  const std::vector<double> plane = azimuthal_mean_plane(dims, moments.means());
  const std::vector<CoreSample> core = potential_core(plane, x, radii, uj);
  std::ostringstream cc;
  cc << "x,core_radius,on_axis\n";
  for (const CoreSample& s : core) cc << s.x << ',' << s.radius << ',' << (s.on_axis ? 1 : 0) << '\n';
  write_text(fs::path(a.out) / "core.csv", cc.str());
  std::printf("%lld snapshots averaged; potential core length %.3f D; tables in %s\n", moments.count(),
              potential_core_length(core), a.out.c_str());
  return 0;
}

// ---------------------------------------------------------------- bench and report

struct BenchArgs {
  int meshes = 1;
  std::string workers = "1,2,4,8";
  long iterations = 1000;
  std::size_t warmup = 5;
  double cap = 0.0;
  std::string synthetic = "none";
  std::string starts;
  std::string out = "bench";
};

int cmd_bench(const BenchArgs& a) {
  SweepPlan plan;
  plan.meshes = desk_mesh_family(a.meshes);
  plan.workers = parse_ints(a.workers);
  plan.iterations = a.iterations;
  plan.warmup = a.warmup;
  plan.wall_clock_cap = a.cap;
  if (!a.starts.empty()) {
    const std::vector<int> s = parse_ints(a.starts);
    for (std::size_t n = 0; n < plan.meshes.size() && n < s.size(); ++n) plan.meshes[n].start = s[n];
  }
  if (a.synthetic == "linear") {
    plan.synthetic = [](const MeshCase& m, const PartitionSpec& s) {
      return 1e-6 * static_cast<double>(m.grid.total_points()) / s.workers();
    };
  } else if (a.synthetic == "superlinear") {
    plan.synthetic = [](const MeshCase& m, const PartitionSpec& s) {
      return 1e-6 * static_cast<double>(m.grid.total_points()) / std::pow(s.workers(), 1.1);
    };
  } else if (a.synthetic != "none") {
    throw ConfigError("unknown synthetic timing model '" + a.synthetic + "'");
  }
  const SweepResult r = run_sweep(plan);
  report(r, a.out);
  for (const ScalingRecord& rec : r.records) {
    std::printf("%s N=%d %dx%d %.5f s/iteration%s\n", rec.mesh.c_str(), rec.workers, rec.npx, rec.npz, rec.seconds,
                rec.selected ? " *" : "");
  }
  for (const SkippedCandidate& s : r.skipped) {
    std::printf("%s N=%d %dx%d skipped: %s\n", s.mesh.c_str(), s.workers, s.npx, s.npz, s.reason.c_str());
  }
  std::printf("report written to %s\n", a.out.c_str());
  return 0;
}

int cmd_report(const std::string& csv, const std::string& out) {
  std::ifstream in(csv);
  if (!in) throw StorageError("cannot open " + csv);
  std::stringstream ss;
  ss << in.rdbuf();
  const SweepResult r = parse_csv(ss.str());
  fs::create_directories(out);
  write_text(fs::path(out) / "speedup.svg", render_svg(r, false));
  write_text(fs::path(out) / "efficiency.svg", render_svg(r, true));
  std::printf("%zu records, %zu meshes; charts written to %s\n", r.records.size(), r.meshes.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel LES solver for compressible round jets"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* p = app.add_subcommand("partition", "Generate the grid, split it and write the manifest and partition files");
  p->add_option("--case", pa.case_file, "Case file (key = value)")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pa.out, "Output directory")->required();
  p->add_option("--host", pa.host, "Host written into the manifest endpoints");
  p->add_option("--base-port", pa.base_port, "Port of partition 0; partition n listens on base + n");
  p->add_flag("!--no-metrics", pa.metrics, "Store coordinates only");

  RunArgs ra;
  auto* r = app.add_subcommand("run", "Advance a partitioned case in time");
  r->add_option("--dir", ra.dir, "Directory written by 'partition'")->required()->check(CLI::ExistingDirectory);
  r->add_option("--case", ra.case_file, "Case file (default DIR/case.cfg)");
  r->add_option("--output", ra.output, "Snapshot and checkpoint directory (default DIR/run)");
  r->add_option("--iterations", ra.iterations, "Number of iterations");
  r->add_option("--wall-clock", ra.wall_clock, "Wall-clock limit in seconds");
  r->add_option("--output-every", ra.output_every, "Snapshot cadence in iterations");
  r->add_option("--checkpoint-every", ra.checkpoint_every, "Checkpoint cadence in iterations");
  r->add_option("--stats-from", ra.stats_from, "First iteration accumulated into statistics");
  r->add_flag("--restart", ra.restart, "Resume from the checkpoints in the output directory");
  r->add_option("--transport", ra.transport, "shared (threads) or socket (loopback TCP)")
      ->check(CLI::IsMember({"shared", "socket"}));
  r->add_option("--rank", ra.rank, "Run only this partition over TCP using the manifest endpoints");
  r->add_option("--vtk", ra.vtk, "Write the final field as a VTK structured grid");

  StatsArgs sa;
  auto* s = app.add_subcommand("stats", "Time and azimuthal averages of a snapshot series");
  s->add_option("--dir", sa.dir, "Directory written by 'partition'")->required()->check(CLI::ExistingDirectory);
  s->add_option("--output", sa.output, "Run directory holding the snapshots (default DIR/run)");
  s->add_option("--out", sa.out, "Directory for profile tables and charts")->required();
  s->add_option("--stations", sa.stations, "Axial stations x/D, comma separated");
  s->add_option("--from", sa.from, "First iteration to include");

  BenchArgs ba;
  auto* b = app.add_subcommand("bench", "Strong-scaling sweep over the desk mesh family");
  b->add_option("--meshes", ba.meshes, "Number of meshes, starting at mesh A")->check(CLI::Range(1, 9));
  b->add_option("--workers", ba.workers, "Worker counts, comma separated");
  b->add_option("--iterations", ba.iterations, "Iterations per run");
  b->add_option("--warmup", ba.warmup, "Leading iterations excluded from the mean");
  b->add_option("--cap", ba.cap, "Wall-clock cap per run in seconds");
  b->add_option("--starts", ba.starts, "Scalability starting point per mesh, comma separated");
  b->add_option("--synthetic", ba.synthetic, "none, linear or superlinear timing model");
  b->add_option("--out", ba.out, "Report directory");

  std::string report_csv, report_out;
  auto* rep = app.add_subcommand("report", "Redraw speedup and efficiency charts from a scaling CSV");
  rep->add_option("--csv", report_csv, "scaling.csv written by 'bench'")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", report_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*p) return cmd_partition(pa);
    if (*r) return cmd_run(ra);
    if (*s) return cmd_stats(sa);
    if (*b) return cmd_bench(ba);
    if (*rep) return cmd_report(report_csv, report_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "jetflow: %s\n", e.what());
    return 1;
  }
  return 0;
}
