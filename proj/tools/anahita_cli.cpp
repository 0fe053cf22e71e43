// Command-line front end: mission runs, subsystem probes, telemetry plots.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "anahita/mission.hpp"

namespace fs = std::filesystem;
using namespace anahita;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct RunArgs {
  std::string scenario_path, plan_path, out_dir;
  std::uint64_t seed = 0;
  double dt = 0.01;
  double duration = 300.0;
  int jobs = 1;
};

int run_one(const Scenario& scenario, const MissionPlan& plan, SimConfig sim,
            const fs::path& telemetry_path, const fs::path& report_path) {
  std::ofstream telemetry(telemetry_path);
  if (!telemetry) throw ParseError("cannot write: " + telemetry_path.string());
  telemetry << telemetry_header() << "\n";
  const auto report =
      run_mission(plan, scenario, sim, [&](const TelemetryRow& row) {
        telemetry << telemetry_csv_row(row) << "\n";
      });
  std::ofstream rep(report_path);
  if (!rep) throw ParseError("cannot write: " + report_path.string());
  rep << report.to_text();
  return 0;
}

int cmd_run(const RunArgs& args) {
  const auto scenario = parse_scenario(ConfigFile::parse(read_file(args.scenario_path)));
  const auto plan = parse_plan(ConfigFile::parse(read_file(args.plan_path)));
  SimConfig sim;
  sim.dt = args.dt;
  sim.duration = args.duration;
  sim.seed = args.seed;
  sim.validate();
  fs::create_directories(args.out_dir);

  if (args.jobs <= 1) {
    return run_one(scenario, plan, sim, fs::path(args.out_dir) / "telemetry.csv",
                   fs::path(args.out_dir) / "report.txt");
  }

  // Independent seeds in parallel, one file pair per seed.
  std::vector<std::thread> workers;
  std::vector<int> codes(static_cast<size_t>(args.jobs), 0);
  for (int j = 0; j < args.jobs; ++j) {
    workers.emplace_back([&, j]() {
      SimConfig s = sim;
      s.seed = args.seed + static_cast<std::uint64_t>(j);
      const auto tag = std::to_string(s.seed);
      try {
        run_one(scenario, plan, s,
                fs::path(args.out_dir) / ("telemetry_" + tag + ".csv"),
                fs::path(args.out_dir) / ("report_" + tag + ".txt"));
      } catch (const DivergenceError&) {
        codes[static_cast<size_t>(j)] = kExitDiverged;
      }
    });
  }
  for (auto& w : workers) w.join();
  for (int c : codes)
    if (c != 0) return c;
  return 0;
}

int cmd_allocate(const std::vector<double>& tau_values) {
  const AllocationMatrix alloc(VehicleParams{});
  GeneralizedForce tau = GeneralizedForce::from_vec(
      (Vec6() << tau_values[0], tau_values[1], tau_values[2], tau_values[3],
       tau_values[4], tau_values[5])
          .finished());
  const auto result = alloc.allocate(tau, VehicleParams{}.t_max);
  std::ostringstream out;
  for (int i = 0; i < 8; ++i) {
    if (i) out << ' ';
    // snap allocation round-off so exact cases print exactly
    double v = result.thrusts[i];
    if (std::abs(v - std::round(v)) < 1e-12) v = std::round(v);
    out << v;
  }
  std::cout << out.str() << "\n";
  return 0;
}

int cmd_vision_enhance(const std::string& in_path, const std::string& out_path,
                       const vision::BlueFilterParams& params) {
  const auto img = vision::read_pnm(in_path);
  vision::write_pnm(vision::blue_filter(img, params), out_path);
  return 0;
}

int cmd_vision_detect(const std::string& in_path, const vision::DetectConfig& cfg,
                      double alpha, double beta) {
  const auto img = vision::read_pnm(in_path);
  const auto det = vision::detect(img, cfg);
  if (!det) {
    std::cout << "not found\n";
    return 0;
  }
  std::cout << det->cx << ' ' << det->cy << ' ' << det->blob_dim << ' ';
  if (beta > 0.0) {
    std::cout << vision::estimate_distance(det->blob_dim, {alpha, beta});
  } else {
    std::cout << '-';
  }
  std::cout << "\n";
  return 0;
}

Trace read_trace(const fs::path& path, double fs) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path.string());
  Trace t;
  t.fs = fs;
  double v;
  while (in >> v) t.samples.push_back(v);
  if (t.samples.empty()) throw ParseError("empty trace: " + path.string());
  return t;
}

void write_trace(const Trace& t, const fs::path& path) {
  std::ofstream out(path);
  out.precision(12);
  for (double v : t.samples) out << v << "\n";
}

int cmd_acoustics_locate(const std::string& dir) {
  const auto side = ConfigFile::parse(read_file((fs::path(dir) / "fs.cfg").string()));
  const double sample_rate = side.get_double("", "fs", 0.0);
  if (sample_rate <= 0.0) throw ParseError("fs.cfg must define fs");
  std::array<Trace, 4> traces;
  for (int ch = 0; ch < 4; ++ch) {
    traces[static_cast<size_t>(ch)] = read_trace(
        fs::path(dir) / ("ch" + std::to_string(ch) + ".txt"), sample_rate);
  }
  const auto geom = ArrayGeometry::square();
  const auto pairs = square_pairs(traces, geom);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", heading(pairs, geom));
  std::cout << buf << "\n";
  return 0;
}

int cmd_acoustics_synth(const std::string& dir, double azimuth_deg,
                        double distance, double snr_db, std::uint64_t seed) {
  fs::create_directories(dir);
  const auto geom = ArrayGeometry::square();
  PingConfig cfg;
  cfg.snr_db = snr_db;
  SensorRng rng(seed, 4);
  const double az = azimuth_deg * kPi / 180.0;
  const Vec3 pinger(distance * std::cos(az), distance * std::sin(az), 0.5);
  const auto traces = synth_ping(geom, pinger, cfg, rng);
  for (int ch = 0; ch < 4; ++ch) {
    write_trace(traces[static_cast<size_t>(ch)],
                fs::path(dir) / ("ch" + std::to_string(ch) + ".txt"));
  }
  std::ofstream side(fs::path(dir) / "fs.cfg");
  side << "fs = " << cfg.fs << "\n";
  return 0;
}

struct Series {
  std::string name;
  std::vector<double> values;
};

int cmd_plot(const std::string& csv_path, const std::string& out_path,
             std::vector<std::string> columns) {
  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open: " + csv_path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError("empty csv");
  std::vector<std::string> header;
  {
    std::istringstream h(header_line);
    std::string field;
    while (std::getline(h, field, ',')) header.push_back(field);
  }
  if (columns.empty()) columns = {"z", "psi"};
  std::vector<size_t> idx;
  for (const auto& c : columns) {
    auto it = std::find(header.begin(), header.end(), c);
    if (it == header.end()) throw ParseError("unknown column: " + c);
    idx.push_back(static_cast<size_t>(it - header.begin()));
  }

  std::vector<double> t;
  std::vector<Series> series(columns.size());
  for (size_t i = 0; i < columns.size(); ++i) series[i].name = columns[i];
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != header.size()) continue;
    t.push_back(std::stod(fields[0]));
    for (size_t i = 0; i < idx.size(); ++i)
      series[i].values.push_back(std::stod(fields[idx[i]]));
  }
  if (t.empty()) throw ParseError("no data rows in " + csv_path);

  const int w = 800, h = 400, pad = 40;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h * series.size() << "\">\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (size_t s = 0; s < series.size(); ++s) {
    double lo = series[s].values[0], hi = lo;
    for (double v : series[s].values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double y0 = static_cast<double>(s) * h;
    svg << "<text x=\"" << pad << "\" y=\"" << y0 + 16
        << "\" font-size=\"12\">" << series[s].name << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"" << colors[s % 4]
        << "\" stroke-width=\"1\" points=\"";
    for (size_t i = 0; i < t.size(); ++i) {
      const double px = pad + (t[i] - t.front()) / (t.back() - t.front()) *
                                  (w - 2 * pad);
      const double py = y0 + h - pad -
                        (series[s].values[i] - lo) / (hi - lo) * (h - 2 * pad);
      svg << px << ',' << py << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot write: " + out_path);
  out << svg.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anahita AUV simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "simulate a mission");
  run->add_option("--scenario", run_args.scenario_path, "scenario config")->required();
  run->add_option("--plan", run_args.plan_path, "mission plan")->required();
  run->add_option("--seed", run_args.seed, "master RNG seed");
  run->add_option("--dt", run_args.dt, "integration step, s");
  run->add_option("--duration", run_args.duration, "sim time budget, s");
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  run->add_option("--jobs", run_args.jobs, "parallel seeds");

  std::vector<double> tau_values;
  auto* alloc_cmd = app.add_subcommand("allocate", "thrust allocation probe");
  alloc_cmd->add_option("--tau", tau_values, "wrench: fx fy fz mx my mz")
      ->expected(6)
      ->required();

  auto* vis = app.add_subcommand("vision", "vision pipeline tools");
  vis->require_subcommand(1);
  std::string vis_in, vis_out;
  vision::BlueFilterParams enhance_params;
  auto* enhance = vis->add_subcommand("enhance", "white balance + CLAHE");
  enhance->add_option("--in", vis_in, "input PPM/PGM")->required();
  enhance->add_option("--out", vis_out, "output PPM/PGM")->required();
  enhance->add_option("--discard", enhance_params.discard_ratio, "WB discard ratio");
  enhance->add_option("--clip", enhance_params.clip_limit, "CLAHE clip limit");

  vision::DetectConfig detect_cfg;
  double calib_alpha = 0.0, calib_beta = 0.0;
  auto* det = vis->add_subcommand("detect", "threshold + blob detection");
  det->add_option("--in", vis_in, "input PPM")->required();
  det->add_option("--hue-min", detect_cfg.hue_min, "HSV hue low, deg");
  det->add_option("--hue-max", detect_cfg.hue_max, "HSV hue high, deg");
  det->add_option("--sat-min", detect_cfg.sat_min, "HSV saturation low");
  det->add_option("--val-min", detect_cfg.val_min, "HSV value low");
  det->add_option("--min-area", detect_cfg.min_area, "component area floor, px");
  det->add_option("--alpha", calib_alpha, "distance calibration alpha, m");
  det->add_option("--beta", calib_beta, "distance calibration beta, 1/px");

  auto* ac = app.add_subcommand("acoustics", "hydrophone array tools");
  ac->require_subcommand(1);
  std::string trace_dir;
  auto* locate = ac->add_subcommand("locate", "bearing from recorded traces");
  locate->add_option("--traces", trace_dir, "directory with ch0..ch3.txt + fs.cfg")
      ->required();
  double synth_az = 0.0, synth_dist = 10.0, synth_snr = 40.0;
  std::uint64_t synth_seed = 0;
  std::string synth_dir;
  auto* synth = ac->add_subcommand("synth", "write synthetic ping traces");
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--azimuth", synth_az, "pinger azimuth, deg");
  synth->add_option("--distance", synth_dist, "pinger range, m");
  synth->add_option("--snr", synth_snr, "per-channel SNR, dB");
  synth->add_option("--seed", synth_seed, "noise seed");

  std::string plot_csv, plot_out;
  std::vector<std::string> plot_cols;
  auto* plot = app.add_subcommand("plot", "telemetry columns to SVG");
  plot->add_option("--telemetry", plot_csv, "telemetry csv")->required();
  plot->add_option("--out", plot_out, "output SVG")->required();
  plot->add_option("--columns", plot_cols, "column names (default z psi)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : 0;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (alloc_cmd->parsed()) return cmd_allocate(tau_values);
    if (enhance->parsed())
      return cmd_vision_enhance(vis_in, vis_out, enhance_params);
    if (det->parsed())
      return cmd_vision_detect(vis_in, detect_cfg, calib_alpha, calib_beta);
    if (locate->parsed()) return cmd_acoustics_locate(trace_dir);
    if (synth->parsed())
      return cmd_acoustics_synth(synth_dir, synth_az, synth_dist, synth_snr,
                                 synth_seed);
    if (plot->parsed()) return cmd_plot(plot_csv, plot_out, plot_cols);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
