#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "anahita/vision.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("ANAHITA_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string scenarios() {
  const char* p = std::getenv("ANAHITA_SCENARIOS");
  REQUIRE(p != nullptr);
  return p;
}

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& args) {
  const std::string out_path =
      (fs::temp_directory_path() / "anahita_cli_out.txt").string();
  const std::string cmd =
      "\"" + cli() + "\" " + args + " > \"" + out_path + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("allocate prints the pure-surge example") {
  const auto r = run_cmd("allocate --tau 2 0 0 0 0 0");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1 1 0 0 0 0 0 0\n");
}

TEST_CASE("allocate requires six wrench values") {
  const auto r = run_cmd("allocate --tau 1 2 3");
  CHECK(r.exit_code != 0);
}

TEST_CASE("run writes telemetry and report with exit 0") {
  const fs::path out = fs::temp_directory_path() / "anahita_run1";
  fs::remove_all(out);
  const auto r = run_cmd("run --scenario \"" + scenarios() +
                         "/depth_hold.cfg\" --plan \"" + scenarios() +
                         "/depth_hold_plan.cfg\" --seed 7 --duration 10 --out \"" +
                         out.string() + "\"");
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out / "telemetry.csv"));
  REQUIRE(fs::exists(out / "report.txt"));

  std::ifstream csv(out / "telemetry.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.substr(0, 14) == "t,x,y,z,phi,th");
  // t strictly increasing
  double prev_t = -1.0;
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    CHECK(t > prev_t);
    prev_t = t;
    ++rows;
  }
  CHECK(rows == 1000);

  const auto report = slurp(out / "report.txt");
  CHECK(report.find("task 1 buoy:") != std::string::npos);
}

TEST_CASE("same seed twice gives byte-identical telemetry") {
  const fs::path a = fs::temp_directory_path() / "anahita_run_a";
  const fs::path b = fs::temp_directory_path() / "anahita_run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string base = "run --scenario \"" + scenarios() +
                           "/depth_hold.cfg\" --plan \"" + scenarios() +
                           "/depth_hold_plan.cfg\" --seed 11 --duration 8 --out ";
  CHECK(run_cmd(base + "\"" + a.string() + "\"").exit_code == 0);
  CHECK(run_cmd(base + "\"" + b.string() + "\"").exit_code == 0);
  const auto ta = slurp(a / "telemetry.csv");
  CHECK(ta == slurp(b / "telemetry.csv"));
  CHECK(!ta.empty());
}

TEST_CASE("missing scenario exits 2 with a message") {
  const auto r = run_cmd(
      "run --scenario /nonexistent.cfg --plan /also_missing.cfg --out /tmp/x");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("malformed plan exits 2") {
  const fs::path plan = fs::temp_directory_path() / "bad_plan.cfg";
  std::ofstream(plan) << "[task.1]\nkind = juggling\n";
  const auto r = run_cmd("run --scenario \"" + scenarios() +
                         "/depth_hold.cfg\" --plan \"" + plan.string() +
                         "\" --out /tmp/anahita_bad");
  CHECK(r.exit_code == 2);
}

TEST_CASE("parallel jobs write one file pair per seed") {
  const fs::path out = fs::temp_directory_path() / "anahita_jobs";
  fs::remove_all(out);
  const auto r = run_cmd("run --scenario \"" + scenarios() +
                         "/depth_hold.cfg\" --plan \"" + scenarios() +
                         "/depth_hold_plan.cfg\" --seed 3 --duration 5 --jobs 2 "
                         "--out \"" + out.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "telemetry_3.csv"));
  CHECK(fs::exists(out / "telemetry_4.csv"));
  CHECK(fs::exists(out / "report_3.txt"));
  CHECK(fs::exists(out / "report_4.txt"));
}

TEST_CASE("vision detect finds a rendered buoy and reports a distance") {
  using namespace anahita::vision;
  SceneSpec spec;
  Shape s;
  s.kind = Shape::Kind::disk;
  s.a = 140;
  s.b = 100;
  s.c = 24;
  s.color = {220, 40, 40};
  spec.shapes.push_back(s);
  const fs::path img = fs::temp_directory_path() / "cli_buoy.ppm";
  write_pnm(render_scene(spec), img.string());

  const auto r = run_cmd("vision detect --in \"" + img.string() +
                         "\" --hue-min 340 --hue-max 20 --sat-min 0.5 "
                         "--alpha 4.0 --beta 0.0138629");
  CHECK(r.exit_code == 0);
  std::istringstream out(r.output);
  double cx, cy, dim, dist;
  REQUIRE((out >> cx >> cy >> dim >> dist));
  CHECK(cx == Catch::Approx(140.0).margin(1.5));
  CHECK(cy == Catch::Approx(100.0).margin(1.5));
  CHECK(dim == Catch::Approx(49.0).margin(2.0));
  CHECK(dist > 0.0);
}

TEST_CASE("vision detect reports not found on a blank image") {
  using namespace anahita::vision;
  SceneSpec spec;
  const fs::path img = fs::temp_directory_path() / "cli_blank.ppm";
  write_pnm(render_scene(spec), img.string());
  const auto r = run_cmd("vision detect --in \"" + img.string() +
                         "\" --hue-min 340 --hue-max 20 --sat-min 0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "not found\n");
}

TEST_CASE("vision enhance writes a readable image of the same size") {
  using namespace anahita::vision;
  SceneSpec spec;
  Shape s;
  s.kind = Shape::Kind::disk;
  s.a = 160;
  s.b = 120;
  s.c = 30;
  s.color = {220, 40, 40};
  spec.shapes.push_back(s);
  DegradeConfig deg;
  deg.distance = 3.0;
  const fs::path in = fs::temp_directory_path() / "cli_hazy.ppm";
  const fs::path out = fs::temp_directory_path() / "cli_enhanced.ppm";
  write_pnm(degrade(render_scene(spec), deg), in.string());
  const auto r =
      run_cmd("vision enhance --in \"" + in.string() + "\" --out \"" +
              out.string() + "\"");
  CHECK(r.exit_code == 0);
  const auto img = read_pnm(out.string());
  CHECK(img.width == 320);
  CHECK(img.height == 240);
}

TEST_CASE("acoustics synth then locate recovers the azimuth") {
  const fs::path dir = fs::temp_directory_path() / "anahita_traces";
  fs::remove_all(dir);
  CHECK(run_cmd("acoustics synth --out \"" + dir.string() +
                "\" --azimuth 30 --distance 12 --snr 40 --seed 5")
            .exit_code == 0);
  const auto r = run_cmd("acoustics locate --traces \"" + dir.string() + "\"");
  CHECK(r.exit_code == 0);
  const double az = std::stod(r.output);
  CHECK(az == Catch::Approx(30.0 * 3.14159265 / 180.0).margin(0.035));
}

TEST_CASE("acoustics locate on an on-axis pinger prints azimuth zero") {
  const fs::path dir = fs::temp_directory_path() / "anahita_traces0";
  fs::remove_all(dir);
  CHECK(run_cmd("acoustics synth --out \"" + dir.string() +
                "\" --azimuth 0 --distance 10 --snr 60 --seed 1")
            .exit_code == 0);
  const auto r = run_cmd("acoustics locate --traces \"" + dir.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(std::abs(std::stod(r.output)) < 0.02);
}

TEST_CASE("plot renders an SVG with one polyline per column") {
  const fs::path out = fs::temp_directory_path() / "anahita_plotrun";
  fs::remove_all(out);
  REQUIRE(run_cmd("run --scenario \"" + scenarios() +
                  "/depth_hold.cfg\" --plan \"" + scenarios() +
                  "/depth_hold_plan.cfg\" --duration 5 --out \"" +
                  out.string() + "\"")
              .exit_code == 0);
  const fs::path svg = out / "plot.svg";
  const auto r = run_cmd("plot --telemetry \"" + (out / "telemetry.csv").string() +
                         "\" --out \"" + svg.string() + "\" --columns z psi");
  CHECK(r.exit_code == 0);
  const auto text = slurp(svg);
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') > 2);
  size_t polylines = 0;
  for (size_t pos = 0; (pos = text.find("<polyline", pos)) != std::string::npos;
       ++pos)
    ++polylines;
  CHECK(polylines == 2);

  const auto bad = run_cmd("plot --telemetry \"" +
                           (out / "telemetry.csv").string() +
                           "\" --out /tmp/x.svg --columns bogus");
  CHECK(bad.exit_code == 2);
}
