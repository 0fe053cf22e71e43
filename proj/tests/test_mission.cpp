#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "anahita/mission.hpp"

using namespace anahita;
using Catch::Approx;

TEST_CASE("bus topics must be registered before use") {
  Bus bus;
  CHECK_THROWS_AS(bus.publish("imu", 0.0, 1.0), BusError);
  CHECK_THROWS_AS(bus.latest("imu"), BusError);
  bus.register_topic("imu");
  CHECK_FALSE(bus.latest("imu"));
}

TEST_CASE("bus keeps only the latest message") {
  Bus bus;
  bus.register_topic("depth");
  DepthReading r1{1.0, 0.0};
  DepthReading r2{2.0, 0.5};
  bus.publish("depth", 0.0, r1);
  bus.publish("depth", 0.5, r2);
  const auto msg = bus.latest("depth");
  REQUIRE(msg);
  CHECK(msg->timestamp == 0.5);
  CHECK(std::get<DepthReading>(msg->payload).depth == 2.0);
}

TEST_CASE("bus rejects timestamp regression") {
  Bus bus;
  bus.register_topic("heading");
  bus.publish("heading", 1.0, 0.3);
  CHECK_THROWS_AS(bus.publish("heading", 0.5, 0.4), BusError);
  bus.publish("heading", 1.0, 0.5);  // equal timestamps are fine
}

TEST_CASE("mission plan parsing") {
  const auto cfg = ConfigFile::parse(
      "[task.1]\n"
      "kind = gate\n"
      "timeout = 90\n"
      "transit = heave 0.5 20\n"
      "transit = surge 2.0\n"
      "[task.2]\n"
      "kind = marker_drop\n");
  const auto plan = parse_plan(cfg);
  REQUIRE(plan.tasks.size() == 2);
  CHECK(plan.tasks[0].kind == TaskKind::gate);
  CHECK(plan.tasks[0].timeout == 90.0);
  REQUIRE(plan.tasks[0].transit.size() == 2);
  CHECK(plan.tasks[0].transit[0].motion == Motion::heave);
  CHECK(plan.tasks[0].transit[0].setpoint == 0.5);
  CHECK(plan.tasks[0].transit[0].timeout == 20.0);
  CHECK(plan.tasks[0].transit[1].motion == Motion::surge);
  CHECK(plan.tasks[0].transit[1].timeout == 30.0);  // default
  CHECK(plan.tasks[1].kind == TaskKind::marker_drop);
  CHECK(plan.tasks[1].transit.empty());
}

TEST_CASE("plan parse errors") {
  CHECK_THROWS_AS(parse_plan(ConfigFile::parse("[task.1]\ntimeout = 5\n")),
                  ParseError);
  CHECK_THROWS_AS(parse_plan(ConfigFile::parse("[task.1]\nkind = dance\n")),
                  ParseError);
  CHECK_THROWS_AS(
      parse_plan(ConfigFile::parse("[task.1]\nkind = gate\ntransit = hop 1\n")),
      ParseError);
  CHECK_THROWS_AS(parse_plan(ConfigFile::parse("")), ValidationError);
  CHECK_THROWS_AS(
      parse_plan(ConfigFile::parse("[task.1]\nkind = gate\ntimeout = 0\n")),
      ValidationError);
}

TEST_CASE("task numbering must be contiguous from one") {
  // task.2 without task.1 is ignored, which empties the plan
  CHECK_THROWS_AS(parse_plan(ConfigFile::parse("[task.2]\nkind = gate\n")),
                  ValidationError);
}

TEST_CASE("telemetry header and row have the same column count") {
  const auto count = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  TelemetryRow row;
  CHECK(count(telemetry_header()) == count(telemetry_csv_row(row)));
}

TEST_CASE("executor rejects plans that reference missing targets") {
  Scenario sc;  // no targets at all
  MissionPlan plan;
  plan.tasks.push_back({TaskKind::buoy, 30.0, {}});
  SimConfig sim;
  CHECK_THROWS_AS(MissionExecutor(plan, sc, sim), ScenarioError);
}

namespace {

Scenario buoy_scenario() {
  Scenario sc;
  BuoyTarget buoy;
  buoy.position = Vec3(4.0, 0.0, 1.5);
  sc.buoy = buoy;
  sc.initial_pose.z = 1.5;
  sc.detect.hue_min = 340.0;
  sc.detect.hue_max = 20.0;
  sc.detect.sat_min = 0.3;
  sc.noise.imu_attitude_sigma = 0.001;
  sc.noise.depth_sigma = 0.0005;
  sc.noise.dvl_sigma = 0.002;
  return sc;
}

MissionPlan buoy_plan(double timeout = 120.0) {
  MissionPlan plan;
  plan.tasks.push_back({TaskKind::buoy, timeout, {}});
  return plan;
}

}  // namespace

TEST_CASE("buoy task in clear view completes") {
  SimConfig sim;
  sim.duration = 120.0;
  sim.seed = 7;
  const auto report = run_mission(buoy_plan(), buoy_scenario(), sim);
  REQUIRE(report.tasks.size() == 1);
  CHECK(report.tasks[0].outcome == TaskPhase::DONE);
  // the vehicle ends near the standoff distance from the buoy
  const double d = (report.final_state.pose.position() - Vec3(4.0, 0.0, 1.5)).norm();
  CHECK(d < 1.2);
}

TEST_CASE("unfindable target times out FAILED and the mission continues") {
  auto sc = buoy_scenario();
  sc.buoy->position = Vec3(-6.0, 0.0, 1.5);  // behind the scan sector
  MissionPlan plan;
  plan.tasks.push_back({TaskKind::buoy, 5.0, {}});
  plan.tasks.push_back({TaskKind::buoy, 5.0, {}});
  SimConfig sim;
  sim.duration = 30.0;
  const auto report = run_mission(plan, sc, sim);
  REQUIRE(report.tasks.size() == 2);
  CHECK(report.tasks[0].outcome == TaskPhase::FAILED);
  CHECK(report.tasks[1].outcome == TaskPhase::FAILED);
  CHECK(report.tasks[1].t_start >= report.tasks[0].t_end);
}

TEST_CASE("duration running out mid-task reports FAILED") {
  auto sc = buoy_scenario();
  sc.buoy->position = Vec3(-6.0, 0.0, 1.5);
  SimConfig sim;
  sim.duration = 3.0;
  const auto report = run_mission(buoy_plan(1000.0), sc, sim);
  REQUIRE(report.tasks.size() == 1);
  CHECK(report.tasks[0].outcome == TaskPhase::FAILED);
}

TEST_CASE("hard kill stops the mission and zeroes the thrusters") {
  auto sc = buoy_scenario();
  sc.kill.hard_at = 2.0;
  SimConfig sim;
  sim.duration = 30.0;
  std::vector<TelemetryRow> rows;
  const auto report = run_mission(buoy_plan(), sc, sim,
                                  [&](const TelemetryRow& r) { rows.push_back(r); });
  CHECK(report.hard_killed);
  CHECK(report.sim_time < 2.5);
  REQUIRE(!rows.empty());
  const auto& last = rows.back();
  for (int i = 0; i < 8; ++i) CHECK(last.thrusts[i] == 0.0);
  for (int r = 0; r < kNumRails; ++r)
    CHECK(last.rail_v[static_cast<size_t>(r)] == 0.0);
}

TEST_CASE("soft kill freezes actuation but keeps the computer rail") {
  auto sc = buoy_scenario();
  sc.kill.soft_at = 1.0;
  SimConfig sim;
  sim.duration = 10.0;
  std::vector<TelemetryRow> rows;
  run_mission(buoy_plan(5.0), sc, sim,
              [&](const TelemetryRow& r) { rows.push_back(r); });
  const auto& last = rows.back();
  for (int i = 0; i < 8; ++i) CHECK(last.thrusts[i] == 0.0);
  CHECK(last.rail_v[static_cast<size_t>(kComputerRail)] == Approx(19.0));
  CHECK(last.rail_v[0] == 0.0);
}

TEST_CASE("identical seeds give byte-identical telemetry") {
  auto run_csv = [](std::uint64_t seed) {
    SimConfig sim;
    sim.duration = 8.0;
    sim.seed = seed;
    std::ostringstream out;
    run_mission(buoy_plan(), buoy_scenario(), sim, [&](const TelemetryRow& r) {
      out << telemetry_csv_row(r) << "\n";
    });
    return out.str();
  };
  const auto a = run_csv(42);
  const auto b = run_csv(42);
  CHECK(a == b);
  CHECK(a != run_csv(43));
}

TEST_CASE("transit legs execute before the task") {
  auto sc = buoy_scenario();
  MissionPlan plan;
  TaskSpec task{TaskKind::buoy, 100.0, {}};
  task.transit.push_back({Motion::heave, 0.8, 25.0});
  plan.tasks.push_back(task);
  SimConfig sim;
  sim.duration = 30.0;
  double depth_before_task = 0.0;
  bool task_started = false;
  run_mission(plan, sc, sim, [&](const TelemetryRow& r) {
    if (r.event.find("align") != std::string::npos) task_started = true;
    if (!task_started) depth_before_task = std::max(depth_before_task, r.pose.z);
  });
  // the vehicle heads for 1.5 + 0.8 before any buoy work
  CHECK(depth_before_task > 2.2);
}

TEST_CASE("marker drop task releases one ball over the bin") {
  Scenario sc;
  BinTarget bin;
  bin.position = Vec3(3.0, 0.0, 3.0);
  sc.bin = bin;
  sc.initial_pose.z = 1.5;
  sc.floor_depth = 5.0;
  // the default white bin is unsaturated; accept any bright pixel
  sc.detect.sat_min = 0.0;
  sc.detect.val_min = 0.55;
  sc.noise.imu_attitude_sigma = 0.001;
  sc.noise.depth_sigma = 0.0005;
  sc.noise.dvl_sigma = 0.002;
  MissionPlan plan;
  plan.tasks.push_back({TaskKind::marker_drop, 150.0, {}});
  SimConfig sim;
  sim.duration = 160.0;
  MissionExecutor exec(plan, sc, sim);
  const auto report = exec.run();
  REQUIRE(report.tasks.size() == 1);
  if (report.tasks[0].outcome == TaskPhase::DONE) {
    CHECK(exec.markers_dropped() == 1);
    REQUIRE(exec.projectiles().size() == 1);
  }
}

TEST_CASE("mission report text lists every task") {
  MissionReport report;
  report.tasks.push_back({TaskKind::gate, TaskPhase::DONE, 0.0, 12.5});
  report.tasks.push_back({TaskKind::pinger, TaskPhase::FAILED, 12.5, 40.0});
  report.sim_time = 40.0;
  const auto text = report.to_text();
  CHECK(text.find("task 1 gate: DONE") != std::string::npos);
  CHECK(text.find("task 2 pinger: FAILED") != std::string::npos);
  CHECK(text.find("sim time: 40") != std::string::npos);
}
