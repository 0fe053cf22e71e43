#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "anahita/acoustics.hpp"
#include "anahita/allocation.hpp"
#include "anahita/config.hpp"
#include "anahita/control.hpp"
#include "anahita/dynamics.hpp"
#include "anahita/payloads.hpp"
#include "anahita/power.hpp"
#include "anahita/scenario.hpp"
#include "anahita/sensors.hpp"
#include "anahita/vision.hpp"

namespace anahita {

// ---------------------------------------------------------------------------
// Latest-value pub/sub bus

struct BusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using BusPayload = std::variant<ImuReading, DepthReading, DvlReading,
                                vision::Detection, double>;

struct BusMessage {
  std::string topic;
  double timestamp = 0.0;
  BusPayload payload;
};

/// Depth-1 topic cache: subscribers always read the most recent message.
class Bus {
 public:
  void register_topic(const std::string& topic) { topics_[topic] = std::nullopt; }

  void publish(const std::string& topic, double timestamp, BusPayload payload) {
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("unknown topic: " + topic);
    if (it->second && timestamp < it->second->timestamp)
      throw BusError("timestamp regression on topic: " + topic);
    it->second = BusMessage{topic, timestamp, std::move(payload)};
  }

  std::optional<BusMessage> latest(const std::string& topic) const {
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("unknown topic: " + topic);
    return it->second;
  }

 private:
  std::map<std::string, std::optional<BusMessage>> topics_;
};

// ---------------------------------------------------------------------------
// Mission plan

enum class TaskKind { gate, buoy, marker_drop, torpedo, pinger, grab };

inline const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::gate: return "gate";
    case TaskKind::buoy: return "buoy";
    case TaskKind::marker_drop: return "marker_drop";
    case TaskKind::torpedo: return "torpedo";
    case TaskKind::pinger: return "pinger";
    case TaskKind::grab: return "grab";
  }
  return "?";
}

enum class Motion { surge, sway, heave, yaw };

struct TransitLeg {
  Motion motion = Motion::surge;
  double setpoint = 0.0;  // m relative (surge/sway/heave) or absolute rad (yaw)
  double timeout = 30.0;  // s
};

struct TaskSpec {
  TaskKind kind = TaskKind::gate;
  double timeout = 120.0;  // s
  std::vector<TransitLeg> transit;  // executed before the task FSM
};

struct MissionPlan {
  std::vector<TaskSpec> tasks;

  void validate() const {
    if (tasks.empty()) throw ValidationError("mission plan has no tasks");
    for (const auto& t : tasks) {
      if (t.timeout <= 0.0)
        throw ValidationError("task timeout must be positive");
      for (const auto& leg : t.transit)
        if (leg.timeout <= 0.0)
          throw ValidationError("transit timeout must be positive");
    }
  }
};

inline MissionPlan parse_plan(const ConfigFile& cfg) {
  MissionPlan plan;
  for (int n = 1;; ++n) {
    const std::string sect = "task." + std::to_string(n);
    if (!cfg.has_section(sect)) break;
    TaskSpec task;
    const auto kind = cfg.get(sect, "kind");
    if (!kind) throw ParseError("[" + sect + "] missing kind");
    if (*kind == "gate") task.kind = TaskKind::gate;
    else if (*kind == "buoy") task.kind = TaskKind::buoy;
    else if (*kind == "marker_drop") task.kind = TaskKind::marker_drop;
    else if (*kind == "torpedo") task.kind = TaskKind::torpedo;
    else if (*kind == "pinger") task.kind = TaskKind::pinger;
    else if (*kind == "grab") task.kind = TaskKind::grab;
    else throw ParseError("[" + sect + "] unknown task kind: " + *kind);
    task.timeout = cfg.get_double(sect, "timeout", task.timeout);

    for (const auto& line : cfg.get_all(sect, "transit")) {
      std::istringstream in(line);
      std::string motion;
      TransitLeg leg;
      if (!(in >> motion >> leg.setpoint)) {
        throw ParseError("[" + sect + "] bad transit line: " + line);
      }
      in >> leg.timeout;  // optional third field
      if (motion == "surge") leg.motion = Motion::surge;
      else if (motion == "sway") leg.motion = Motion::sway;
      else if (motion == "heave") leg.motion = Motion::heave;
      else if (motion == "yaw") leg.motion = Motion::yaw;
      else throw ParseError("[" + sect + "] unknown motion: " + motion);
      task.transit.push_back(leg);
    }
    plan.tasks.push_back(task);
  }
  plan.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// Task state machine

enum class TaskPhase { SEARCH, ALIGN, ACT, DONE, FAILED };

inline const char* task_phase_name(TaskPhase p) {
  switch (p) {
    case TaskPhase::SEARCH: return "SEARCH";
    case TaskPhase::ALIGN: return "ALIGN";
    case TaskPhase::ACT: return "ACT";
    case TaskPhase::DONE: return "DONE";
    case TaskPhase::FAILED: return "FAILED";
  }
  return "?";
}

struct TaskState {
  TaskPhase phase = TaskPhase::SEARCH;
  double elapsed = 0.0;
  // anchors captured when the phase machinery needs them
  Pose search_anchor;
  MotionGoal act_goal;
  bool act_started = false;
};

// ---------------------------------------------------------------------------
// Telemetry and report

struct TelemetryRow {
  double t = 0.0;
  Pose pose;
  BodyVelocity nu;
  ThrustVector thrusts;
  std::array<double, kNumRails> rail_v{};
  std::array<double, kNumRails> rail_i{};
  double depth_reading = 0.0;
  std::string event = "-";
};

inline std::string telemetry_header() {
  return "t,x,y,z,phi,theta,psi,u,v,w,p,q,r,"
         "T1,T2,T3,T4,T5,T6,T7,T8,"
         "v_5v,v_12v,v_19v,v_unreg,i_5v,i_12v,i_19v,i_unreg,"
         "depth_reading,event";
}

inline std::string telemetry_csv_row(const TelemetryRow& r) {
  std::ostringstream out;
  out.precision(9);
  out << r.t << ',' << r.pose.x << ',' << r.pose.y << ',' << r.pose.z << ','
      << r.pose.phi << ',' << r.pose.theta << ',' << r.pose.psi << ',' << r.nu.u
      << ',' << r.nu.v << ',' << r.nu.w << ',' << r.nu.p << ',' << r.nu.q << ','
      << r.nu.r;
  for (int i = 0; i < 8; ++i) out << ',' << r.thrusts[i];
  for (int i = 0; i < kNumRails; ++i) out << ',' << r.rail_v[static_cast<size_t>(i)];
  for (int i = 0; i < kNumRails; ++i) out << ',' << r.rail_i[static_cast<size_t>(i)];
  out << ',' << r.depth_reading << ',' << r.event;
  return out.str();
}

struct TaskResult {
  TaskKind kind = TaskKind::gate;
  TaskPhase outcome = TaskPhase::FAILED;
  double t_start = 0.0, t_end = 0.0;
};

struct MissionReport {
  std::vector<TaskResult> tasks;
  std::vector<std::string> events;
  VehicleState final_state;
  bool hard_killed = false;
  double sim_time = 0.0;

  std::string to_text() const {
    std::ostringstream out;
    out << "mission report\n==============\n";
    for (size_t i = 0; i < tasks.size(); ++i) {
      const auto& t = tasks[i];
      out << "task " << i + 1 << " " << task_kind_name(t.kind) << ": "
          << task_phase_name(t.outcome) << " (" << t.t_start << " s -> "
          << t.t_end << " s)\n";
    }
    for (const auto& e : events) out << "event: " << e << "\n";
    out << "final pose: " << final_state.pose.x << " " << final_state.pose.y
        << " " << final_state.pose.z << " yaw " << final_state.pose.psi << "\n";
    out << "sim time: " << sim_time << " s\n";
    if (hard_killed) out << "hard kill\n";
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Mission executor

struct MissionOptions {
  int vision_every = 25;     // ticks between vision pipeline runs
  int acoustics_every = 100;  // ticks between ping processing
  double detection_stale = 3.0;  // s before ALIGN falls back to SEARCH
  double standoff = 0.5;     // m kept from the target along the approach
  double center_tol_px = 10.0;
  double scan_rate = 0.1;    // rad/s yaw sweep in SEARCH
  double scan_amplitude = kPi / 4.0;
};

class MissionExecutor {
 public:
  MissionExecutor(MissionPlan plan, Scenario scenario, SimConfig sim,
                  MissionOptions opts = {})
      : plan_(std::move(plan)),
        sc_(std::move(scenario)),
        sim_(sim),
        opts_(opts),
        alloc_(sc_.vehicle),
        imu_rng_(sim.seed, 1),
        depth_rng_(sim.seed, 2),
        dvl_rng_(sim.seed, 3),
        acoustic_rng_(sim.seed, 4) {
    sim_.validate();
    plan_.validate();
    bus_.register_topic("imu");
    bus_.register_topic("depth");
    bus_.register_topic("dvl");
    bus_.register_topic("detection");
    bus_.register_topic("heading");
    check_plan_targets();
    init_distance_calib();
  }

  using TelemetrySink = std::function<void(const TelemetryRow&)>;

  MissionReport run(const TelemetrySink& sink = nullptr) {
    state_.pose = sc_.initial_pose;
    state_.nu = {};
    state_.t = 0.0;
    nav_pos_ = sc_.initial_pose.position();
    power_.pods[0].soc = 1.0;
    power_.pods[1].soc = 1.0;

    MissionReport report;
    size_t task_idx = 0;
    size_t transit_idx = 0;
    bool in_transit = !plan_.tasks.empty() && !plan_.tasks[0].transit.empty();
    double phase_start = 0.0;
    TaskState task_state;
    task_state.search_anchor = state_.pose;
    MotionGoal transit_goal;
    bool transit_goal_fresh = false;  // built after the first sensor sample
    TaskResult current{plan_.tasks[0].kind, TaskPhase::FAILED, 0.0, 0.0};

    const auto total_ticks =
        static_cast<long>(std::llround(sim_.duration / sim_.dt));
    for (long tick = 0; tick < total_ticks && task_idx < plan_.tasks.size();
         ++tick) {
      event_.clear();

      // kill switches
      if (sc_.kill.hard_at && state_.t >= *sc_.kill.hard_at && !kill_.hard_kill) {
        kill_.hard_kill = true;
        note_event("hard_kill");
      }
      if (sc_.kill.soft_at && state_.t >= *sc_.kill.soft_at && !kill_.soft_kill) {
        kill_.soft_kill = true;
        note_event("soft_kill");
      }

      sample_sensors();

      const TaskSpec& task = plan_.tasks[task_idx];
      MotionGoal goal;
      if (in_transit) {
        if (!transit_goal_fresh) {
          transit_goal = make_transit_goal(task.transit[transit_idx]);
          transit_goal_fresh = true;
        }
        goal = transit_goal;
        if (transit_reached(transit_goal) ||
            state_.t - phase_start > task.transit[transit_idx].timeout) {
          ++transit_idx;
          phase_start = state_.t;
          if (transit_idx >= task.transit.size()) {
            in_transit = false;
            task_state = TaskState{};
            task_state.search_anchor = nav_pose();
          } else {
            transit_goal = make_transit_goal(task.transit[transit_idx]);
          }
        }
      } else {
        run_perception(task.kind, tick);
        goal = task_step(task, task_state);
        task_state.elapsed += sim_.dt;
        if (task_state.phase != TaskPhase::DONE &&
            task_state.phase != TaskPhase::FAILED &&
            task_state.elapsed > task.timeout) {
          task_state.phase = TaskPhase::FAILED;
        }
        if (task_state.phase == TaskPhase::DONE ||
            task_state.phase == TaskPhase::FAILED) {
          current.outcome = task_state.phase;
          current.t_end = state_.t;
          report.tasks.push_back(current);
          ++task_idx;
          if (task_idx < plan_.tasks.size()) {
            current = TaskResult{plan_.tasks[task_idx].kind, TaskPhase::FAILED,
                                 state_.t, state_.t};
            transit_idx = 0;
            in_transit = !plan_.tasks[task_idx].transit.empty();
            phase_start = state_.t;
            if (in_transit)
              transit_goal = make_transit_goal(plan_.tasks[task_idx].transit[0]);
            task_state = TaskState{};
            task_state.search_anchor = nav_pose();
          }
        }
      }

      step_vehicle(goal, sink);

      if (kill_.hard_kill) {
        report.hard_killed = true;
        if (current.t_end < current.t_start || task_idx < plan_.tasks.size()) {
          current.t_end = state_.t;
          report.tasks.push_back(current);
        }
        break;
      }
    }

    if (!report.hard_killed && task_idx < plan_.tasks.size()) {
      // duration ran out mid-task
      current.outcome = TaskPhase::FAILED;
      current.t_end = state_.t;
      report.tasks.push_back(current);
    }
    report.events = events_;
    report.final_state = state_;
    report.sim_time = state_.t;
    return report;
  }

  const std::vector<Projectile>& projectiles() const { return projectiles_; }
  int markers_dropped() const { return 2 - dropper_.balls_remaining; }

 private:
  void check_plan_targets() {
    for (const auto& t : plan_.tasks) {
      const bool ok = (t.kind == TaskKind::gate && sc_.gate) ||
                      (t.kind == TaskKind::buoy && sc_.buoy) ||
                      (t.kind == TaskKind::marker_drop && sc_.bin) ||
                      (t.kind == TaskKind::torpedo && (sc_.gate || sc_.buoy)) ||
                      (t.kind == TaskKind::pinger && sc_.pinger) ||
                      (t.kind == TaskKind::grab && sc_.grab);
      if (!ok) {
        throw ScenarioError(std::string("plan references missing target for ") +
                            task_kind_name(t.kind));
      }
    }
  }

  /// Two-point exponential fit of the pinhole size-distance curve. The
  /// knots sit inside the working range so the fit error stays small.
  void init_distance_calib() {
    const double target_size = sc_.buoy ? 2.0 * sc_.buoy->radius : 0.3;
    const double fs = sc_.camera.focal_px * target_size;
    const double d1 = 1.12, d2 = 1.97;
    calib_ = vision::calibrate({{fs / d1, d1}, {fs / d2, d2}});
  }

  Pose nav_pose() const {
    Pose p;
    p.x = nav_pos_[0];
    p.y = nav_pos_[1];
    p.z = last_depth_;
    p.phi = last_imu_.roll;
    p.theta = last_imu_.pitch;
    p.psi = last_imu_.yaw;
    return p;
  }

  void note_event(const std::string& e) {
    event_ = event_.empty() ? e : event_ + ";" + e;
    events_.push_back(std::to_string(state_.t) + " " + e);
  }

  void sample_sensors() {
    if (auto imu = imu_read(state_.pose, state_.nu, state_.t, sc_.noise, imu_rng_)) {
      last_imu_ = *imu;
      bus_.publish("imu", state_.t, *imu);
    }
    const auto depth = depth_read(state_.pose.z, state_.t, sc_.noise, depth_rng_);
    last_depth_ = depth.depth;
    bus_.publish("depth", state_.t, depth);
    if (auto dvl = dvl_read(state_.nu, state_.t, sc_.noise, dvl_rng_)) {
      last_dvl_ = *dvl;
      bus_.publish("dvl", state_.t, *dvl);
      // dead-reckon horizontal position from DVL + IMU attitude
      Pose att = nav_pose();
      const Vec3 v_world = rotation_body_to_world(att) *
                           Vec3(dvl->u, dvl->v, dvl->w);
      nav_pos_ += v_world * sim_.dt;
    }
    nav_pos_[2] = last_depth_;
  }

  void run_perception(TaskKind kind, long tick) {
    const bool wants_vision = kind == TaskKind::gate || kind == TaskKind::buoy ||
                              kind == TaskKind::marker_drop ||
                              kind == TaskKind::torpedo || kind == TaskKind::grab;
    if (wants_vision && tick % opts_.vision_every == 0) {
      TargetKind target = TargetKind::buoy;
      if (kind == TaskKind::gate || kind == TaskKind::torpedo)
        target = TargetKind::gate;
      else if (kind == TaskKind::marker_drop)
        target = TargetKind::bin;
      else if (kind == TaskKind::grab)
        target = TargetKind::grab_object;
      if (auto raw = render_camera_view(sc_, state_.pose, target)) {
        // enhancement recovers hazy far targets but can wreck the chroma
        // of a frame-filling close one, so fall back to the raw frame
        const auto enhanced = vision::blue_filter(*raw, sc_.enhance);
        auto det = vision::detect(enhanced, sc_.detect);
        if (!det) det = vision::detect(*raw, sc_.detect);
        if (det) {
          det->distance = vision::estimate_distance(det->blob_dim, calib_);
          bus_.publish("detection", state_.t, *det);
        }
      }
    }
    if (kind == TaskKind::pinger && tick % opts_.acoustics_every == 0) {
      const Vec3 pinger_body =
          rotation_body_to_world(state_.pose).transpose() *
          (sc_.pinger->position - state_.pose.position());
      PingConfig ping = sc_.ping;
      ping.freq = sc_.pinger->freq;
      try {
        auto traces = synth_ping(sc_.hydrophones, pinger_body, ping, acoustic_rng_);
        AnalogChainConfig chain;
        std::array<Trace, 4> conditioned;
        for (size_t i = 0; i < 4; ++i)
          conditioned[i] = analog_chain(traces[i], chain);
        const auto pairs = square_pairs(conditioned, sc_.hydrophones);
        bus_.publish("heading", state_.t, heading(pairs, sc_.hydrophones));
      } catch (const NoPeakError&) {
      } catch (const InfeasibleDelayError&) {
      }
    }
  }

  MotionGoal make_transit_goal(const TransitLeg& leg) const {
    const Pose p = nav_pose();
    const Mat3 R = rotation_body_to_world(p);
    MotionGoal g = MotionGoal::hold_pose(p);
    switch (leg.motion) {
      case Motion::surge:
      case Motion::sway: {
        Vec3 offs(leg.motion == Motion::surge ? leg.setpoint : 0.0,
                  leg.motion == Motion::sway ? leg.setpoint : 0.0, 0.0);
        const Vec3 target = p.position() + R * offs;
        g.set(Axis::surge, target[0]);
        g.set(Axis::sway, target[1]);
        break;
      }
      case Motion::heave:
        g.set(Axis::heave, p.z + leg.setpoint);
        break;
      case Motion::yaw:
        g.set(Axis::yaw, leg.setpoint);
        break;
    }
    return g;
  }

  bool transit_reached(const MotionGoal& goal) const {
    const auto err = compute_errors(nav_pose(), state_.nu, goal);
    return std::abs(err[0]) < 0.15 && std::abs(err[1]) < 0.15 &&
           std::abs(err[2]) < 0.1 && std::abs(err[5]) < 0.05;
  }

  std::optional<vision::Detection> fresh_detection() const {
    const auto msg = bus_.latest("detection");
    if (!msg) return std::nullopt;
    const double age = state_.t - msg->timestamp;
    if (age > opts_.vision_every * sim_.dt * 2.5) return std::nullopt;
    return std::get<vision::Detection>(msg->payload);
  }

  std::optional<double> fresh_heading() const {
    const auto msg = bus_.latest("heading");
    if (!msg) return std::nullopt;
    if (state_.t - msg->timestamp > opts_.acoustics_every * sim_.dt * 2.5)
      return std::nullopt;
    return std::get<double>(msg->payload);
  }

  /// Converts an image-plane detection into a world-frame goal at the
  /// configured standoff. Yaw steers toward the pixel bearing so the
  /// target stays in frame; the forward step is capped to keep the
  /// approach speed in hand.
  MotionGoal goal_from_detection(const vision::Detection& det) const {
    const Pose p = nav_pose();
    const double dist = det.distance.value_or(2.0);
    const double m_per_px = dist / sc_.camera.focal_px;
    const double advance =
        std::clamp(dist - opts_.standoff, 0.0, 1.5);
    const Vec3 body_offset(advance,
                           (det.cx - sc_.camera.width / 2.0) * m_per_px,
                           (det.cy - sc_.camera.height / 2.0) * m_per_px);
    const Vec3 target = p.position() + rotation_body_to_world(p) * body_offset;
    const double bearing =
        std::atan2(det.cx - sc_.camera.width / 2.0, sc_.camera.focal_px);
    MotionGoal g = MotionGoal::hold_pose(p);
    g.set(Axis::surge, target[0]);
    g.set(Axis::sway, target[1]);
    g.set(Axis::heave, target[2]);
    g.set(Axis::yaw, wrap_angle(p.psi + bearing));
    return g;
  }

  MotionGoal search_goal(const TaskState& ts) const {
    MotionGoal g = MotionGoal::hold_pose(ts.search_anchor);
    // triangle-wave yaw sweep
    const double period = 4.0 * opts_.scan_amplitude / opts_.scan_rate;
    const double phase = std::fmod(ts.elapsed, period) / period;  // 0..1
    double sweep;
    if (phase < 0.25) sweep = 4.0 * phase;
    else if (phase < 0.75) sweep = 2.0 - 4.0 * phase;
    else sweep = -4.0 + 4.0 * phase;
    g.set(Axis::yaw, ts.search_anchor.psi + opts_.scan_amplitude * sweep);
    return g;
  }

  bool centered(const vision::Detection& det) const {
    return std::abs(det.cx - sc_.camera.width / 2.0) < opts_.center_tol_px;
  }

  MotionGoal task_step(const TaskSpec& task, TaskState& ts) {
    switch (ts.phase) {
      case TaskPhase::SEARCH: {
        if (task.kind == TaskKind::pinger) {
          if (fresh_heading()) {
            ts.phase = TaskPhase::ALIGN;
            note_event("align");
          }
          return search_goal(ts);
        }
        if (fresh_detection()) {
          ts.phase = TaskPhase::ALIGN;
          note_event("align");
          return task_step(task, ts);
        }
        return search_goal(ts);
      }
      case TaskPhase::ALIGN: {
        if (task.kind == TaskKind::pinger) return pinger_align(ts);
        auto det = fresh_detection();
        if (!det) {
          const auto msg = bus_.latest("detection");
          if (!msg || state_.t - msg->timestamp > opts_.detection_stale) {
            ts.phase = TaskPhase::SEARCH;
            ts.search_anchor = nav_pose();
            note_event("search");
            return search_goal(ts);
          }
          return ts.act_goal;  // keep the last goal while the view refreshes
        }
        ts.act_goal = goal_from_detection(*det);
        const double dist = det->distance.value_or(10.0);
        if (centered(*det) && dist < opts_.standoff + 0.6) {
          ts.phase = TaskPhase::ACT;
          ts.act_started = false;
          note_event("act");
        }
        return ts.act_goal;
      }
      case TaskPhase::ACT:
        return act_step(task, ts);
      case TaskPhase::DONE:
      case TaskPhase::FAILED:
        return MotionGoal::hold_pose(nav_pose());
    }
    return MotionGoal::hold_pose(nav_pose());
  }

  MotionGoal pinger_align(TaskState& ts) {
    const Pose p = nav_pose();
    auto az = fresh_heading();
    MotionGoal g = MotionGoal::hold_pose(p);
    if (az) {
      g.set(Axis::yaw, wrap_angle(p.psi + *az));
      if (std::abs(*az) < 0.15) {
        ts.phase = TaskPhase::ACT;
        ts.act_started = false;
        note_event("act");
      }
    }
    return g;
  }

  MotionGoal act_step(const TaskSpec& task, TaskState& ts) {
    const Pose p = nav_pose();
    switch (task.kind) {
      case TaskKind::gate: {
        if (!ts.act_started) {
          // drive through the opening and one meter beyond
          const Vec3 target = sc_.gate->position +
                              rotation_body_to_world(p) * Vec3(1.0, 0.0, 0.0);
          ts.act_goal = MotionGoal::hold_pose(p);
          ts.act_goal.set(Axis::surge, target[0]);
          ts.act_goal.set(Axis::sway, target[1]);
          ts.act_goal.set(Axis::heave, target[2]);
          ts.act_started = true;
        }
        const Vec3 rel = state_.pose.position() - sc_.gate->position;
        const Vec3 fwd = rotation_body_to_world(state_.pose) * Vec3(1, 0, 0);
        if (rel[0] * fwd[0] + rel[1] * fwd[1] > 0.2) {
          ts.phase = TaskPhase::DONE;
          note_event("gate_passed");
        }
        return ts.act_goal;
      }
      case TaskKind::buoy: {
        const double d =
            (state_.pose.position() - sc_.buoy->position).norm();
        if (d < opts_.standoff + 0.35) {
          ts.phase = TaskPhase::DONE;
          note_event("buoy_reached");
        }
        return ts.act_goal;
      }
      case TaskKind::marker_drop: {
        if (!ts.act_started) {
          ts.act_started = true;
          const Mat3 R = rotation_body_to_world(state_.pose);
          auto [next, proj] = drop(
              dropper_, state_.pose.position() + R * sc_.dropper_offset,
              R * state_.nu.linear(), sc_.marker);
          dropper_ = next;
          projectiles_.push_back(proj);
          note_event("marker_drop");
          ts.phase = TaskPhase::DONE;
        }
        return ts.act_goal;
      }
      case TaskKind::torpedo: {
        if (!ts.act_started) {
          ts.act_started = true;
          projectiles_.push_back(
              launch_torpedo(state_, sc_.torpedo.muzzle_speed, sc_.torpedo));
          note_event("torpedo_launch");
          ts.phase = TaskPhase::DONE;
        }
        return ts.act_goal;
      }
      case TaskKind::pinger: {
        auto az = fresh_heading();
        if (az && std::abs(*az) > 0.3) {
          ts.phase = TaskPhase::ALIGN;
          return pinger_align(ts);
        }
        MotionGoal g = MotionGoal::hold_pose(p);
        const Vec3 ahead = p.position() +
                           rotation_body_to_world(p) * Vec3(2.0, 0.0, 0.0);
        g.set(Axis::surge, ahead[0]);
        g.set(Axis::sway, ahead[1]);
        if (az) g.set(Axis::yaw, wrap_angle(p.psi + *az));
        const double d = std::hypot(state_.pose.x - sc_.pinger->position[0],
                                    state_.pose.y - sc_.pinger->position[1]);
        if (d < 1.5) {
          ts.phase = TaskPhase::DONE;
          note_event("pinger_reached");
        }
        return g;
      }
      case TaskKind::grab: {
        if (!ts.act_started) {
          ts.act_started = true;
          grabber_ = grabber_command(
              grabber_, {GrabberCommand::Kind::extend, kGrabberMaxExtension});
        }
        const Vec3 fingers = state_.pose.position() +
                             Vec3(0, 0, grabber_.lift_extension + 0.1);
        const double d = (fingers - sc_.grab->position).norm();
        if (d < kGrabRadius) {
          grabber_ = grabber_command(grabber_, {GrabberCommand::Kind::close},
                                     d);
          if (grabber_.holding) {
            ts.phase = TaskPhase::DONE;
            note_event("object_grabbed");
          }
        }
        return ts.act_goal;
      }
    }
    return MotionGoal::hold_pose(p);
  }

  void step_vehicle(const MotionGoal& goal, const TelemetrySink& sink) {
    ThrustVector thrusts{};
    const bool actuators_live = !kill_.hard_kill && !kill_.soft_kill &&
                                power_.bus_powered();
    if (actuators_live) {
      const GeneralizedForce wrench = control_step(
          goal, sc_.gains, controller_, nav_pose(), state_.nu, sim_.dt);
      thrusts = alloc_.allocate(wrench, sc_.vehicle.t_max).thrusts;
    }

    state_ = step(state_, thrusts, alloc_, sc_.vehicle, sim_.dt,
                  sim_.integrator, sim_.velocity_limit_lin,
                  sim_.velocity_limit_rot);

    for (auto& p : projectiles_) {
      if (p.position[2] >= sc_.floor_depth) continue;  // settled on the floor
      p = projectile_step(p, sim_.dt);
      if (p.position[2] >= sc_.floor_depth) {
        p.position[2] = sc_.floor_depth;
        p.velocity = Vec3::Zero();
        note_event("marker_landed");
      }
    }

    double thruster_current = 0.0;
    for (int i = 0; i < 8; ++i) thruster_current += std::abs(thrusts[i]) * 0.25;
    const std::array<double, kNumRails> loads{0.5, 0.5, 2.0, thruster_current};
    power_ = step_power(power_, loads, kill_, sim_.dt);

    if (sink) {
      TelemetryRow row;
      row.t = state_.t;
      row.pose = state_.pose;
      row.nu = state_.nu;
      row.thrusts = thrusts;
      row.rail_v = power_.rails.measured_v;
      row.rail_i = power_.rails.measured_i;
      row.depth_reading = last_depth_;
      row.event = event_.empty() ? "-" : event_;
      sink(row);
    }
  }

  MissionPlan plan_;
  Scenario sc_;
  SimConfig sim_;
  MissionOptions opts_;
  AllocationMatrix alloc_;
  SensorRng imu_rng_, depth_rng_, dvl_rng_, acoustic_rng_;

  Bus bus_;
  VehicleState state_;
  Vec3 nav_pos_{0, 0, 0};
  ImuReading last_imu_;
  DvlReading last_dvl_;
  double last_depth_ = 0.0;
  ControllerState controller_{};
  PowerState power_;
  KillState kill_;
  DropperState dropper_;
  GrabberState grabber_;
  std::vector<Projectile> projectiles_;
  vision::DistanceCalib calib_;
  std::string event_;
  std::vector<std::string> events_;
};

inline MissionReport run_mission(const MissionPlan& plan,
                                 const Scenario& scenario, const SimConfig& sim,
                                 const MissionExecutor::TelemetrySink& sink = nullptr,
                                 MissionOptions opts = {}) {
  MissionExecutor exec(plan, scenario, sim, opts);
  return exec.run(sink);
}

}  // namespace anahita
