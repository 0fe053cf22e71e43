#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "anahita/acoustics.hpp"
#include "anahita/config.hpp"
#include "anahita/control.hpp"
#include "anahita/core.hpp"
#include "anahita/payloads.hpp"
#include "anahita/sensors.hpp"
#include "anahita/vision.hpp"

namespace anahita {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CameraConfig {
  int width = 320, height = 240;
  double focal_px = 160.0;  // 90 degree horizontal field of view
};

struct GateTarget {
  Vec3 position{6.0, 0.0, 1.5};  // center of the opening, world NED
  double width = 1.5;            // m between posts
  double post_height = 1.2;      // m
  double post_width = 0.15;      // m
  vision::Rgb color{230, 120, 40};
};

struct BuoyTarget {
  Vec3 position{4.0, 0.0, 1.5};
  double radius = 0.12;  // m
  vision::Rgb color{220, 40, 40};
};

struct BinTarget {
  Vec3 position{5.0, 1.0, 2.5};
  double size = 0.4;  // m, square opening
  vision::Rgb color{240, 240, 240};
};

struct PingerTarget {
  Vec3 position{12.0, 4.0, 2.0};
  double freq = 30000.0;  // Hz
};

struct GrabTarget {
  Vec3 position{4.5, -0.5, 2.8};
};

struct KillSchedule {
  std::optional<double> hard_at;  // s
  std::optional<double> soft_at;
};

struct Scenario {
  VehicleParams vehicle;
  NoiseConfig noise;
  CameraConfig camera;
  ArrayGeometry hydrophones = ArrayGeometry::square();
  PingConfig ping;
  vision::BlueFilterParams enhance;
  vision::DetectConfig detect;
  MarkerConfig marker;
  TorpedoConfig torpedo;
  KillSchedule kill;
  ControllerGains gains = ControllerGains::defaults();

  Pose initial_pose;
  double floor_depth = 5.0;  // m
  double water_backlight_distance_scale = 1.0;
  vision::DegradeConfig degrade;

  Vec3 dropper_offset{0.0, 0.0, 0.15};  // body frame, below the hull

  std::optional<GateTarget> gate;
  std::optional<BuoyTarget> buoy;
  std::optional<BinTarget> bin;
  std::optional<PingerTarget> pinger;
  std::optional<GrabTarget> grab;
};

inline Vec3 parse_vec3(const ConfigFile& cfg, const std::string& section,
                       const std::string& prefix, const Vec3& fallback) {
  return Vec3(cfg.get_double(section, prefix + "_x", fallback[0]),
              cfg.get_double(section, prefix + "_y", fallback[1]),
              cfg.get_double(section, prefix + "_z", fallback[2]));
}

inline Scenario parse_scenario(const ConfigFile& cfg) {
  Scenario sc;
  sc.vehicle = load_params(cfg);

  sc.noise.imu_attitude_sigma =
      cfg.get_double("noise", "imu_attitude_sigma", sc.noise.imu_attitude_sigma);
  sc.noise.imu_rate_sigma =
      cfg.get_double("noise", "imu_rate_sigma", sc.noise.imu_rate_sigma);
  sc.noise.imu_yaw_bias =
      cfg.get_double("noise", "imu_yaw_bias", sc.noise.imu_yaw_bias);
  sc.noise.depth_sigma =
      cfg.get_double("noise", "depth_sigma", sc.noise.depth_sigma);
  sc.noise.dvl_sigma = cfg.get_double("noise", "dvl_sigma", sc.noise.dvl_sigma);
  sc.noise.dropout_prob =
      cfg.get_double("noise", "dropout_prob", sc.noise.dropout_prob);
  sc.noise.validate();

  sc.camera.width = static_cast<int>(cfg.get_double("camera", "width", sc.camera.width));
  sc.camera.height = static_cast<int>(cfg.get_double("camera", "height", sc.camera.height));
  sc.camera.focal_px = cfg.get_double("camera", "focal_px", sc.camera.focal_px);

  sc.initial_pose.x = cfg.get_double("world", "start_x", 0.0);
  sc.initial_pose.y = cfg.get_double("world", "start_y", 0.0);
  sc.initial_pose.z = cfg.get_double("world", "start_z", 1.5);
  sc.initial_pose.psi = cfg.get_double("world", "start_yaw", 0.0);
  sc.floor_depth = cfg.get_double("world", "floor_depth", sc.floor_depth);

  for (int c = 0; c < 3; ++c) {
    const auto k = static_cast<size_t>(c);
    static const char* chan[3] = {"r", "g", "b"};
    sc.degrade.beta[k] = cfg.get_double(
        "world", std::string("beta_") + chan[c], sc.degrade.beta[k]);
    sc.degrade.backlight[k] = static_cast<std::uint8_t>(cfg.get_double(
        "world", std::string("backlight_") + chan[c], sc.degrade.backlight[k]));
  }

  if (cfg.has_section("gate")) {
    GateTarget g;
    g.position = parse_vec3(cfg, "gate", "pos", g.position);
    g.width = cfg.get_double("gate", "width", g.width);
    g.post_height = cfg.get_double("gate", "post_height", g.post_height);
    sc.gate = g;
  }
  if (cfg.has_section("buoy")) {
    BuoyTarget b;
    b.position = parse_vec3(cfg, "buoy", "pos", b.position);
    b.radius = cfg.get_double("buoy", "radius", b.radius);
    sc.buoy = b;
  }
  if (cfg.has_section("bin")) {
    BinTarget b;
    b.position = parse_vec3(cfg, "bin", "pos", b.position);
    b.size = cfg.get_double("bin", "size", b.size);
    sc.bin = b;
  }
  if (cfg.has_section("pinger")) {
    PingerTarget p;
    p.position = parse_vec3(cfg, "pinger", "pos", p.position);
    p.freq = cfg.get_double("pinger", "freq", p.freq);
    sc.pinger = p;
  }
  if (cfg.has_section("grab")) {
    GrabTarget g;
    g.position = parse_vec3(cfg, "grab", "pos", g.position);
    sc.grab = g;
  }
  if (cfg.has_section("kill")) {
    const double hard = cfg.get_double("kill", "hard_at", -1.0);
    const double soft = cfg.get_double("kill", "soft_at", -1.0);
    if (hard >= 0.0) sc.kill.hard_at = hard;
    if (soft >= 0.0) sc.kill.soft_at = soft;
  }

  sc.detect.hue_min = cfg.get_double("detect", "hue_min", sc.detect.hue_min);
  sc.detect.hue_max = cfg.get_double("detect", "hue_max", sc.detect.hue_max);
  sc.detect.sat_min = cfg.get_double("detect", "sat_min", sc.detect.sat_min);
  sc.detect.sat_max = cfg.get_double("detect", "sat_max", sc.detect.sat_max);
  sc.detect.val_min = cfg.get_double("detect", "val_min", sc.detect.val_min);
  sc.detect.val_max = cfg.get_double("detect", "val_max", sc.detect.val_max);
  sc.detect.min_area = static_cast<int>(
      cfg.get_double("detect", "min_area", sc.detect.min_area));
  if (auto mode = cfg.get("detect", "mode")) {
    if (*mode == "contour") sc.detect.mode = vision::DetectMode::contour;
    else if (*mode == "hough") sc.detect.mode = vision::DetectMode::hough;
    else throw ParseError("[detect] unknown mode: " + *mode);
  }
  sc.enhance.discard_ratio =
      cfg.get_double("enhance", "discard_ratio", sc.enhance.discard_ratio);
  sc.enhance.clip_limit =
      cfg.get_double("enhance", "clip_limit", sc.enhance.clip_limit);

  // pid.<axis>.{kp,ki,kd} overrides
  static const char* axes[6] = {"surge", "sway", "heave", "roll", "pitch", "yaw"};
  for (int i = 0; i < 6; ++i) {
    const std::string sect = std::string("pid.") + axes[i];
    auto& g = sc.gains.axis[static_cast<size_t>(i)];
    g.kp = cfg.get_double(sect, "kp", g.kp);
    g.ki = cfg.get_double(sect, "ki", g.ki);
    g.kd = cfg.get_double(sect, "kd", g.kd);
  }
  return sc;
}

/// Pinhole projection of the world targets into the forward camera.
/// Returns nothing when the point is behind or beside the camera.
struct CameraProjection {
  double cx, cy;     // pixels
  double depth;      // m along the body x axis
  double px_per_m;   // image scale at that depth
};

inline std::optional<CameraProjection> project_point(const Pose& pose,
                                                     const CameraConfig& cam,
                                                     const Vec3& world_point) {
  const Vec3 body = rotation_body_to_world(pose).transpose() *
                    (world_point - pose.position());
  if (body[0] < 0.2) return std::nullopt;
  CameraProjection pr;
  pr.depth = body[0];
  pr.px_per_m = cam.focal_px / body[0];
  pr.cx = cam.width / 2.0 + body[1] * pr.px_per_m;
  pr.cy = cam.height / 2.0 + body[2] * pr.px_per_m;
  if (pr.cx < -cam.width || pr.cx > 2 * cam.width || pr.cy < -cam.height ||
      pr.cy > 2 * cam.height)
    return std::nullopt;
  return pr;
}

/// Renders what the forward camera would see of the requested target,
/// then degrades it with the underwater model for the target distance.
enum class TargetKind { gate, buoy, bin, grab_object };

inline std::optional<vision::Image> render_camera_view(const Scenario& sc,
                                                       const Pose& pose,
                                                       TargetKind target) {
  vision::SceneSpec spec;
  spec.width = sc.camera.width;
  spec.height = sc.camera.height;
  spec.background = {10, 30, 60};

  auto clamp_disk = [&](double cx, double cy, double r) {
    // keep the primitive inside the canvas; partial views shrink
    r = std::min({r, cx - 1.0, cy - 1.0, spec.width - 2.0 - cx,
                  spec.height - 2.0 - cy});
    return r;
  };

  double distance = 0.0;
  if (target == TargetKind::buoy && sc.buoy) {
    auto pr = project_point(pose, sc.camera, sc.buoy->position);
    if (!pr) return std::nullopt;
    const double r = clamp_disk(pr->cx, pr->cy, sc.buoy->radius * pr->px_per_m);
    if (r < 2.0) return std::nullopt;
    spec.shapes.push_back({vision::Shape::Kind::disk, pr->cx, pr->cy, r, 0,
                           sc.buoy->color});
    distance = pr->depth;
  } else if (target == TargetKind::gate && sc.gate) {
    auto pr = project_point(pose, sc.camera, sc.gate->position);
    if (!pr) return std::nullopt;
    distance = pr->depth;
    const double half_w = sc.gate->width / 2.0 * pr->px_per_m;
    const double post_w = std::max(2.0, sc.gate->post_width * pr->px_per_m);
    const double post_h = sc.gate->post_height * pr->px_per_m;
    for (double side : {-1.0, 1.0}) {
      double x0 = pr->cx + side * half_w - post_w / 2.0;
      double y0 = pr->cy - post_h / 2.0;
      double wpx = post_w, hpx = post_h;
      // crop to canvas
      if (x0 < 1) { wpx += x0 - 1; x0 = 1; }
      if (y0 < 1) { hpx += y0 - 1; y0 = 1; }
      wpx = std::min(wpx, spec.width - 2.0 - x0);
      hpx = std::min(hpx, spec.height - 2.0 - y0);
      if (wpx < 2 || hpx < 2) continue;
      spec.shapes.push_back({vision::Shape::Kind::rect, x0, y0, wpx, hpx,
                             sc.gate->color});
    }
    if (spec.shapes.empty()) return std::nullopt;
  } else if (target == TargetKind::bin && sc.bin) {
    auto pr = project_point(pose, sc.camera, sc.bin->position);
    if (!pr) return std::nullopt;
    distance = pr->depth;
    const double s = sc.bin->size * pr->px_per_m;
    double x0 = pr->cx - s / 2.0, y0 = pr->cy - s / 2.0, wpx = s, hpx = s;
    if (x0 < 1) { wpx += x0 - 1; x0 = 1; }
    if (y0 < 1) { hpx += y0 - 1; y0 = 1; }
    wpx = std::min(wpx, spec.width - 2.0 - x0);
    hpx = std::min(hpx, spec.height - 2.0 - y0);
    if (wpx < 2 || hpx < 2) return std::nullopt;
    spec.shapes.push_back({vision::Shape::Kind::rect, x0, y0, wpx, hpx,
                           sc.bin->color});
  } else if (target == TargetKind::grab_object && sc.grab) {
    auto pr = project_point(pose, sc.camera, sc.grab->position);
    if (!pr) return std::nullopt;
    distance = pr->depth;
    const double r = clamp_disk(pr->cx, pr->cy, 0.08 * pr->px_per_m);
    if (r < 2.0) return std::nullopt;
    spec.shapes.push_back({vision::Shape::Kind::disk, pr->cx, pr->cy, r, 0,
                           vision::Rgb{60, 220, 60}});
  } else {
    return std::nullopt;
  }

  vision::Image img = vision::render_scene(spec);
  vision::DegradeConfig deg = sc.degrade;
  deg.distance = distance;
  return vision::degrade(img, deg);
}

}  // namespace anahita
