#include <catch2/catch_amalgamated.hpp>

#include "anahita/config.hpp"

using namespace anahita;
using Catch::Approx;

TEST_CASE("config parser handles sections, comments and repeated keys") {
  const std::string text =
      "# vehicle file\n"
      "[vehicle]\n"
      "mass = 26.4  # kg\n"
      "\n"
      "[task.1]\n"
      "transit = surge 2.0 30\n"
      "transit = yaw 1.57\n";
  const auto cfg = ConfigFile::parse(text);
  CHECK(cfg.get("vehicle", "mass") == "26.4");
  CHECK(cfg.get_all("task.1", "transit").size() == 2);
  CHECK(cfg.has_section("task.1"));
  CHECK_FALSE(cfg.has_section("task.2"));
  CHECK_FALSE(cfg.get("vehicle", "nope").has_value());
}

TEST_CASE("parse errors carry line numbers") {
  try {
    ConfigFile::parse("[vehicle]\nmass 26.4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigFile::parse("[oops\n"), ParseError);
  CHECK_THROWS_AS(ConfigFile::parse("= 3\n"), ParseError);
}

TEST_CASE("default profile reproduces the vehicle masses") {
  const auto p = load_params("");
  CHECK(p.mass == Approx(26.4));
  CHECK(p.displaced_mass == Approx(35.0));
  CHECK(p.weight() == Approx((26.4 + p.ballast_mass) * 9.81));
  CHECK(p.buoyancy() == Approx(35.0 * 9.81));
}

TEST_CASE("invalid mass is a validation error") {
  CHECK_THROWS_AS(load_params("[vehicle]\nmass = -1\nballast_mass = 0\n"),
                  ValidationError);
}

TEST_CASE("non-numeric value is a parse error") {
  CHECK_THROWS_AS(load_params("[vehicle]\nmass = heavy\n"), ParseError);
}

TEST_CASE("params serialize/load round-trips exactly") {
  VehicleParams p;
  p.mass = 27.123456789012345;
  p.d_quad[2] = 49.99999999999999;
  p.r_cb = Vec3(0.001, -0.002, -0.0534);
  p.coriolis_enabled = true;
  const auto q = load_params(serialize_params(p));
  CHECK(q.mass == p.mass);
  CHECK(q.d_quad[2] == p.d_quad[2]);
  CHECK(q.r_cb[0] == p.r_cb[0]);
  CHECK(q.r_cb[2] == p.r_cb[2]);
  CHECK(q.coriolis_enabled == p.coriolis_enabled);
  // full round trip through text is stable
  CHECK(serialize_params(q) == serialize_params(p));
}
