#include <doctest.h>

#include "decklander/mission.hpp"

using namespace decklander;

namespace {

MissionObservations base_obs(double t) {
  MissionObservations obs;
  obs.t = t;
  obs.uav[kStatePosZ] = 6.0;
  return obs;
}

}  // namespace

TEST_CASE("pad never visible: climbs, then aborts at the ceiling") {
  MissionConfig cfg;
  MissionState mission;
  MissionObservations obs = base_obs(0.0);
  obs.pad_visible = false;

  MissionCommand cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kAscendSearch);
  CHECK(cmd.setpoint[kStatePosZ] > obs.uav[kStatePosZ]);

  obs.uav[kStatePosZ] = cfg.altitude_ceiling + 0.1;
  obs.t = 30.0;
  cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kAborted);
  CHECK(cmd.outputs_zeroed);
}

TEST_CASE("visible pad moves the mission to hover alignment") {
  MissionConfig cfg;
  MissionState mission;
  MissionObservations obs = base_obs(0.0);
  obs.pad_visible = true;
  obs.deck_pose.setZero();

  const MissionCommand cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kHoverAlign);
  CHECK(cmd.setpoint[kStatePosZ] == doctest::Approx(cfg.hover_altitude));
  CHECK(!cmd.land_active);
}

TEST_CASE("collect transitions to land the step activation is satisfied") {
  MissionConfig cfg;
  MissionState mission;
  mission.phase = Phase::kCollect;
  mission.align_reached_t = 0.0;

  MissionObservations obs = base_obs(25.0);
  obs.pad_visible = true;
  obs.uav.setZero();
  obs.uav[kStatePosZ] = cfg.hover_altitude;
  obs.fft_accuracy = 0.5;  // below threshold: stays collecting

  MissionCommand cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kCollect);

  obs.fft_accuracy = 0.85;
  cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kLand);
  CHECK(mission.fft_latched);
  CHECK(mission.t_fft_latch == 25.0);

  cmd = automaton_step(mission, cfg, obs);
  CHECK(cmd.land_active);
  CHECK(cmd.setpoint[kStatePosZ] == obs.deck_pose[kAxisZ]);
}

TEST_CASE("the accuracy latch records its first firing time") {
  MissionConfig cfg;
  MissionState mission;
  mission.phase = Phase::kCollect;
  MissionObservations obs = base_obs(21.0);
  obs.pad_visible = true;
  obs.uav[kStatePosX] = 3.0;  // misaligned, not activatable
  obs.fft_accuracy = 0.92;
  automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kCollect);
  CHECK(mission.fft_latched);
  CHECK(mission.t_fft_latch == 21.0);

  obs.t = 26.0;
  automaton_step(mission, cfg, obs);
  CHECK(mission.t_fft_latch == 21.0);  // unchanged
}

TEST_CASE("contact during landing enters touchdown and zeroes outputs") {
  MissionConfig cfg;
  MissionState mission;
  mission.phase = Phase::kLand;
  MissionObservations obs = base_obs(60.0);
  obs.pad_visible = true;
  obs.contact = true;

  const MissionCommand cmd = automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kTouchdown);
  CHECK(cmd.outputs_zeroed);
}

TEST_CASE("losing the pad during landing regresses to hover alignment") {
  MissionConfig cfg;
  MissionState mission;
  mission.phase = Phase::kLand;
  MissionObservations obs = base_obs(45.0);
  obs.pad_visible = false;

  automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kHoverAlign);
}

TEST_CASE("baseline waits out its delay and descends at constant rate") {
  MissionConfig cfg;
  cfg.baseline = true;
  cfg.baseline_delay = 10.0;
  MissionState mission;
  mission.phase = Phase::kCollect;
  mission.align_reached_t = 5.0;

  MissionObservations obs = base_obs(12.0);
  obs.pad_visible = true;
  obs.uav.setZero();
  obs.uav[kStatePosZ] = cfg.hover_altitude;
  obs.fft_accuracy = 0.0;  // baseline ignores the accuracy gate

  automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kCollect);

  obs.t = 15.1;
  automaton_step(mission, cfg, obs);
  CHECK(mission.phase == Phase::kLand);

  const MissionCommand cmd = automaton_step(mission, cfg, obs);
  CHECK(!cmd.land_active);
  REQUIRE(cmd.vertical_rate_override.has_value());
  CHECK(*cmd.vertical_rate_override == -cfg.baseline_descent_rate);
}
