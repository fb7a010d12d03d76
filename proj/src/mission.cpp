#include "decklander/mission.hpp"

namespace decklander {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kAscendSearch: return "ASCEND_SEARCH";
    case Phase::kHoverAlign: return "HOVER_ALIGN";
    case Phase::kCollect: return "COLLECT";
    case Phase::kLand: return "LAND";
    case Phase::kTouchdown: return "TOUCHDOWN";
    case Phase::kAborted: return "ABORTED";
  }
  return "?";
}

namespace {

void enter(MissionState& m, Phase p, double t) {
  m.phase = p;
  m.phase_entry_t = t;
}

Eigen::Matrix<double, 12, 1> hover_setpoint(const MissionObservations& obs,
                                            const MissionConfig& cfg,
                                            double heading) {
  Eigen::Matrix<double, 12, 1> sp = Eigen::Matrix<double, 12, 1>::Zero();
  sp[kStatePosX] = obs.deck_pose[kAxisX];
  sp[kStatePosY] = obs.deck_pose[kAxisY];
  sp[kStatePosZ] = obs.deck_pose[kAxisZ] + cfg.hover_altitude;
  sp[kStateHeading] = heading;
  return sp;
}

}  // namespace

MissionCommand automaton_step(MissionState& mission, const MissionConfig& cfg,
                              const MissionObservations& obs) {
  MissionCommand cmd;

  // Contact wins over everything while the landing is in progress.
  if (obs.contact && (mission.phase == Phase::kLand ||
                      mission.phase == Phase::kHoverAlign ||
                      mission.phase == Phase::kCollect)) {
    enter(mission, Phase::kTouchdown, obs.t);
  }

  // Latch the first time the identification score clears the threshold,
  // regardless of phase; timeliness is measured from this instant.
  if (!mission.fft_latched &&
      obs.fft_accuracy >= cfg.activation.min_accuracy) {
    mission.fft_latched = true;
    mission.t_fft_latch = obs.t;
  }

  switch (mission.phase) {
    case Phase::kAscendSearch: {
      mission.hold_heading = obs.uav[kStateHeading];
      if (obs.pad_visible) {
        enter(mission, Phase::kHoverAlign, obs.t);
        cmd.setpoint = hover_setpoint(obs, cfg, mission.hold_heading);
        break;
      }
      if (obs.uav[kStatePosZ] >= cfg.altitude_ceiling) {
        enter(mission, Phase::kAborted, obs.t);
        cmd.outputs_zeroed = true;
        break;
      }
      cmd.setpoint[kStatePosX] = obs.uav[kStatePosX];
      cmd.setpoint[kStatePosY] = obs.uav[kStatePosY];
      cmd.setpoint[kStatePosZ] = obs.uav[kStatePosZ] + cfg.ascend_step;
      cmd.setpoint[kStateHeading] = mission.hold_heading;
      break;
    }

    case Phase::kHoverAlign: {
      cmd.setpoint = hover_setpoint(obs, cfg, mission.hold_heading);
      const double ex = std::abs(obs.uav[kStatePosX] - cmd.setpoint[kStatePosX]);
      const double ey = std::abs(obs.uav[kStatePosY] - cmd.setpoint[kStatePosY]);
      const double ez = std::abs(obs.uav[kStatePosZ] - cmd.setpoint[kStatePosZ]);
      if (ex < cfg.align_pos_tol && ey < cfg.align_pos_tol &&
          ez < cfg.align_alt_tol) {
        if (mission.align_reached_t < 0.0) mission.align_reached_t = obs.t;
        enter(mission, Phase::kCollect, obs.t);
      }
      break;
    }

    case Phase::kCollect: {
      cmd.setpoint = hover_setpoint(obs, cfg, mission.hold_heading);
      bool go = false;
      if (cfg.baseline) {
        go = mission.align_reached_t >= 0.0 &&
             obs.t - mission.align_reached_t >= cfg.baseline_delay;
      } else {
        LandingContext gate_ctx;
        gate_ctx.setpoint = cmd.setpoint;
        go = activation_check(gate_ctx, obs.uav, obs.fft_accuracy,
                              cfg.activation);
      }
      if (go) enter(mission, Phase::kLand, obs.t);
      break;
    }

    case Phase::kLand: {
      if (!obs.pad_visible) {
        enter(mission, Phase::kHoverAlign, obs.t);
        cmd.setpoint = hover_setpoint(obs, cfg, mission.hold_heading);
        break;
      }
      cmd.setpoint = hover_setpoint(obs, cfg, mission.hold_heading);
      cmd.setpoint[kStatePosZ] = obs.deck_pose[kAxisZ];  // reference on the deck
      if (cfg.baseline) {
        cmd.vertical_rate_override = -cfg.baseline_descent_rate;
      } else {
        cmd.land_active = true;
      }
      break;
    }

    case Phase::kTouchdown:
    case Phase::kAborted:
      cmd.outputs_zeroed = true;
      break;
  }
  return cmd;
}

}  // namespace decklander
