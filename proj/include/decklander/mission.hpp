#pragma once

#include <optional>

#include "decklander/landing_mpc.hpp"
#include "decklander/types.hpp"

namespace decklander {

enum class Phase {
  kAscendSearch,  // climb until the landing pattern is seen
  kHoverAlign,    // hover at a preset altitude above the pad
  kCollect,       // gather pose data until the landing gate opens
  kLand,          // barrier objective active, reference on the deck
  kTouchdown,     // contact confirmed, outputs zeroed
  kAborted,       // pad never found below the altitude ceiling
};

const char* phase_name(Phase p);

struct MissionConfig {
  double hover_altitude{3.0};      // m above the deck while aligning
  double ascend_step{2.0};         // m of setpoint lead while searching
  double altitude_ceiling{15.0};   // abort ASCEND_SEARCH above this

  // Horizontal/vertical capture box for HOVER_ALIGN -> COLLECT.
  double align_pos_tol{0.3};
  double align_alt_tol{0.5};

  ActivationThresholds activation;

  // Waiting envelope during LAND: the vehicle holds this height above the
  // deck until a reachable forecast instant is calm enough to commit to,
  // and re-arms the hold if a started approach loses its window.
  double wait_altitude{1.4};       // m above the deck
  double commit_abort_factor{1.5}; // window lost when tilt exceeds this x commit
  double envelope_gain{1.0};       // 1/s, vertical-rate envelope shaping

  // Baseline variant: LAND starts after a fixed delay instead of the
  // accuracy gate, and descends at constant velocity ignoring tilt.
  bool baseline{false};
  double baseline_delay{0.0};           // s after alignment
  double baseline_descent_rate{0.5};    // m/s
};

struct MissionObservations {
  double t{0.0};
  bool pad_visible{false};
  Vector6d deck_pose{Vector6d::Zero()};  // current best estimate
  double fft_accuracy{0.0};
  bool contact{false};
  UavState uav{UavState::Zero()};
};

struct MissionState {
  Phase phase{Phase::kAscendSearch};
  double phase_entry_t{0.0};
  double align_reached_t{-1.0};  // first instant HOVER_ALIGN captured
  bool fft_latched{false};
  double t_fft_latch{-1.0};
  double hold_heading{0.0};
};

/// Setpoint command for one control cycle.
struct MissionCommand {
  Eigen::Matrix<double, 12, 1> setpoint{Eigen::Matrix<double, 12, 1>::Zero()};
  bool land_active{false};       // enable the barrier term
  bool outputs_zeroed{false};    // touchdown: command zero velocity
  std::optional<double> vertical_rate_override;  // baseline descent
};

/// Advances the mission automaton one control tick and produces the
/// reference for the controller. Touchdown latches on a contact signal;
/// losing sight of the pad during LAND regresses to HOVER_ALIGN.
MissionCommand automaton_step(MissionState& mission, const MissionConfig& cfg,
                              const MissionObservations& obs);

}  // namespace decklander
