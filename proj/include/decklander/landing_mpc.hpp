#pragma once

#include <cmath>
#include <vector>

#include "decklander/uav_model.hpp"

namespace decklander {

/// Piecewise sigmoid altitude gate of the landing barrier. z_tilde is the
/// height error above the pad; h_d places the waiting region. Near zero the
/// gate collapses so the barrier vanishes at touchdown.
template <typename Scalar>
Scalar sigmoid_gate(Scalar z_tilde, Scalar h_d) {
  if (z_tilde >= Scalar(0.16)) {
    return Scalar(1) / (Scalar(1) + std::exp(-(z_tilde - h_d) / Scalar(-0.15)));
  }
  return Scalar(1) / (Scalar(1) + std::exp((z_tilde - Scalar(0.1)) / Scalar(-0.01)));
}

/// d/dz of sigmoid_gate (each branch is smooth; the split point itself is a
/// jump the optimizer treats as belonging to the upper branch).
template <typename Scalar>
Scalar sigmoid_gate_dz(Scalar z_tilde, Scalar h_d) {
  const Scalar f = sigmoid_gate(z_tilde, h_d);
  if (z_tilde >= Scalar(0.16)) {
    return -f * (Scalar(1) - f) / Scalar(0.15);
  }
  return f * (Scalar(1) - f) / Scalar(0.01);
}

/// Landing cost: the altitude gate times the squared deck tilt.
template <typename Scalar>
Scalar landing_cost(Scalar z_tilde, Scalar ang_x, Scalar ang_y,
                    Scalar h_d = Scalar(1.1)) {
  return sigmoid_gate(z_tilde, h_d) * (ang_x * ang_x + ang_y * ang_y);
}

struct MpcConfig {
  int mp{100};          // prediction horizon, steps
  int mc{40};           // control horizon, steps
  double dt_pred{0.01};  // model step, s

  // Diagonals of the state penalty S and input-rate penalty T.
  Eigen::Matrix<double, 12, 1> state_penalty{default_state_penalty()};
  Eigen::Matrix<double, 4, 1> input_rate_penalty{
      Eigen::Matrix<double, 4, 1>::Constant(0.02)};

  double alpha_l{1200.0};  // landing-barrier weight
  double h_d{1.1};         // waiting-region altitude, m

  // Soft one-sided quadratic hinges on velocity and acceleration states.
  double v_max{4.0};
  double a_max{4.0};
  double soft_weight{1e4};

  Eigen::Matrix<double, 4, 1> u_max{jerk_bounds()};
  Eigen::Matrix<double, 4, 1> u_min{-jerk_bounds()};

  // Tilt magnitude below which a forecast instant qualifies as a landing
  // window the solver may seed a full descent onto.
  double commit_tilt{0.12};

  // Solver budget. A zero time budget disables the wall-clock cap so runs
  // stay bit-reproducible; the iteration cap then governs alone.
  int max_iterations{80};
  double time_budget_ms{0.0};
  double grad_tolerance{1e-4};

  static Eigen::Matrix<double, 4, 1> jerk_bounds() {
    return {20.0, 20.0, 20.0, 10.0};
  }
  static Eigen::Matrix<double, 12, 1> default_state_penalty();
};

/// Per-cycle inputs of the objective beyond the UAV state: the reference,
/// the deck-tilt forecast across the horizon, and the landing switch.
struct LandingContext {
  Eigen::Matrix<double, 12, 1> setpoint{Eigen::Matrix<double, 12, 1>::Zero()};
  // Optional per-step reference (size mp); empty means the single setpoint.
  std::vector<Eigen::Matrix<double, 12, 1>> setpoint_trajectory;
  // Forecast deck rotations about x and y per horizon step (size mp when the
  // landing term is active).
  Eigen::VectorXd tilt_x;
  Eigen::VectorXd tilt_y;
  double deck_height{0.0};  // pad-center surface height used for the z reference
  bool landing_active{false};
  JerkInput previous_input{JerkInput::Zero()};

  const Eigen::Matrix<double, 12, 1>& reference(int m) const {
    return setpoint_trajectory.empty() ? setpoint : setpoint_trajectory[m];
  }
};

using InputSequence = Eigen::Matrix<double, 4, Eigen::Dynamic>;
using StateTrajectory = Eigen::Matrix<double, 12, Eigen::Dynamic>;

struct ObjectiveEval {
  double J{0.0};
  InputSequence gradient;  // 4 x mc
};

struct MpcSolution {
  InputSequence u_seq;      // 4 x mc
  StateTrajectory states;   // 12 x mp, states 1..mp of the rollout
  double J{0.0};
  Eigen::Matrix<double, 4, 1> velocity_reference;  // velocities of state 1
  bool budget_limited{false};
  int iterations{0};
};

/// Objective value plus its analytic gradient with respect to the input
/// sequence, propagated backward through the linear rollout.
ObjectiveEval objective(const MpcConfig& cfg, const LandingContext& ctx,
                        const UavState& x0, const InputSequence& u_seq);

/// Objective value only (line-search path).
double objective_value(const MpcConfig& cfg, const LandingContext& ctx,
                       const UavState& x0, const InputSequence& u_seq);

/// Projected-gradient descent with backtracking line search over the
/// box-constrained input sequence, warm-started from `warm_start` (clamped
/// into the box first). Never returns a J above the warm start's.
MpcSolution solve(const MpcConfig& cfg, const LandingContext& ctx,
                  const UavState& x0, const InputSequence& warm_start);

/// Feasible-landing-window query on the forecast in `ctx`: is there an
/// instant, reachable by a maximum-effort descent, whose predicted tilt
/// magnitude is at or below cfg.commit_tilt?
struct LandingWindow {
  bool open{false};
  int earliest_step{0};  // soonest possible touchdown step (1-based)
  int target_step{0};    // calmest reachable instant (1-based)
  double target_tilt{0.0};
};
LandingWindow landing_window(const MpcConfig& cfg, const LandingContext& ctx,
                             const UavState& x0);

/// Shifts an input sequence left by `steps`, repeating the last column.
InputSequence shift_input_sequence(const InputSequence& u_seq, int steps);

struct ActivationThresholds {
  double min_accuracy{0.8};
  double pos_tol{0.1};   // m
  double vel_tol{0.1};   // m/s
};

/// Landing-phase gate: identification accuracy at or above threshold and
/// horizontal position/velocity errors inside the box (all inclusive).
bool activation_check(const LandingContext& ctx, const UavState& uav,
                      double fft_accuracy,
                      const ActivationThresholds& thresholds);

}  // namespace decklander
