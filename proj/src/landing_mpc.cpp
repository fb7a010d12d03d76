#include "decklander/landing_mpc.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace decklander {

namespace {

constexpr int kVelIdx[4] = {kStateVelX, kStateVelY, kStateVelZ,
                            kStateHeadingRate};
constexpr int kAccIdx[4] = {kStateAccX, kStateAccY, kStateAccZ,
                            kStateHeadingAcc};

void validate(const MpcConfig& cfg, const LandingContext& ctx,
              const InputSequence& u_seq) {
  if (cfg.mc < 1 || cfg.mc > cfg.mp) {
    throw std::invalid_argument("mpc: need 1 <= mc <= mp");
  }
  if (u_seq.cols() != cfg.mc) {
    throw std::invalid_argument("mpc: input sequence must have mc columns");
  }
  if (ctx.landing_active &&
      (ctx.tilt_x.size() != cfg.mp || ctx.tilt_y.size() != cfg.mp)) {
    throw std::invalid_argument("mpc: tilt forecasts must cover the horizon");
  }
  if (!ctx.setpoint_trajectory.empty() &&
      static_cast<int>(ctx.setpoint_trajectory.size()) != cfg.mp) {
    throw std::invalid_argument("mpc: reference trajectory must have mp entries");
  }
}

// Shared forward/backward pass. When `grad` is non-null the forward states
// are kept and the adjoint recursion fills the gradient.
double evaluate(const MpcConfig& cfg, const LandingContext& ctx,
                const UavState& x0, const InputSequence& u_seq,
                InputSequence* grad) {
  validate(cfg, ctx, u_seq);
  const ModelMatrices model = build_matrices(cfg.dt_pred);
  const auto& s = cfg.state_penalty;
  const auto& t_pen = cfg.input_rate_penalty;

  StateTrajectory states;
  if (grad) states.resize(12, cfg.mp);

  double j = 0.0;
  UavState x = x0;
  for (int m = 1; m <= cfg.mp; ++m) {
    const auto& u = u_seq.col(std::min(m, cfg.mc) - 1);
    x = step(model, UavState(x), JerkInput(u));
    if (!x.allFinite()) {
      throw std::runtime_error("mpc objective: non-finite state at step " +
                               std::to_string(m));
    }
    if (grad) states.col(m - 1) = x;

    const UavState xt = x - ctx.reference(m - 1);
    j += xt.cwiseProduct(s).dot(xt);

    for (int a = 0; a < 4; ++a) {
      const double ve = std::abs(x[kVelIdx[a]]) - cfg.v_max;
      if (ve > 0.0) j += cfg.soft_weight * ve * ve;
      const double ae = std::abs(x[kAccIdx[a]]) - cfg.a_max;
      if (ae > 0.0) j += cfg.soft_weight * ae * ae;
    }

    if (ctx.landing_active) {
      const double zt = x[kStatePosZ] - ctx.reference(m - 1)[kStatePosZ];
      j += cfg.alpha_l * landing_cost(zt, ctx.tilt_x[m - 1], ctx.tilt_y[m - 1],
                                      cfg.h_d);
    }
  }

  for (int k = 1; k <= cfg.mc; ++k) {
    const JerkInput h =
        u_seq.col(k - 1) -
        (k == 1 ? ctx.previous_input : JerkInput(u_seq.col(k - 2)));
    j += h.cwiseProduct(t_pen).dot(h);
  }

  if (!grad) return j;

  grad->setZero(4, cfg.mc);
  UavState lambda = UavState::Zero();
  for (int m = cfg.mp; m >= 1; --m) {
    const UavState& xm = states.col(m - 1);
    const UavState xt = xm - ctx.reference(m - 1);

    UavState dc = 2.0 * s.cwiseProduct(xt);
    for (int a = 0; a < 4; ++a) {
      const double v = xm[kVelIdx[a]];
      const double ve = std::abs(v) - cfg.v_max;
      if (ve > 0.0) {
        dc[kVelIdx[a]] += 2.0 * cfg.soft_weight * ve * (v > 0.0 ? 1.0 : -1.0);
      }
      const double acc = xm[kAccIdx[a]];
      const double ae = std::abs(acc) - cfg.a_max;
      if (ae > 0.0) {
        dc[kAccIdx[a]] += 2.0 * cfg.soft_weight * ae * (acc > 0.0 ? 1.0 : -1.0);
      }
    }
    if (ctx.landing_active) {
      const double zt = xm[kStatePosZ] - ctx.reference(m - 1)[kStatePosZ];
      const double tilt_sq = ctx.tilt_x[m - 1] * ctx.tilt_x[m - 1] +
                             ctx.tilt_y[m - 1] * ctx.tilt_y[m - 1];
      dc[kStatePosZ] += cfg.alpha_l * sigmoid_gate_dz(zt, cfg.h_d) * tilt_sq;
    }

    lambda = dc + model.D.transpose() * lambda;
    grad->col(std::min(m, cfg.mc) - 1) += model.E.transpose() * lambda;
  }

  for (int k = 1; k <= cfg.mc; ++k) {
    const JerkInput h =
        u_seq.col(k - 1) -
        (k == 1 ? ctx.previous_input : JerkInput(u_seq.col(k - 2)));
    grad->col(k - 1) += 2.0 * t_pen.cwiseProduct(h);
    if (k < cfg.mc) {
      const JerkInput h_next = u_seq.col(k) - u_seq.col(k - 1);
      grad->col(k - 1) -= 2.0 * t_pen.cwiseProduct(h_next);
    }
  }
  return j;
}

InputSequence clamp_to_box(const MpcConfig& cfg, const InputSequence& u) {
  InputSequence out = u;
  for (int k = 0; k < out.cols(); ++k) {
    out.col(k) = out.col(k).cwiseMax(cfg.u_min).cwiseMin(cfg.u_max);
  }
  return out;
}

// Earliest step at which a maximum-effort descent can cross the deck,
// respecting the jerk bound and the soft velocity/acceleration limits.
// Returns -1 if the deck is out of reach inside the prediction horizon.
int fastest_touchdown_step(const MpcConfig& cfg, double z0, double v0,
                           double a0) {
  const double dt = cfg.dt_pred;
  const double v_limit = std::max(0.5, cfg.v_max - 0.3);
  double z = z0, v = v0, a = a0;
  for (int k = 0; k < cfg.mp; ++k) {
    const double a_des = v <= -v_limit ? 0.0 : -cfg.a_max;
    const double jerk =
        std::clamp((a_des - a) / dt, cfg.u_min[2], cfg.u_max[2]);
    z += v * dt + 0.5 * a * dt * dt + jerk * dt * dt * dt / 6.0;
    v += a * dt + 0.5 * jerk * dt * dt;
    a += jerk * dt;
    if (z <= 0.0) return k + 1;
  }
  return -1;
}

// Synthesizes a vertical jerk profile that reaches altitude zero (in the
// shifted coordinate handed in) at t_star, overwriting the z row of `probe`.
// Acceleration feedback runs over the controllable columns; the final
// columns freeze the ballistic landing acceleration and end with zero jerk
// so the input held beyond the control horizon completes the approach
// instead of integrating a stray jerk.
void synthesize_dive(const MpcConfig& cfg, double z0, double v0, double a0,
                     double t_star, InputSequence& probe) {
  const double dt = cfg.dt_pred;
  const double v_limit = std::max(0.5, cfg.v_max - 0.3);
  const double a_limit = cfg.a_max;
  double z = z0, v = v0, a = a0;
  double a_frozen = 0.0;
  const int k_freeze = cfg.mc - 4;
  for (int k = 0; k < cfg.mc; ++k) {
    const double t_rem = t_star - k * dt;
    double a_des;
    if (k >= k_freeze) {
      a_des = a_frozen;
    } else if (z <= 0.02) {
      a_des = std::clamp(-v / (5.0 * dt), -a_limit, a_limit);  // settle
    } else if (t_rem > 2.0 * dt) {
      a_des = std::clamp(-2.0 * (z + v * t_rem) / (t_rem * t_rem), -a_limit,
                         a_limit);
      if (v <= -v_limit && a_des < 0.0) a_des = 0.0;
    } else {
      a_des = 0.0;  // carry momentum through the final instants
    }
    if (k == k_freeze - 1) {
      // Acceleration that lands ballistically at t_star from the state the
      // freeze point will reach; the held tail realizes it.
      const double tau = std::max(t_star - k_freeze * dt, 4.0 * dt);
      a_frozen = std::clamp(-2.0 * (z + v * tau) / (tau * tau), -a_limit,
                            a_limit);
    }
    const double jerk =
        k == cfg.mc - 1
            ? 0.0
            : std::clamp((a_des - a) / dt, cfg.u_min[2], cfg.u_max[2]);
    probe(2, k) = jerk;
    z += v * dt + 0.5 * a * dt * dt + jerk * dt * dt * dt / 6.0;
    v += a * dt + 0.5 * jerk * dt * dt;
    a += jerk * dt;
  }
}

// Candidate input sequence that dives onto a forecast near-zero-tilt instant.
// The commit to descend is a distant optimum the local search cannot reach
// from a hovering warm start, so the solver scores this seed against the
// warm start and keeps whichever is better. Only genuinely calm, dynamically
// reachable instants qualify; mediocre dips are left to the local search,
// whose stickiness at the hold is what keeps the vehicle waiting.
LandingWindow landing_window_impl(const MpcConfig& cfg,
                                  const LandingContext& ctx,
                                  const UavState& x0) {
  LandingWindow win;
  const double z0 = x0[kStatePosZ] - ctx.reference(0)[kStatePosZ];
  int k_min = fastest_touchdown_step(cfg, z0, x0[kStateVelZ], x0[kStateAccZ]);
  if (k_min < 0) k_min = cfg.mp;
  win.earliest_step = k_min;

  const double q_commit = cfg.commit_tilt * cfg.commit_tilt;
  double q_best = q_commit;
  for (int m = k_min - 1; m < cfg.mp; ++m) {
    const double q =
        ctx.tilt_x[m] * ctx.tilt_x[m] + ctx.tilt_y[m] * ctx.tilt_y[m];
    if (q <= q_best) {
      q_best = q;
      win.open = true;
      win.target_step = m + 1;
      win.target_tilt = std::sqrt(q);
    }
  }
  return win;
}

InputSequence descent_probe(const MpcConfig& cfg, const LandingContext& ctx,
                            const UavState& x0, const InputSequence& warm,
                            bool* usable) {
  *usable = false;
  const double dt = cfg.dt_pred;
  const double ref_z = ctx.reference(0)[kStatePosZ];
  const double z0 = x0[kStatePosZ] - ref_z;
  const double v0 = x0[kStateVelZ];
  const double a0 = x0[kStateAccZ];
  if (z0 < 0.05) return warm;

  const LandingWindow win = landing_window_impl(cfg, ctx, x0);
  if (!win.open) return warm;

  InputSequence probe = warm;  // keep the lateral/heading channels
  synthesize_dive(cfg, z0, v0, a0, win.target_step * dt, probe);
  *usable = true;
  return probe;
}

// Candidate that arrests the current vertical rate and hovers. Receding-
// horizon re-solves otherwise creep downward: each cycle's plan defers the
// brake a little, and the vehicle executes the unbraked front. Seeding the
// arrest explicitly lets one J comparison stop the creep.
//
// Bang-off-bang in jerk, ending at (near) zero velocity and acceleration so
// the frozen input beyond the control horizon leaves the plan hovering.
InputSequence brake_probe(const MpcConfig& cfg, const UavState& x0,
                          const InputSequence& warm) {
  const double dt = cfg.dt_pred;
  const double j_use = 0.6 * cfg.u_max[2];
  InputSequence probe = warm;
  double v = x0[kStateVelZ];
  double a = x0[kStateAccZ];
  for (int k = 0; k < cfg.mc; ++k) {
    double jerk;
    if (k == cfg.mc - 1) {
      jerk = 0.0;  // the held tail input must be neutral
    } else if (k >= cfg.mc - 4) {
      jerk = std::clamp(-a / dt, -j_use, j_use);  // bleed residual accel
    } else if (std::abs(v) <= 1e-3 && std::abs(a) <= 1.5 * j_use * dt) {
      jerk = std::clamp(-a / dt, -j_use, j_use);
    } else if (v < 0.0) {
      // Sinking: raise the deceleration, easing it off early enough that
      // the remaining ramp-down itself absorbs the residual rate.
      if (a > 0.0 && a * a / (2.0 * j_use) >= -v) {
        jerk = -j_use;
      } else {
        jerk = a < cfg.a_max ? j_use : 0.0;
      }
    } else {
      if (a < 0.0 && a * a / (2.0 * j_use) >= v) {
        jerk = j_use;
      } else {
        jerk = a > -cfg.a_max ? -j_use : 0.0;
      }
    }
    probe(2, k) = jerk;
    v += a * dt + 0.5 * jerk * dt * dt;
    a += jerk * dt;
  }
  return probe;
}

}  // namespace

Eigen::Matrix<double, 12, 1> MpcConfig::default_state_penalty() {
  Eigen::Matrix<double, 12, 1> s;
  // Per-axis blocks (position, velocity, acceleration). The vertical block
  // is deliberately light so the landing barrier, whose weight is fixed,
  // dominates the altitude channel during the final approach.
  s << 30.0, 3.0, 0.3,    // x
       30.0, 3.0, 0.3,    // y
       6.0, 0.6, 0.05,    // z
       20.0, 2.0, 0.2;    // heading
  return s;
}

ObjectiveEval objective(const MpcConfig& cfg, const LandingContext& ctx,
                        const UavState& x0, const InputSequence& u_seq) {
  ObjectiveEval eval;
  eval.J = evaluate(cfg, ctx, x0, u_seq, &eval.gradient);
  return eval;
}

double objective_value(const MpcConfig& cfg, const LandingContext& ctx,
                       const UavState& x0, const InputSequence& u_seq) {
  return evaluate(cfg, ctx, x0, u_seq, nullptr);
}

InputSequence shift_input_sequence(const InputSequence& u_seq, int steps) {
  // Zero-pad rather than repeat: the input beyond the control horizon is
  // held, so replicating a nonzero final jerk would make the shifted plan's
  // tail diverge quadratically.
  InputSequence out = InputSequence::Zero(4, u_seq.cols());
  const int n = static_cast<int>(u_seq.cols());
  for (int k = 0; k + steps < n; ++k) {
    out.col(k) = u_seq.col(k + steps);
  }
  return out;
}

MpcSolution solve(const MpcConfig& cfg, const LandingContext& ctx,
                  const UavState& x0, const InputSequence& warm_start) {
  const auto t_begin = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&t_begin]() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t_begin)
        .count();
  };

  InputSequence u = clamp_to_box(cfg, warm_start);
  InputSequence grad(4, cfg.mc);
  double j = evaluate(cfg, ctx, x0, u, &grad);

  if (ctx.landing_active) {
    // The landing problem is bimodal (wait vs commit); score explicit seeds
    // for both modes against the warm start and descend from the best.
    bool improved = false;
    const double j_warm_dbg = j;
    double j_brake_dbg = std::numeric_limits<double>::quiet_NaN();
    double j_dive_dbg = std::numeric_limits<double>::quiet_NaN();
    {
      const InputSequence brake = clamp_to_box(cfg, brake_probe(cfg, x0, u));
      const double j_brake = objective_value(cfg, ctx, x0, brake);
      j_brake_dbg = j_brake;
      if (j_brake < j) {
        u = brake;
        j = j_brake;
        improved = true;
      }
    }
    bool usable = false;
    const InputSequence dive =
        clamp_to_box(cfg, descent_probe(cfg, ctx, x0, u, &usable));
    if (usable) {
      const double j_dive = objective_value(cfg, ctx, x0, dive);
      j_dive_dbg = j_dive;
      if (j_dive < j) {
        u = dive;
        j = j_dive;
        improved = true;
      }
    }
    if (improved) j = evaluate(cfg, ctx, x0, u, &grad);
    if (std::getenv("DL_SOLVE_TRACE")) {
      std::fprintf(stderr,
                   "[solve] z=%.3f zd=%.3f Jw=%.1f Jb=%.1f Jd=%.1f usable=%d\n",
                   x0[kStatePosZ] - ctx.reference(0)[kStatePosZ],
                   x0[kStateVelZ], j_warm_dbg, j_brake_dbg, j_dive_dbg,
                   (int)usable);
    }
  }

  MpcSolution sol;
  sol.budget_limited = false;

  double alpha = 1.0;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 30;

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    if (cfg.time_budget_ms > 0.0 && elapsed_ms() > cfg.time_budget_ms) {
      sol.budget_limited = true;
      break;
    }

    // Projected-gradient stationarity measure.
    const InputSequence probe = clamp_to_box(cfg, u - alpha * grad);
    const double pg_norm = (u - probe).norm() / std::max(alpha, 1e-12);
    if (pg_norm < cfg.grad_tolerance) break;

    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      const InputSequence cand = clamp_to_box(cfg, u - alpha * grad);
      const double decrease = grad.cwiseProduct(u - cand).sum();
      const double j_cand = objective_value(cfg, ctx, x0, cand);
      if (j_cand <= j - kArmijo * decrease && j_cand < j) {
        u = cand;
        j = j_cand;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this scale

    j = evaluate(cfg, ctx, x0, u, &grad);
    alpha = std::min(alpha * 2.0, 1e6);
  }
  if (iter == cfg.max_iterations) sol.budget_limited = true;

  sol.u_seq = u;
  sol.J = j;
  sol.iterations = iter;

  const ModelMatrices model = build_matrices(cfg.dt_pred);
  sol.states.resize(12, cfg.mp);
  UavState x = x0;
  for (int m = 1; m <= cfg.mp; ++m) {
    x = step(model, UavState(x), JerkInput(u.col(std::min(m, cfg.mc) - 1)));
    sol.states.col(m - 1) = x;
  }
  sol.velocity_reference = {sol.states(kStateVelX, 0), sol.states(kStateVelY, 0),
                            sol.states(kStateVelZ, 0),
                            sol.states(kStateHeadingRate, 0)};
  return sol;
}

LandingWindow landing_window(const MpcConfig& cfg, const LandingContext& ctx,
                             const UavState& x0) {
  if (ctx.landing_active &&
      (ctx.tilt_x.size() != cfg.mp || ctx.tilt_y.size() != cfg.mp)) {
    throw std::invalid_argument("landing_window: forecasts must cover the horizon");
  }
  return landing_window_impl(cfg, ctx, x0);
}

bool activation_check(const LandingContext& ctx, const UavState& uav,
                      double fft_accuracy,
                      const ActivationThresholds& thresholds) {
  const double ex = std::abs(uav[kStatePosX] - ctx.setpoint[kStatePosX]);
  const double ey = std::abs(uav[kStatePosY] - ctx.setpoint[kStatePosY]);
  const double vx = std::abs(uav[kStateVelX]);
  const double vy = std::abs(uav[kStateVelY]);
  return fft_accuracy >= thresholds.min_accuracy && ex <= thresholds.pos_tol &&
         ey <= thresholds.pos_tol && vx <= thresholds.vel_tol &&
         vy <= thresholds.vel_tol;
}

}  // namespace decklander
