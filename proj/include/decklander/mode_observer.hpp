#pragma once

#include "decklander/spectral_id.hpp"
#include "decklander/types.hpp"

namespace decklander {

/// Amplitude/phase of one mode recovered from the stacked filter state.
struct AmpPhase {
  double A{0.0};
  double Phi{0.0};
  bool degenerate{false};
};

/// Snapshot of the observer's harmonic decomposition at its last
/// observation time; evaluate() extrapolates the deck axis into the future.
struct WaveForecast {
  double t_obs{0.0};
  std::vector<Mode> modes;  // phi holds Phi(t_obs)
  double offset{0.0};

  double evaluate(double t) const {
    double b = offset;
    for (const Mode& m : modes) {
      b += m.A * std::sin(2.0 * M_PI * m.f * (t - t_obs) + m.phi);
    }
    return b;
  }
};

/// Per-axis linear Kalman observer over identified oscillation modes.
///
/// The state stacks [A*sin(Phi), 2*pi*A*f*cos(Phi)] per mode plus a zero-
/// dynamics offset block, so the discrete transition matrix is block
/// diagonal with closed-form 2x2 rotation-like blocks (the exact matrix
/// exponential of each mode's harmonic ODE over one sample interval).
/// Measurements are scalar per step: the observed axis value.
class ModeObserver {
 public:
  /// Initializes the observer from an identified mode set.
  ///   t_start — time of the first filter state (phases are propagated from
  ///             modes.t_fft to this instant before assembling the state)
  ///   dt      — fixed sampling interval of subsequent measurements
  ///   lambda  — process-noise gain (Q_I = lambda * I)
  ///   r_var   — observation noise variance
  /// Throws on a zero-frequency mode (the offset block handles DC).
  ModeObserver(const ModeSet& modes, double t_start, double dt, double lambda,
               double r_var);

  /// One predict+correct filter cycle with measurement b_meas; advances
  /// t_last by dt. Throws on a non-positive innovation covariance.
  void step(double b_meas);

  /// Time update only (used when a measurement slot is lost to dropout).
  void predict_step();

  /// Merges a fresh identification: retained modes (nearest-frequency match
  /// within tol_hz) keep their state and covariance blocks untouched,
  /// vanished modes are removed, and new modes are appended with their
  /// covariance reset to the initial scale and zero cross-covariance.
  void reidentify(const ModeSet& report, double tol_hz);

  /// Amplitude and phase of mode `i` at t_last, via the quadrant-correct
  /// two-argument angle of (2*pi*f*v1, v2).
  AmpPhase amp_phase(int i) const;

  /// Extrapolates the axis value to time t >= t_last from the extracted
  /// amplitudes/phases plus the offset state.
  double predict(double t) const;

  WaveForecast forecast() const;

  /// Current filtered output C*v.
  double output() const;

  int axis() const { return axis_; }
  int n_modes() const { return static_cast<int>(freqs_.size()); }
  int dim() const { return static_cast<int>(v_.size()); }
  double t_last() const { return t_last_; }
  double dt() const { return dt_; }
  const std::vector<double>& freqs() const { return freqs_; }
  const Eigen::VectorXd& v() const { return v_; }
  const Eigen::MatrixXd& P() const { return P_; }
  const Eigen::MatrixXd& Psi() const { return Psi_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::RowVectorXd& Cbar() const { return C_; }
  double r_var() const { return r_var_; }

  /// Closed-form 2x2 transition block for one mode: the matrix exponential
  /// of [[0, 1], [-w^2, 0]] * dt with w = 2*pi*f.
  static Eigen::Matrix2d mode_transition_block(double f_hz, double dt);

 private:
  void rebuild_system();  // Psi, C, Q from freqs_ and dt_
  static Eigen::Vector2d mode_state(const Mode& m);

  int axis_{0};
  double dt_{0.0};
  double lambda_{0.0};
  double r_var_{0.0};
  double p0_scale_{100.0};
  double t_last_{0.0};
  std::vector<double> freqs_;
  Eigen::VectorXd v_;
  Eigen::MatrixXd P_;
  Eigen::MatrixXd Psi_;
  Eigen::MatrixXd Q_;
  Eigen::RowVectorXd C_;
};

}  // namespace decklander
