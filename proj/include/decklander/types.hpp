#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace decklander {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Axis indices into the 6-DOF deck pose vector b. Linear pose in meters,
// angular pose in radians, world frame.
enum Axis : int {
  kAxisX = 0,
  kAxisY = 1,
  kAxisZ = 2,
  kAxisRotX = 3,
  kAxisRotY = 4,
  kAxisRotZ = 5,
};

inline constexpr int kNumAxes = 6;

/// Wraps an angle to (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

/// One timestamped 6-DOF deck pose observation.
struct PoseSample {
  double t{0.0};
  Vector6d b{Vector6d::Zero()};
};

/// Uniformly sampled slice of pose history, suitable for spectral analysis.
struct SampleWindow {
  double t0{0.0};
  double dt{0.0};
  std::vector<Vector6d> values;

  int size() const { return static_cast<int>(values.size()); }
  double time_at(int i) const { return t0 + dt * i; }
  double duration() const { return dt * (size() - 1); }

  /// Column of one axis as an Eigen vector.
  Eigen::VectorXd axis_signal(int axis) const {
    Eigen::VectorXd s(size());
    for (int i = 0; i < size(); ++i) s[i] = values[i][axis];
    return s;
  }
};

/// One identified oscillation component of a single axis.
struct Mode {
  double f{0.0};    // Hz
  double A{0.0};    // axis units
  double phi{0.0};  // phase at the reference time, (-pi, pi]
};

/// Periodic decomposition of one axis: modes plus non-periodic offset.
/// Phases are referenced to `t_fft` (the start of the window the modes were
/// identified from), so the reconstructed signal is
///   b(t) = offset + sum_i A_i * sin(2*pi*f_i*(t - t_fft) + phi_i).
struct ModeSet {
  int axis{0};
  std::vector<Mode> modes;  // sorted by descending amplitude
  double offset{0.0};
  double t_fft{0.0};

  int size() const { return static_cast<int>(modes.size()); }

  double evaluate(double t) const {
    double b = offset;
    for (const Mode& m : modes) {
      b += m.A * std::sin(2.0 * M_PI * m.f * (t - t_fft) + m.phi);
    }
    return b;
  }

  /// Same decomposition with phases re-referenced to time `t`.
  ModeSet propagated_to(double t) const {
    ModeSet out = *this;
    for (Mode& m : out.modes) {
      m.phi = wrap_phase(2.0 * M_PI * m.f * (t - t_fft) + m.phi);
    }
    out.t_fft = t;
    return out;
  }
};

/// Per-axis identification result for a full pose window.
struct IdentReport {
  std::array<ModeSet, kNumAxes> mode_sets;
  std::array<double, kNumAxes> accuracy{};
  double t_ident{0.0};
};

}  // namespace decklander
