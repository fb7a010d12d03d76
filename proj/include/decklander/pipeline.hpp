#pragma once

#include "decklander/mode_observer.hpp"
#include "decklander/pose_stream.hpp"
#include "decklander/scenario.hpp"

namespace decklander {

/// Sensing-side state of one run: the pose buffer, the periodic
/// identification cadence, and the per-axis observers stepped on a
/// fixed-rate grid tapped off the buffer (the filter assumes a constant
/// sampling interval, so measurements are interpolated onto the grid).
class EstimationPipeline {
 public:
  EstimationPipeline(const Scenario& scenario, double sensor_rate,
                     double noise_ang_std, double noise_pos_std);

  void ingest(const PoseSample& sample);

  /// Runs identification when due and steps the observer grid up to the
  /// newest buffered sample.
  void advance(double t);

  bool ready() const { return observers_active_; }
  /// Latest identification score, the minimum over the two tilt axes.
  double accuracy() const { return fft_accuracy_; }

  /// Filtered pose extrapolated to t; falls back to the newest raw sample
  /// until the observers are initialized.
  Vector6d pose_estimate(double t) const;

  /// Extrapolated axis value at t (observers must be initialized).
  double predict_axis(int axis, double t) const;

  const ModeObserver& observer(int axis) const { return *observers_[axis]; }
  const PoseBuffer& buffer() const { return buffer_; }

 private:
  const Scenario& sc_;
  PoseBuffer buffer_;
  double tap_rate_{30.0};
  double tap_dt_{1.0 / 30.0};
  std::array<double, kNumAxes> r_var_{};
  std::array<std::optional<ModeObserver>, kNumAxes> observers_;
  bool observers_active_{false};
  double next_tap_{0.0};
  double next_ident_{0.0};
  double fft_accuracy_{0.0};
};

}  // namespace decklander
