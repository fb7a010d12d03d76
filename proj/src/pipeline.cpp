#include "decklander/pipeline.hpp"

namespace decklander {

EstimationPipeline::EstimationPipeline(const Scenario& scenario,
                                       double sensor_rate, double noise_ang_std,
                                       double noise_pos_std)
    : sc_(scenario), buffer_(scenario.retention) {
  tap_rate_ = sc_.fft.resample_rate > 0.0 ? sc_.fft.resample_rate : sensor_rate;
  tap_dt_ = 1.0 / tap_rate_;
  for (int a = 0; a < kNumAxes; ++a) {
    const double std = a < 3 ? noise_pos_std : noise_ang_std;
    r_var_[a] = std::max(std * std, sc_.observer.r_floor);
  }
}

void EstimationPipeline::ingest(const PoseSample& sample) {
  buffer_.push(sample);
}

Vector6d EstimationPipeline::pose_estimate(double t) const {
  Vector6d b = Vector6d::Zero();
  if (observers_active_) {
    for (int a = 0; a < kNumAxes; ++a) b[a] = observers_[a]->predict(t);
  } else if (!buffer_.empty()) {
    b = buffer_.interpolate(buffer_.latest_t()).value_or(Vector6d::Zero());
  }
  return b;
}

double EstimationPipeline::predict_axis(int axis, double t) const {
  return observers_[axis]->predict(t);
}

void EstimationPipeline::advance(double t) {
  if (t >= next_ident_) {
    if (auto w = buffer_.resample(sc_.fft.span, tap_rate_)) {
      const double t_end = w->t0 + w->duration();
      double tilt_acc = 1.0;
      for (int a = 0; a < kNumAxes; ++a) {
        const ModeSet ms = identify(*w, a, sc_.fft.gate, sc_.fft.max_modes);
        const AccuracyScore score = accuracy_score(*w, ms);
        if (a == kAxisRotX || a == kAxisRotY) {
          const bool quiet = score.rms_deviation < sc_.fft.quiet_rms_ang;
          tilt_acc = std::min(tilt_acc, quiet ? 1.0 : score.value);
        }
        if (!observers_active_) {
          observers_[a].emplace(ms, t_end, tap_dt_, sc_.observer.lambda,
                                r_var_[a]);
        } else {
          observers_[a]->reidentify(ms, 1.5 / sc_.fft.span);
        }
      }
      fft_accuracy_ = tilt_acc;
      if (!observers_active_) {
        observers_active_ = true;
        next_tap_ = t_end + tap_dt_;
      }
      next_ident_ = t + sc_.fft.period;
    }
    // Window not ready yet: leave next_ident_ alone and retry next call.
  }

  if (!observers_active_) return;
  while (next_tap_ <= buffer_.latest_t() + 1e-12) {
    const auto v = buffer_.interpolate(next_tap_);
    for (int a = 0; a < kNumAxes; ++a) {
      if (v) {
        observers_[a]->step((*v)[a]);
      } else {
        observers_[a]->predict_step();  // measurement slot lost to a gap
      }
    }
    next_tap_ += tap_dt_;
  }
}

}  // namespace decklander
