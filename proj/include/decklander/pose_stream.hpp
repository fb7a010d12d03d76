#pragma once

#include <deque>
#include <optional>
#include <string>

#include "decklander/types.hpp"

namespace decklander {

/// Rolling buffer of asynchronous pose observations. Producers push samples
/// with strictly increasing timestamps; consumers pull fixed-rate windows
/// (the spectral stage needs a uniform sample grid) or point interpolants.
class PoseBuffer {
 public:
  explicit PoseBuffer(double retention_s = 25.0);

  /// Appends a sample. Throws std::invalid_argument on a non-monotonic
  /// timestamp. Samples older than the retention span are evicted, keeping
  /// one sample at or before the cut so the whole span stays interpolable.
  void push(const PoseSample& sample);

  /// Uniform resample of the most recent `span_s` seconds at `rate_hz`.
  /// Returns nullopt ("not ready") when the buffer does not yet span the
  /// request or when it contains a gap larger than `max_gap_s`.
  /// The window has floor(span*rate)+1 values, linearly interpolated.
  std::optional<SampleWindow> resample(double span_s, double rate_hz,
                                       double max_gap_s = 0.5) const;

  /// Linear interpolation of the full pose at time t. Requires t within the
  /// buffered range; returns nullopt if t is outside it or falls inside a
  /// gap larger than `max_gap_s`.
  std::optional<Vector6d> interpolate(double t, double max_gap_s = 0.5) const;

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  double earliest_t() const;
  double latest_t() const;
  double span() const;
  double retention() const { return retention_; }

 private:
  double retention_;
  std::deque<PoseSample> samples_;
};

/// Reads a pose log in CSV form with header `t,b1,b2,b3,b4,b5,b6`
/// (SI units, radians). Throws std::runtime_error on malformed input.
std::vector<PoseSample> load_pose_csv(const std::string& path);

}  // namespace decklander
