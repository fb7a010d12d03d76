#pragma once

#include <optional>
#include <random>

#include "decklander/types.hpp"
#include "decklander/uav_model.hpp"

namespace decklander {

/// Ground-truth deck motion: a sum of sinusoids plus offset per axis.
struct WaveSpec {
  std::array<ModeSet, kNumAxes> axes;

  WaveSpec() {
    for (int j = 0; j < kNumAxes; ++j) axes[j].axis = j;
  }

  /// Throws if the pitch/roll amplitude sums exceed the 0.5 rad envelope.
  void validate() const;
};

/// Exact deck pose at time t.
Vector6d deck_pose(const WaveSpec& spec, double t);

/// Synthetic pose sensor: fixed nominal rate with per-frame timing jitter,
/// additive Gaussian noise, and dropouts.
struct SensorSpec {
  double rate_hz{30.0};
  double jitter_frac{0.2};    // of the nominal period, in [0, 0.5)
  double noise_pos{0.02};     // m, std
  double noise_ang{0.01};     // rad, std
  double dropout_prob{0.02};  // per frame
  double max_range{15.0};     // pad not detectable above this height
};

/// Draws the sensor output for the frame nominally due at t_req; nullopt on
/// dropout. The emission timestamp is t_req plus a uniform jitter draw in
/// [0, jitter_frac/rate], so timestamps stay strictly increasing.
std::optional<PoseSample> sample_sensor(const SensorSpec& spec,
                                        const WaveSpec& wave, double t_req,
                                        std::mt19937_64& rng);

/// Pull-based wrapper around sample_sensor: emits each frame once its
/// (jittered) timestamp has passed the simulation clock.
class SensorStream {
 public:
  SensorStream(const SensorSpec& spec, const WaveSpec& wave, std::uint64_t seed);

  /// Next sample with emission time <= t_now, if any (at most one per call).
  std::optional<PoseSample> poll(double t_now);

 private:
  SensorSpec spec_;
  const WaveSpec* wave_;
  std::mt19937_64 rng_;
  long frame_{0};
  std::optional<PoseSample> pending_;
};

/// First-order velocity-tracking abstraction of the flight stack's inner
/// loops. Velocity converges to the reference with time constant tau;
/// position is integrated exactly; wind enters as a kinematic drift.
struct PlantSpec {
  double tau{0.25};                           // s
  Eigen::Vector3d wind{Eigen::Vector3d::Zero()};  // m/s
  double max_tracked_speed{5.0};              // per-axis reference clamp
};

UavState plant_step(const PlantSpec& spec, const UavState& uav,
                    const Eigen::Matrix<double, 4, 1>& vref, double dt);

struct ContactReport {
  double t{0.0};
  double tilt{0.0};            // sqrt(b4^2 + b5^2) at contact, rad
  double rel_vertical_speed{0.0};  // UAV sink rate relative to the deck, m/s
  double lateral_offset{0.0};  // distance from pad center, m
};

/// Contact test against the deck plane tilting about the USV center. Reports
/// contact when the UAV's height above the plane at its own (x, y) reaches
/// zero while within the pad extent.
std::optional<ContactReport> check_touchdown(const UavState& uav,
                                             const WaveSpec& wave, double t,
                                             double pad_halfwidth);

/// Height of the deck surface at world position (x, y).
double deck_height_at(const WaveSpec& wave, double t, double x, double y);

}  // namespace decklander
