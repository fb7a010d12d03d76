#include "decklander/sea_sim.hpp"

namespace decklander {

void WaveSpec::validate() const {
  for (int j : {kAxisRotX, kAxisRotY}) {
    double sum = 0.0;
    for (const Mode& m : axes[j].modes) sum += std::abs(m.A);
    if (sum > 0.5 + 1e-12) {
      throw std::invalid_argument(
          "WaveSpec: tilt amplitude sum exceeds the 0.5 rad envelope");
    }
  }
  for (int j = 0; j < kNumAxes; ++j) {
    for (const Mode& m : axes[j].modes) {
      if (m.f <= 0.0) throw std::invalid_argument("WaveSpec: mode frequency must be positive");
      if (m.A < 0.0) throw std::invalid_argument("WaveSpec: mode amplitude must be non-negative");
    }
  }
}

Vector6d deck_pose(const WaveSpec& spec, double t) {
  Vector6d b;
  for (int j = 0; j < kNumAxes; ++j) b[j] = spec.axes[j].evaluate(t);
  return b;
}

std::optional<PoseSample> sample_sensor(const SensorSpec& spec,
                                        const WaveSpec& wave, double t_req,
                                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // Draw jitter and dropout in a fixed order so seeded streams stay aligned
  // whether or not frames are dropped.
  const double jitter = uni(rng) * spec.jitter_frac / spec.rate_hz;
  const bool dropped = uni(rng) < spec.dropout_prob;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector6d noise;
  for (int j = 0; j < 3; ++j) noise[j] = gauss(rng) * spec.noise_pos;
  for (int j = 3; j < 6; ++j) noise[j] = gauss(rng) * spec.noise_ang;
  if (dropped) return std::nullopt;

  PoseSample s;
  s.t = t_req + jitter;
  s.b = deck_pose(wave, s.t) + noise;
  return s;
}

SensorStream::SensorStream(const SensorSpec& spec, const WaveSpec& wave,
                           std::uint64_t seed)
    : spec_(spec), wave_(&wave), rng_(seed) {}

std::optional<PoseSample> SensorStream::poll(double t_now) {
  while (true) {
    if (!pending_) {
      const double t_req = frame_ / spec_.rate_hz;
      if (t_req > t_now) return std::nullopt;
      ++frame_;
      pending_ = sample_sensor(spec_, *wave_, t_req, rng_);
      if (!pending_) continue;  // dropout; try the next frame slot
    }
    if (pending_->t <= t_now) {
      auto out = pending_;
      pending_.reset();
      return out;
    }
    return std::nullopt;
  }
}

UavState plant_step(const PlantSpec& spec, const UavState& uav,
                    const Eigen::Matrix<double, 4, 1>& vref, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("plant_step: dt must be positive");
  const double decay = std::exp(-dt / spec.tau);

  UavState out = uav;
  const int pos_idx[4] = {kStatePosX, kStatePosY, kStatePosZ, kStateHeading};
  const int vel_idx[4] = {kStateVelX, kStateVelY, kStateVelZ, kStateHeadingRate};
  const int acc_idx[4] = {kStateAccX, kStateAccY, kStateAccZ, kStateHeadingAcc};

  for (int a = 0; a < 4; ++a) {
    const double target = std::clamp(vref[a], -spec.max_tracked_speed,
                                     spec.max_tracked_speed);
    const double v0 = uav[vel_idx[a]];
    const double v1 = target + (v0 - target) * decay;
    // Exact integral of the exponential approach over dt.
    double dp = target * dt + (v0 - target) * spec.tau * (1.0 - decay);
    if (a < 3) dp += spec.wind[a] * dt;
    out[pos_idx[a]] = uav[pos_idx[a]] + dp;
    out[vel_idx[a]] = v1;
    out[acc_idx[a]] = (target - v1) / spec.tau;
  }
  return out;
}

double deck_height_at(const WaveSpec& wave, double t, double x, double y) {
  const Vector6d b = deck_pose(wave, t);
  // Plane through the USV center with normal Ry(b5) * Rx(b4) * e_z.
  const double c4 = std::cos(b[kAxisRotX]), s4 = std::sin(b[kAxisRotX]);
  const double c5 = std::cos(b[kAxisRotY]), s5 = std::sin(b[kAxisRotY]);
  const double nx = s5 * c4;
  const double ny = -s4;
  const double nz = c5 * c4;
  return b[kAxisZ] - (nx * (x - b[kAxisX]) + ny * (y - b[kAxisY])) / nz;
}

std::optional<ContactReport> check_touchdown(const UavState& uav,
                                             const WaveSpec& wave, double t,
                                             double pad_halfwidth) {
  const Vector6d b = deck_pose(wave, t);
  const double dx = uav[kStatePosX] - b[kAxisX];
  const double dy = uav[kStatePosY] - b[kAxisY];
  if (std::abs(dx) > pad_halfwidth || std::abs(dy) > pad_halfwidth) {
    return std::nullopt;
  }
  const double surface = deck_height_at(wave, t, uav[kStatePosX], uav[kStatePosY]);
  if (uav[kStatePosZ] - surface > 0.0) return std::nullopt;

  ContactReport report;
  report.t = t;
  report.tilt = std::hypot(b[kAxisRotX], b[kAxisRotY]);
  const double h = 1e-4;
  const double deck_rate =
      (deck_height_at(wave, t + h, uav[kStatePosX], uav[kStatePosY]) - surface) / h;
  report.rel_vertical_speed = uav[kStateVelZ] - deck_rate;
  report.lateral_offset = std::hypot(dx, dy);
  return report;
}

}  // namespace decklander
