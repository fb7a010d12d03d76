#include "decklander/pose_stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace decklander {

PoseBuffer::PoseBuffer(double retention_s) : retention_(retention_s) {
  if (retention_s <= 0.0) {
    throw std::invalid_argument("PoseBuffer: retention must be positive");
  }
}

void PoseBuffer::push(const PoseSample& sample) {
  if (!samples_.empty() && sample.t <= samples_.back().t) {
    throw std::invalid_argument(
        "PoseBuffer: non-monotonic timestamp (t=" + std::to_string(sample.t) +
        " after t=" + std::to_string(samples_.back().t) + ")");
  }
  if (!sample.b.allFinite() || !std::isfinite(sample.t)) {
    throw std::invalid_argument("PoseBuffer: non-finite sample");
  }
  samples_.push_back(sample);

  // Evict everything older than the retention span but keep one sample at or
  // before the cut; the oldest retained instant must stay bracketed.
  const double cutoff = samples_.back().t - retention_;
  while (samples_.size() >= 2 && samples_[1].t <= cutoff) {
    samples_.pop_front();
  }
}

double PoseBuffer::earliest_t() const {
  if (samples_.empty()) throw std::logic_error("PoseBuffer: empty");
  return samples_.front().t;
}

double PoseBuffer::latest_t() const {
  if (samples_.empty()) throw std::logic_error("PoseBuffer: empty");
  return samples_.back().t;
}

double PoseBuffer::span() const {
  return samples_.empty() ? 0.0 : latest_t() - earliest_t();
}

std::optional<Vector6d> PoseBuffer::interpolate(double t,
                                                double max_gap_s) const {
  if (samples_.empty()) return std::nullopt;
  if (t < samples_.front().t || t > samples_.back().t) return std::nullopt;

  auto it = std::lower_bound(
      samples_.begin(), samples_.end(), t,
      [](const PoseSample& s, double time) { return s.t < time; });
  if (it->t == t) return it->b;

  const PoseSample& hi = *it;
  const PoseSample& lo = *std::prev(it);
  if (hi.t - lo.t > max_gap_s) return std::nullopt;
  const double w = (t - lo.t) / (hi.t - lo.t);
  return Vector6d((1.0 - w) * lo.b + w * hi.b);
}

std::optional<SampleWindow> PoseBuffer::resample(double span_s, double rate_hz,
                                                 double max_gap_s) const {
  if (span_s <= 0.0 || rate_hz <= 0.0) {
    throw std::invalid_argument("PoseBuffer::resample: span and rate must be positive");
  }
  if (samples_.empty() || span() + 1e-12 < span_s) return std::nullopt;

  const double t_end = samples_.back().t;
  const double t0 = t_end - span_s;
  const int n_intervals = static_cast<int>(std::floor(span_s * rate_hz + 1e-9));
  const double dt = 1.0 / rate_hz;

  // A dropout gap inside the window invalidates it; interpolating across a
  // long hole would fabricate motion.
  auto first = std::lower_bound(
      samples_.begin(), samples_.end(), t0,
      [](const PoseSample& s, double time) { return s.t < time; });
  if (first != samples_.begin()) --first;  // include the bracketing sample
  for (auto it = first; std::next(it) != samples_.end(); ++it) {
    if (std::next(it)->t - it->t > max_gap_s) return std::nullopt;
  }

  SampleWindow w;
  w.t0 = t0;
  w.dt = dt;
  w.values.reserve(n_intervals + 1);
  for (int i = 0; i <= n_intervals; ++i) {
    const double t = (i == n_intervals && t0 + i * dt > t_end) ? t_end : t0 + i * dt;
    auto v = interpolate(std::min(t, t_end), max_gap_s);
    if (!v) return std::nullopt;
    w.values.push_back(*v);
  }
  return w;
}

std::vector<PoseSample> load_pose_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_pose_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_pose_csv: empty file");
  // Tolerate whitespace in the header but require the canonical columns.
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               header.end());
  if (header != "t,b1,b2,b3,b4,b5,b6") {
    throw std::runtime_error("load_pose_csv: unexpected header '" + line + "'");
  }

  std::vector<PoseSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    PoseSample s;
    for (int col = 0; col < 7; ++col) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("load_pose_csv: short row at line " +
                                 std::to_string(line_no));
      }
      const double v = std::stod(cell);
      if (col == 0) {
        s.t = v;
      } else {
        s.b[col - 1] = v;
      }
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace decklander
