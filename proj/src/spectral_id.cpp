#include "decklander/spectral_id.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <numeric>

namespace decklander {

ModeSet identify(const SampleWindow& window, int axis, double gate,
                 int max_modes) {
  if (window.size() < 2) {
    throw std::invalid_argument("identify: window must hold at least 2 samples");
  }
  if (window.dt <= 0.0) {
    throw std::invalid_argument("identify: window must be uniform with dt > 0");
  }
  if (gate <= 0.0 || gate >= 1.0) {
    throw std::invalid_argument("identify: gate must lie in (0, 1)");
  }

  const int n = window.size();
  std::vector<double> signal(n);
  for (int i = 0; i < n; ++i) signal[i] = window.values[i][axis];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, signal);

  ModeSet out;
  out.axis = axis;
  out.t_fft = window.t0;
  out.offset = spectrum[0].real() / n;

  // Single-sided amplitudes for bins 1..k_max (Nyquist bin excluded for even
  // n; a real mode there is not resolvable anyway).
  const int k_max = (n - 1) / 2;
  if (k_max < 1) return out;

  std::vector<double> amp(k_max + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) amp[k] = 2.0 * std::abs(spectrum[k]) / n;

  // Floor below which a bin is transform round-off, not signal; the relative
  // gate alone cannot reject dust on a near-constant window.
  double scale = 0.0;
  for (double v : signal) scale = std::max(scale, std::abs(v));
  const double dust = 1e-10 * std::max(scale, 1e-30);

  // Strict local maxima of the amplitude spectrum; edges compare against
  // their single neighbor.
  std::vector<int> peaks;
  for (int k = 1; k <= k_max; ++k) {
    const bool left_ok = (k == 1) || (amp[k] > amp[k - 1]);
    const bool right_ok = (k == k_max) || (amp[k] > amp[k + 1]);
    if (left_ok && right_ok && amp[k] > dust) peaks.push_back(k);
  }
  if (peaks.empty()) return out;

  const double a_max =
      amp[*std::max_element(peaks.begin(), peaks.end(),
                            [&](int a, int b) { return amp[a] < amp[b]; })];
  const double threshold = gate * a_max;

  const double bin_hz = 1.0 / (n * window.dt);
  for (int k : peaks) {
    if (amp[k] < threshold) continue;
    Mode m;
    m.f = k * bin_hz;
    m.A = amp[k];
    // X_k of A*sin(2*pi*f*t + phi0) at an on-bin frequency is
    // (A*n/2) * exp(i*(phi0 - pi/2)); recover the window-start phase.
    m.phi = wrap_phase(std::arg(spectrum[k]) + M_PI / 2.0);
    out.modes.push_back(m);
  }

  std::sort(out.modes.begin(), out.modes.end(),
            [](const Mode& a, const Mode& b) { return a.A > b.A; });
  if (static_cast<int>(out.modes.size()) > max_modes) {
    out.modes.resize(max_modes);
  }
  return out;
}

AccuracyScore accuracy_score(const SampleWindow& window, const ModeSet& modes) {
  if (window.size() < 2) {
    throw std::invalid_argument("accuracy_score: window too short");
  }
  const int n = window.size();

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += window.values[i][modes.axis];
  mean /= n;

  double sq_res = 0.0;
  double sq_dev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = window.values[i][modes.axis];
    const double r = modes.evaluate(window.time_at(i)) - v;
    sq_res += r * r;
    sq_dev += (v - mean) * (v - mean);
  }
  const double rms_dev = std::sqrt(sq_dev / n);
  if (rms_dev <= 1e-12) {
    return {1.0, true, rms_dev};
  }
  const double rmse = std::sqrt(sq_res / n);
  return {std::clamp(1.0 - rmse / rms_dev, 0.0, 1.0), false, rms_dev};
}

ModeMatch match_modes(const ModeSet& old_set, const ModeSet& new_set,
                      double tol_hz) {
  struct Candidate {
    double df;
    int oi;
    int ni;
  };
  std::vector<Candidate> candidates;
  for (int oi = 0; oi < old_set.size(); ++oi) {
    for (int ni = 0; ni < new_set.size(); ++ni) {
      const double df = std::abs(old_set.modes[oi].f - new_set.modes[ni].f);
      if (df <= tol_hz) candidates.push_back({df, oi, ni});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.df != b.df) return a.df < b.df;
              if (a.oi != b.oi) return a.oi < b.oi;
              return a.ni < b.ni;
            });

  ModeMatch match;
  std::vector<bool> old_used(old_set.size(), false);
  std::vector<bool> new_used(new_set.size(), false);
  for (const Candidate& c : candidates) {
    if (old_used[c.oi] || new_used[c.ni]) continue;
    old_used[c.oi] = true;
    new_used[c.ni] = true;
    match.retained.emplace_back(c.oi, c.ni);
  }
  for (int ni = 0; ni < new_set.size(); ++ni) {
    if (!new_used[ni]) match.added.push_back(ni);
  }
  for (int oi = 0; oi < old_set.size(); ++oi) {
    if (!old_used[oi]) match.dropped.push_back(oi);
  }
  return match;
}

}  // namespace decklander
