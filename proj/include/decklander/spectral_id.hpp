#pragma once

#include <utility>

#include "decklander/types.hpp"

namespace decklander {

struct AccuracyScore {
  double value{0.0};
  bool degenerate_input{false};
  double rms_deviation{0.0};  // RMS of the window about its mean
};

/// Result of greedy nearest-frequency pairing between two mode sets.
/// Indices refer into the respective ModeSet::modes vectors.
struct ModeMatch {
  std::vector<std::pair<int, int>> retained;  // (old index, new index)
  std::vector<int> added;                     // unpaired new modes
  std::vector<int> dropped;                   // unpaired old modes
};

/// Decomposes one axis of a uniform window into periodic modes.
///
/// The offset is the spectrum's zero-frequency (mean) term. Modes are the
/// strict local maxima of the amplitude spectrum that survive the relative
/// gate: amplitudes below gate * (largest peak) are discarded as noise.
/// Phases are referenced to the window start (ModeSet::t_fft = window.t0).
/// `max_modes` caps the output at the strongest peaks.
ModeSet identify(const SampleWindow& window, int axis, double gate,
                 int max_modes = 8);

/// Normalized reconstruction score in [0, 1]:
///   1 - RMSE(reconstruction, window) / RMS(window - mean).
/// A zero-variance window scores 1.0 with the degenerate flag set.
AccuracyScore accuracy_score(const SampleWindow& window, const ModeSet& modes);

/// Greedy nearest-frequency pairing; pairs farther apart than `tol_hz`
/// are not retained. Conserves modes: |retained|+|added| = |new modes|,
/// |retained|+|dropped| = |old modes|.
ModeMatch match_modes(const ModeSet& old_set, const ModeSet& new_set,
                      double tol_hz);

}  // namespace decklander
