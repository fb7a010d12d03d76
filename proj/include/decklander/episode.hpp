#pragma once

#include <cstdint>
#include <limits>

#include "decklander/scenario.hpp"

namespace decklander {

enum class Controller { kMpcNe, kBaseline };

struct EpisodeOptions {
  Controller controller{Controller::kMpcNe};
  // Feed ground-truth wave knowledge to the controller, bypassing the
  // sensing pipeline (used by the numerical-setting comparison).
  bool oracle_forecast{false};
  std::uint64_t seed{0};
  bool record_timeline{false};
};

struct TimelineRow {
  double t{0.0};
  Phase phase{Phase::kAscendSearch};
  UavState state{UavState::Zero()};
  Eigen::Matrix<double, 4, 1> vref{Eigen::Matrix<double, 4, 1>::Zero()};
  double J{0.0};
  double fft_accuracy{0.0};
  double forecast_tilt_0{0.0};
};

struct EpisodeRecord {
  std::uint64_t seed{0};
  double t_fft_ready{-1.0};   // first time the accuracy latch fired
  double t_touchdown{-1.0};
  double touchdown_tilt{std::numeric_limits<double>::quiet_NaN()};
  double rel_vertical_speed{std::numeric_limits<double>::quiet_NaN()};
  double lateral_offset{std::numeric_limits<double>::quiet_NaN()};
  bool landed{false};
  bool success{false};  // landed with tilt below 0.35 rad
  int budget_limited_count{0};
  Phase final_phase{Phase::kAscendSearch};
  std::vector<TimelineRow> timeline;  // filled when requested
};

inline constexpr double kSuccessTiltRad = 0.35;  // 20 degrees

EpisodeRecord run_episode(const Scenario& scenario, const EpisodeOptions& opt);

struct BatchSummary {
  int episodes{0};
  int landed{0};
  int successes{0};
  std::vector<int> tilt_histogram;  // 2-degree bins over landed episodes
  double frac_within_10deg{0.0};    // over all episodes
  double frac_within_15deg{0.0};
  double frac_within_20deg{0.0};
  double p80_tilt{std::numeric_limits<double>::quiet_NaN()};  // landed only
  // Among successful landings: fraction touching down within 50 s of the
  // identification-accuracy latch.
  double frac_within_50s_of_latch{0.0};
};

struct BatchResult {
  std::vector<EpisodeRecord> records;
  BatchSummary summary;
};

BatchSummary summarize(const std::vector<EpisodeRecord>& records);

/// Runs n episodes seeded master_seed + index. `jobs` <= 0 picks the
/// hardware concurrency; records come back ordered by index regardless of
/// scheduling.
BatchResult run_batch(const Scenario& scenario, const EpisodeOptions& base,
                      int n, std::uint64_t master_seed, int jobs = 0);

/// Deterministic CSV renderings (also used by the determinism check).
std::string episodes_csv(const std::vector<EpisodeRecord>& records);
std::string timeline_csv(const std::vector<TimelineRow>& rows);
std::string summary_json(const BatchSummary& summary);

}  // namespace decklander
