#pragma once

#include <cstdint>

#include "decklander/scenario.hpp"

namespace decklander {

enum class SensorKind { kVision, kImu };

struct PredictionStudyOptions {
  SensorKind sensor{SensorKind::kImu};
  std::vector<double> horizons{0.25, 0.5, 1.0};  // s, each <= 1.0
  std::uint64_t seed{0};
  double warmup{30.0};   // s of observation before errors are recorded
  double measure{60.0};  // s of recording
};

struct PredictionStudyResult {
  std::vector<double> horizons;
  std::vector<double> rmse;  // rad, pooled over both tilt axes
  int ticks{0};              // recorded control ticks
};

/// Runs the sensing pipeline (no vehicle) against a scenario's wave and
/// scores tilt predictions against ground truth at each horizon, at the
/// controller rate.
PredictionStudyResult prediction_study(const Scenario& scenario,
                                       const PredictionStudyOptions& opt);

std::string prediction_csv(const PredictionStudyResult& result);

}  // namespace decklander
