#pragma once

#include <random>
#include <string>

#include "decklander/landing_mpc.hpp"
#include "decklander/mission.hpp"
#include "decklander/sea_sim.hpp"

namespace decklander {

struct EpisodeParams {
  double duration{180.0};     // s, timeout
  double plant_rate{100.0};   // Hz
  double control_rate{20.0};  // Hz
  double pad_halfwidth{1.0};  // m
  double spawn_height{6.0};   // m above the deck
  double spawn_lateral{1.0};  // m initial offset from the pad center
};

struct FftParams {
  double span{20.0};    // s of history per identification window
  double period{5.0};   // s between identifications
  double gate{0.02};    // relative amplitude cutoff
  int max_modes{8};
  // Resample/tap rate; zero means "use the active sensor's nominal rate".
  double resample_rate{0.0};
  // A tilt window with RMS deviation below this is treated as quiet: there
  // is no oscillation to detect, so its accuracy scores 1 (the reconstruction
  // score of a noise-only window would otherwise never clear the latch).
  double quiet_rms_ang{0.05};
};

struct ObserverParams {
  double lambda{1e-4};     // process-noise gain
  double r_floor{1e-8};    // variance floor when the sensor is noiseless
};

/// Everything a reproducible run needs besides the seed.
struct Scenario {
  std::string name{"unnamed"};
  WaveSpec wave;
  bool randomize_phases{true};
  double amp_jitter{0.1};  // relative, uniform

  SensorSpec vision{30.0, 0.2, 0.02, 0.01, 0.02, 15.0};
  SensorSpec imu{100.0, 0.0, 0.005, 0.002, 0.0, 1e9};
  PlantSpec plant;
  MissionConfig mission;
  MpcConfig mpc;
  EpisodeParams episode;
  FftParams fft;
  ObserverParams observer;
  double retention{25.0};  // s of pose history kept
};

/// Named fixtures: calm, moderate, harsh, realworld_like, single_pitch,
/// prediction_3mode. Throws on an unknown name.
Scenario builtin_scenario(const std::string& name);

/// Loads a scenario from a JSON file; a name without a '.json' suffix or '/'
/// falls back to the builtin table.
Scenario load_scenario(const std::string& path_or_name);

Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);

/// Per-episode draw: optionally randomizes phases uniformly and jitters
/// amplitudes, then rescales tilt axes back inside the 0.5 rad envelope.
WaveSpec randomized_wave(const WaveSpec& base, bool randomize_phases,
                         double amp_jitter, std::mt19937_64& rng);

}  // namespace decklander
