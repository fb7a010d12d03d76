#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "decklander/csv.hpp"
#include "decklander/episode.hpp"
#include "decklander/pipeline.hpp"
#include "decklander/prediction_study.hpp"

namespace fs = std::filesystem;
using namespace decklander;

namespace {

struct CommonArgs {
  std::string scenario = "moderate";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario,
                  "scenario JSON file or builtin name (calm, moderate, harsh, "
                  "realworld_like, single_pitch, prediction_3mode)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "RNG seed");
}

Controller parse_controller(const std::string& name) {
  if (name == "mpc_ne") return Controller::kMpcNe;
  if (name == "baseline") return Controller::kBaseline;
  throw CLI::ValidationError("--controller must be mpc_ne or baseline");
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

int cmd_episode(const CommonArgs& common, const std::string& controller,
                bool oracle) {
  const Scenario sc = load_scenario(common.scenario);
  EpisodeOptions opt;
  opt.controller = parse_controller(controller);
  opt.oracle_forecast = oracle;
  opt.seed = common.seed;
  opt.record_timeline = true;

  const EpisodeRecord rec = run_episode(sc, opt);
  ensure_dir(common.out_dir);
  write_text_file(common.out_dir + "/timeline.csv", timeline_csv(rec.timeline));
  write_text_file(common.out_dir + "/episode.csv", episodes_csv({rec}));

  std::cout << "scenario=" << sc.name << " seed=" << rec.seed
            << " final_phase=" << phase_name(rec.final_phase)
            << " landed=" << (rec.landed ? "yes" : "no");
  if (rec.landed) {
    std::cout << " t_touchdown=" << rec.t_touchdown
              << " tilt_rad=" << rec.touchdown_tilt
              << " success=" << (rec.success ? "yes" : "no");
  }
  std::cout << "\noutputs in " << common.out_dir << "/\n";
  return 0;
}

int cmd_batch(const CommonArgs& common, const std::string& controller,
              bool oracle, int n, int jobs, bool timelines) {
  const Scenario sc = load_scenario(common.scenario);
  EpisodeOptions opt;
  opt.controller = parse_controller(controller);
  opt.oracle_forecast = oracle;
  opt.record_timeline = timelines;

  const BatchResult result = run_batch(sc, opt, n, common.seed, jobs);
  ensure_dir(common.out_dir);
  write_text_file(common.out_dir + "/episodes.csv", episodes_csv(result.records));
  write_text_file(common.out_dir + "/summary.json", summary_json(result.summary));
  if (timelines) {
    for (const EpisodeRecord& r : result.records) {
      write_text_file(common.out_dir + "/timeline_" + std::to_string(r.seed) +
                          ".csv",
                      timeline_csv(r.timeline));
    }
  }

  const BatchSummary& s = result.summary;
  std::cout << "scenario=" << sc.name << " controller=" << controller
            << (oracle ? " (oracle forecast)" : "") << " episodes=" << s.episodes
            << "\nlanded=" << s.landed << " successes=" << s.successes
            << "\nwithin 10/15/20 deg: " << s.frac_within_10deg << " / "
            << s.frac_within_15deg << " / " << s.frac_within_20deg
            << "\np80 tilt [rad]: " << s.p80_tilt
            << "\nwithin 50 s of FFT latch (successful): "
            << s.frac_within_50s_of_latch << "\noutputs in " << common.out_dir
            << "/\n";
  return 0;
}

int cmd_predict(const CommonArgs& common, const std::string& sensor,
                std::vector<double> horizons, double warmup, double measure) {
  const Scenario sc = load_scenario(common.scenario);
  PredictionStudyOptions opt;
  if (sensor == "vision") {
    opt.sensor = SensorKind::kVision;
  } else if (sensor == "imu") {
    opt.sensor = SensorKind::kImu;
  } else {
    throw CLI::ValidationError("--sensor must be vision or imu");
  }
  if (!horizons.empty()) opt.horizons = std::move(horizons);
  opt.seed = common.seed;
  opt.warmup = warmup;
  opt.measure = measure;

  const PredictionStudyResult result = prediction_study(sc, opt);
  ensure_dir(common.out_dir);
  write_text_file(common.out_dir + "/prediction.csv", prediction_csv(result));

  std::cout << "scenario=" << sc.name << " sensor=" << sensor
            << " ticks=" << result.ticks << "\n";
  for (std::size_t k = 0; k < result.horizons.size(); ++k) {
    std::cout << "  horizon " << result.horizons[k]
              << " s: RMSE = " << result.rmse[k] << " rad\n";
  }
  std::cout << "outputs in " << common.out_dir << "/\n";
  return 0;
}

// Runs the sensor against the wave for one identification window and dumps
// the amplitude spectra of all six axes.
int cmd_spectrum(const CommonArgs& common, const std::string& sensor_name) {
  const Scenario sc = load_scenario(common.scenario);
  std::mt19937_64 rng(common.seed);
  const WaveSpec wave =
      randomized_wave(sc.wave, sc.randomize_phases, sc.amp_jitter, rng);
  const SensorSpec& sensor = sensor_name == "imu" ? sc.imu : sc.vision;
  SensorStream stream(sensor, wave, rng());

  PoseBuffer buffer(sc.retention);
  const double t_end = sc.fft.span + 1.0;
  for (double t = 0.0; t <= t_end; t += 1e-3) {
    while (auto s = stream.poll(t)) buffer.push(*s);
  }
  const double rate =
      sc.fft.resample_rate > 0.0 ? sc.fft.resample_rate : sensor.rate_hz;
  const auto window = buffer.resample(sc.fft.span, rate);
  if (!window) {
    std::cerr << "spectrum: sensor stream did not fill the window\n";
    return 1;
  }

  std::string csv = "axis,f,amplitude,phase\n";
  for (int a = 0; a < kNumAxes; ++a) {
    const ModeSet ms = identify(*window, a, sc.fft.gate, sc.fft.max_modes);
    for (const Mode& m : ms.modes) {
      csv += std::to_string(a + 1) + ',' + csv_num(m.f) + ',' + csv_num(m.A) +
             ',' + csv_num(m.phi) + '\n';
    }
  }
  ensure_dir(common.out_dir);
  write_text_file(common.out_dir + "/spectrum.csv", csv);
  std::cout << "spectrum written to " << common.out_dir << "/spectrum.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decklander: UAV-on-USV landing simulator"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string controller = "mpc_ne";
  bool oracle = false;
  int n = 10;
  int jobs = 0;
  bool timelines = false;
  std::string sensor = "imu";
  std::vector<double> horizons;
  double warmup = 30.0;
  double measure = 60.0;

  CLI::App* episode = app.add_subcommand("episode", "run one landing episode");
  add_common(episode, common);
  episode->add_option("--controller", controller, "mpc_ne or baseline");
  episode->add_flag("--oracle", oracle, "feed ground-truth wave to the MPC");

  CLI::App* batch = app.add_subcommand("batch", "run a Monte Carlo batch");
  add_common(batch, common);
  batch->add_option("--controller", controller, "mpc_ne or baseline");
  batch->add_flag("--oracle", oracle, "feed ground-truth wave to the MPC");
  batch->add_option("--n", n, "number of episodes");
  batch->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  batch->add_flag("--timelines", timelines, "dump per-episode timelines");

  CLI::App* predict = app.add_subcommand("predict", "prediction-accuracy study");
  add_common(predict, common);
  predict->add_option("--sensor", sensor, "vision or imu");
  predict->add_option("--horizons", horizons, "horizons in seconds (<= 1.0)");
  predict->add_option("--warmup", warmup, "observation time before scoring, s");
  predict->add_option("--measure", measure, "scoring duration, s");

  CLI::App* spectrum = app.add_subcommand("spectrum", "dump identified spectra");
  add_common(spectrum, common);
  spectrum->add_option("--sensor", sensor, "vision or imu");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(episode)) return cmd_episode(common, controller, oracle);
    if (app.got_subcommand(batch)) {
      return cmd_batch(common, controller, oracle, n, jobs, timelines);
    }
    if (app.got_subcommand(predict)) {
      return cmd_predict(common, sensor, horizons, warmup, measure);
    }
    if (app.got_subcommand(spectrum)) return cmd_spectrum(common, sensor);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
