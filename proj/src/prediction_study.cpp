#include "decklander/prediction_study.hpp"

#include "decklander/csv.hpp"
#include "decklander/pipeline.hpp"

namespace decklander {

PredictionStudyResult prediction_study(const Scenario& scenario,
                                       const PredictionStudyOptions& opt) {
  for (double h : opt.horizons) {
    if (h < 0.0 || h > 1.0) {
      throw std::invalid_argument(
          "prediction_study: horizons must lie in [0, 1] s");
    }
  }

  std::mt19937_64 rng(opt.seed);
  const WaveSpec wave = randomized_wave(scenario.wave, scenario.randomize_phases,
                                        scenario.amp_jitter, rng);
  const SensorSpec& sensor =
      opt.sensor == SensorKind::kVision ? scenario.vision : scenario.imu;
  SensorStream stream(sensor, wave, rng());
  EstimationPipeline pipeline(scenario, sensor.rate_hz, sensor.noise_ang,
                              sensor.noise_pos);

  PredictionStudyResult result;
  result.horizons = opt.horizons;
  result.rmse.assign(opt.horizons.size(), 0.0);
  std::vector<double> sq_sum(opt.horizons.size(), 0.0);

  const double tick_dt = 1.0 / scenario.episode.control_rate;
  const double t_end = opt.warmup + opt.measure;
  long n_ticks = 0;
  for (double t = 0.0; t <= t_end + 1e-9; t += tick_dt) {
    while (auto s = stream.poll(t)) pipeline.ingest(*s);
    pipeline.advance(t);
    if (!pipeline.ready() || t < opt.warmup) continue;

    ++n_ticks;
    for (std::size_t k = 0; k < opt.horizons.size(); ++k) {
      const double tf = t + opt.horizons[k];
      const Vector6d truth = deck_pose(wave, tf);
      const double ex =
          pipeline.predict_axis(kAxisRotX, tf) - truth[kAxisRotX];
      const double ey =
          pipeline.predict_axis(kAxisRotY, tf) - truth[kAxisRotY];
      sq_sum[k] += ex * ex + ey * ey;
    }
  }

  result.ticks = static_cast<int>(n_ticks);
  for (std::size_t k = 0; k < opt.horizons.size(); ++k) {
    result.rmse[k] =
        n_ticks > 0 ? std::sqrt(sq_sum[k] / (2.0 * n_ticks)) : 0.0;
  }
  return result;
}

std::string prediction_csv(const PredictionStudyResult& result) {
  std::string out = "horizon,rmse\n";
  for (std::size_t k = 0; k < result.horizons.size(); ++k) {
    out += csv_num(result.horizons[k]) + ',' + csv_num(result.rmse[k]) + '\n';
  }
  return out;
}

}  // namespace decklander
