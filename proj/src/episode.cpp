#include "decklander/episode.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <atomic>
#include <thread>

#include "decklander/csv.hpp"
#include "decklander/pipeline.hpp"

namespace decklander {

EpisodeRecord run_episode(const Scenario& scenario, const EpisodeOptions& opt) {
  EpisodeRecord rec;
  rec.seed = opt.seed;

  std::mt19937_64 rng(opt.seed);
  const WaveSpec wave = randomized_wave(scenario.wave, scenario.randomize_phases,
                                        scenario.amp_jitter, rng);
  // Drawn unconditionally so the stream stays aligned across controllers.
  std::uniform_real_distribution<double> delay_dist(0.0, 100.0);
  const double baseline_delay = delay_dist(rng);

  MissionConfig mission_cfg = scenario.mission;
  mission_cfg.baseline = (opt.controller == Controller::kBaseline);
  mission_cfg.baseline_delay = baseline_delay;

  SensorStream vision(scenario.vision, wave, rng());

  const double dt = 1.0 / scenario.episode.plant_rate;
  const int ticks_per_control = std::max(
      1, static_cast<int>(std::lround(scenario.episode.plant_rate /
                                      scenario.episode.control_rate)));

  EstimationPipeline pipeline(scenario, scenario.vision.rate_hz,
                              scenario.vision.noise_ang * scenario.vision.noise_ang,
                              scenario.vision.noise_pos * scenario.vision.noise_pos);

  // Spawn above and beside the pad.
  const Vector6d b0 = deck_pose(wave, 0.0);
  UavState uav = UavState::Zero();
  uav[kStatePosX] = b0[kAxisX] + scenario.episode.spawn_lateral;
  uav[kStatePosY] = b0[kAxisY] - 0.5 * scenario.episode.spawn_lateral;
  uav[kStatePosZ] = b0[kAxisZ] + scenario.episode.spawn_height;

  MissionState mission;
  bool descent_committed = false;
  MpcConfig mpc = scenario.mpc;
  InputSequence warm = InputSequence::Zero(4, mpc.mc);
  JerkInput prev_input = JerkInput::Zero();
  Eigen::Matrix<double, 4, 1> vref = Eigen::Matrix<double, 4, 1>::Zero();
  double pad_last_seen = -1e9;
  std::optional<ContactReport> contact;

  const long max_ticks =
      static_cast<long>(std::llround(scenario.episode.duration / dt));
  for (long tick = 0; tick <= max_ticks; ++tick) {
    const double t = tick * dt;

    if (!opt.oracle_forecast) {
      while (auto s = vision.poll(t)) {
        const double rel_h = uav[kStatePosZ] - deck_pose(wave, s->t)[kAxisZ];
        if (rel_h > scenario.vision.max_range) continue;  // pad out of view
        pipeline.ingest(*s);
        pad_last_seen = s->t;
      }
    }

    if (tick % ticks_per_control == 0) {
      if (!opt.oracle_forecast) pipeline.advance(t);

      MissionObservations obs;
      obs.t = t;
      obs.uav = uav;
      obs.contact = contact.has_value();
      if (opt.oracle_forecast) {
        obs.pad_visible = true;
        obs.deck_pose = deck_pose(wave, t);
        obs.fft_accuracy = 1.0;
      } else {
        obs.pad_visible = (t - pad_last_seen) <= 0.5;
        obs.deck_pose = pipeline.pose_estimate(t);
        obs.fft_accuracy = pipeline.accuracy();
      }

      const MissionCommand cmd = automaton_step(mission, mission_cfg, obs);
      double J = 0.0;
      double forecast_tilt_0 = 0.0;

      if (cmd.outputs_zeroed) {
        vref.setZero();
      } else if (mission.phase == Phase::kAscendSearch ||
                 mission.phase == Phase::kHoverAlign ||
                 mission.phase == Phase::kCollect ||
                 mission.phase == Phase::kLand) {
        LandingContext ctx;
        ctx.setpoint = cmd.setpoint;
        ctx.deck_height = obs.deck_pose[kAxisZ];
        ctx.previous_input = prev_input;
        ctx.landing_active = cmd.land_active;
        if (ctx.landing_active) {
          ctx.tilt_x.resize(mpc.mp);
          ctx.tilt_y.resize(mpc.mp);
          for (int m = 1; m <= mpc.mp; ++m) {
            const double tf = t + m * mpc.dt_pred;
            if (opt.oracle_forecast) {
              const Vector6d bf = deck_pose(wave, tf);
              ctx.tilt_x[m - 1] = bf[kAxisRotX];
              ctx.tilt_y[m - 1] = bf[kAxisRotY];
            } else {
              ctx.tilt_x[m - 1] = pipeline.predict_axis(kAxisRotX, tf);
              ctx.tilt_y[m - 1] = pipeline.predict_axis(kAxisRotY, tf);
            }
          }
          forecast_tilt_0 = std::hypot(ctx.tilt_x[0], ctx.tilt_y[0]);
        }

        // Supervisory waiting envelope: hold above the deck until a calm,
        // reachable touchdown instant appears; release the envelope for the
        // committed approach and re-arm it if the window degrades.
        if (cmd.land_active) {
          const LandingWindow win = landing_window(mpc, ctx, uav);
          const double z_rel = uav[kStatePosZ] - ctx.deck_height;
          if (std::getenv("DL_EP_TRACE")) {
            std::fprintf(stderr,
                         "[ep] t=%.2f z_rel=%.3f zd=%.3f commit=%d open=%d "
                         "earliest=%d target=%d tilt@target=%.3f\n",
                         t, z_rel, uav[kStateVelZ], (int)descent_committed,
                         (int)win.open, win.earliest_step, win.target_step,
                         win.target_tilt);
          }
          if (!descent_committed) {
            descent_committed = win.open;
          } else if (z_rel > 0.35 && !win.open) {
            LandingContext probe_ctx = ctx;  // tolerate a degraded window
            const double keep = mission_cfg.commit_abort_factor;
            MpcConfig relaxed = mpc;
            relaxed.commit_tilt = mpc.commit_tilt * keep;
            descent_committed = landing_window(relaxed, probe_ctx, uav).open;
          }
        } else {
          descent_committed = false;
        }

        const MpcSolution sol = solve(mpc, ctx, uav, warm);
        // The reference is held for a whole control period, so command the
        // velocity the plan reaches by the end of that hold, not after one
        // model step.
        const int hold = std::min(ticks_per_control, mpc.mp) - 1;
        vref = {sol.states(kStateVelX, hold), sol.states(kStateVelY, hold),
                sol.states(kStateVelZ, hold),
                sol.states(kStateHeadingRate, hold)};
        warm = shift_input_sequence(sol.u_seq, ticks_per_control);
        prev_input = sol.u_seq.col(std::min(ticks_per_control, mpc.mc) - 1);
        J = sol.J;
        if (sol.budget_limited) ++rec.budget_limited_count;
        if (cmd.land_active && !descent_committed) {
          const double z_rel = uav[kStatePosZ] - ctx.deck_height;
          const double err = z_rel - mission_cfg.wait_altitude;
          const double g = mission_cfg.envelope_gain;
          vref[2] = std::clamp(vref[2], -std::max(0.0, err) * g,
                               std::max(0.0, -err) * g);
        }
        if (cmd.vertical_rate_override) {
          vref[2] = *cmd.vertical_rate_override;
        }
      }

      if (opt.record_timeline) {
        rec.timeline.push_back({t, mission.phase, uav, vref, J,
                                obs.fft_accuracy, forecast_tilt_0});
      }
      if (mission.phase == Phase::kTouchdown || mission.phase == Phase::kAborted) {
        break;
      }
    }

    uav = plant_step(scenario.plant, uav, vref, dt);
    if (!contact) {
      contact = check_touchdown(uav, wave, (tick + 1) * dt,
                                scenario.episode.pad_halfwidth);
      // The automaton consumes the contact signal on the next control tick.
    }
  }

  rec.t_fft_ready = mission.t_fft_latch;
  rec.final_phase = mission.phase;
  if (contact && mission.phase == Phase::kTouchdown) {
    rec.landed = true;
    rec.t_touchdown = contact->t;
    rec.touchdown_tilt = contact->tilt;
    rec.rel_vertical_speed = contact->rel_vertical_speed;
    rec.lateral_offset = contact->lateral_offset;
    rec.success = contact->tilt < kSuccessTiltRad;
  }
  return rec;
}

BatchSummary summarize(const std::vector<EpisodeRecord>& records) {
  BatchSummary s;
  s.episodes = static_cast<int>(records.size());
  constexpr double kDeg = M_PI / 180.0;
  s.tilt_histogram.assign(21, 0);  // 2-degree bins, last bin is 40+ degrees

  std::vector<double> landed_tilts;
  int within_50s = 0;
  for (const EpisodeRecord& r : records) {
    if (!r.landed) continue;
    ++s.landed;
    landed_tilts.push_back(r.touchdown_tilt);
    const int bin = std::min(20, static_cast<int>(r.touchdown_tilt / (2.0 * kDeg)));
    ++s.tilt_histogram[bin];
    if (r.touchdown_tilt < 10.0 * kDeg) s.frac_within_10deg += 1.0;
    if (r.touchdown_tilt < 15.0 * kDeg) s.frac_within_15deg += 1.0;
    if (r.touchdown_tilt < 20.0 * kDeg) s.frac_within_20deg += 1.0;
    if (r.success) {
      ++s.successes;
      if (r.t_fft_ready >= 0.0 && r.t_touchdown - r.t_fft_ready <= 50.0) {
        ++within_50s;
      }
    }
  }
  if (s.episodes > 0) {
    s.frac_within_10deg /= s.episodes;
    s.frac_within_15deg /= s.episodes;
    s.frac_within_20deg /= s.episodes;
  }
  if (!landed_tilts.empty()) {
    std::sort(landed_tilts.begin(), landed_tilts.end());
    const int idx = static_cast<int>(
        std::ceil(0.8 * static_cast<double>(landed_tilts.size()))) - 1;
    s.p80_tilt = landed_tilts[std::max(0, idx)];
  }
  if (s.successes > 0) {
    s.frac_within_50s_of_latch = static_cast<double>(within_50s) / s.successes;
  }
  return s;
}

BatchResult run_batch(const Scenario& scenario, const EpisodeOptions& base,
                      int n, std::uint64_t master_seed, int jobs) {
  if (n < 1) throw std::invalid_argument("run_batch: need n >= 1");
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, n);

  BatchResult result;
  result.records.resize(n);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      EpisodeOptions opt = base;
      opt.seed = master_seed + static_cast<std::uint64_t>(i);
      result.records[i] = run_episode(scenario, opt);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  result.summary = summarize(result.records);
  return result;
}

std::string episodes_csv(const std::vector<EpisodeRecord>& records) {
  std::string out =
      "seed,landed,success,t_fft_ready,t_touchdown,touchdown_tilt,"
      "rel_vertical_speed,lateral_offset,budget_limited_count,final_phase\n";
  for (const EpisodeRecord& r : records) {
    out += std::to_string(r.seed) + ',';
    out += std::string(r.landed ? "1" : "0") + ',';
    out += std::string(r.success ? "1" : "0") + ',';
    out += csv_num(r.t_fft_ready) + ',';
    out += csv_num(r.t_touchdown) + ',';
    out += csv_num(r.touchdown_tilt) + ',';
    out += csv_num(r.rel_vertical_speed) + ',';
    out += csv_num(r.lateral_offset) + ',';
    out += std::to_string(r.budget_limited_count) + ',';
    out += phase_name(r.final_phase);
    out += '\n';
  }
  return out;
}

std::string timeline_csv(const std::vector<TimelineRow>& rows) {
  std::string out =
      "t,phase,x,xd,xdd,y,yd,ydd,z,zd,zdd,eta,etad,etadd,"
      "vref_x,vref_y,vref_z,vref_eta,J,fft_accuracy,forecast_tilt_0\n";
  for (const TimelineRow& r : rows) {
    out += csv_num9(r.t);
    out += ',';
    out += phase_name(r.phase);
    for (int i = 0; i < 12; ++i) {
      out += ',';
      out += csv_num9(r.state[i]);
    }
    for (int i = 0; i < 4; ++i) {
      out += ',';
      out += csv_num9(r.vref[i]);
    }
    out += ',' + csv_num9(r.J) + ',' + csv_num9(r.fft_accuracy) + ',' +
           csv_num9(r.forecast_tilt_0) + '\n';
  }
  return out;
}

std::string summary_json(const BatchSummary& s) {
  nlohmann::json j;
  j["episodes"] = s.episodes;
  j["landed"] = s.landed;
  j["successes"] = s.successes;
  j["tilt_histogram_2deg_bins"] = s.tilt_histogram;
  j["frac_within_10deg"] = s.frac_within_10deg;
  j["frac_within_15deg"] = s.frac_within_15deg;
  j["frac_within_20deg"] = s.frac_within_20deg;
  if (std::isfinite(s.p80_tilt)) {
    j["p80_tilt_rad"] = s.p80_tilt;
  } else {
    j["p80_tilt_rad"] = nullptr;
  }
  j["frac_within_50s_of_latch"] = s.frac_within_50s_of_latch;
  return j.dump(2) + "\n";
}

}  // namespace decklander
