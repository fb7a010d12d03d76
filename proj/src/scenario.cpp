#include "decklander/scenario.hpp"

#include <json.hpp>

#include <fstream>

namespace decklander {

namespace {

using nlohmann::json;

ModeSet tilt_axis(int axis, std::initializer_list<Mode> modes) {
  ModeSet ms;
  ms.axis = axis;
  ms.modes = modes;
  return ms;
}

Scenario base_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  return s;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (j.contains(key)) return j.at(key).get<T>();
  return fallback;
}

SensorSpec sensor_from_json(const json& j, const SensorSpec& defaults) {
  SensorSpec s = defaults;
  s.rate_hz = get_or(j, "rate_hz", s.rate_hz);
  s.jitter_frac = get_or(j, "jitter_frac", s.jitter_frac);
  s.noise_pos = get_or(j, "noise_pos", s.noise_pos);
  s.noise_ang = get_or(j, "noise_ang", s.noise_ang);
  s.dropout_prob = get_or(j, "dropout_prob", s.dropout_prob);
  s.max_range = get_or(j, "max_range", s.max_range);
  return s;
}

json sensor_to_json(const SensorSpec& s) {
  return json{{"rate_hz", s.rate_hz},       {"jitter_frac", s.jitter_frac},
              {"noise_pos", s.noise_pos},   {"noise_ang", s.noise_ang},
              {"dropout_prob", s.dropout_prob}, {"max_range", s.max_range}};
}

}  // namespace

Scenario builtin_scenario(const std::string& name) {
  Scenario s = base_scenario(name);
  // Axis indices in fixtures follow the pose vector: rotation about x is
  // b4 (index 3), rotation about y is b5 (index 4).
  if (name == "calm") {
    s.wave.axes[kAxisRotX] = tilt_axis(kAxisRotX, {{0.15, 0.06, 0.0}});
    s.wave.axes[kAxisRotY] = tilt_axis(kAxisRotY, {{0.18, 0.05, 0.5}});
  } else if (name == "moderate") {
    s.wave.axes[kAxisRotX] =
        tilt_axis(kAxisRotX, {{0.12, 0.18, 0.0}, {0.30, 0.06, 1.1}});
    s.wave.axes[kAxisRotY] =
        tilt_axis(kAxisRotY, {{0.15, 0.16, 0.7}, {0.36, 0.06, -0.9}});
  } else if (name == "harsh") {
    // One dominant swell per tilt axis with shorter-period clutter; the
    // dominants differ slightly so simultaneous calm windows recur but stay
    // brief.
    s.wave.axes[kAxisRotX] = tilt_axis(
        kAxisRotX,
        {{0.12, 0.38, 0.0}, {0.31, 0.07, 1.0}, {0.53, 0.04, -1.3}, {0.90, 0.01, 2.0}});
    s.wave.axes[kAxisRotY] = tilt_axis(
        kAxisRotY,
        {{0.145, 0.37, 0.4}, {0.36, 0.08, -0.6}, {0.62, 0.04, 2.4}, {0.97, 0.01, -2.8}});
  } else if (name == "realworld_like") {
    s.wave.axes[kAxisRotX] = tilt_axis(kAxisRotX, {{0.25, 0.30, 0.0}});
    s.wave.axes[kAxisRotY] = tilt_axis(kAxisRotY, {{0.22, 0.28, 1.2}});
  } else if (name == "single_pitch") {
    s.wave.axes[kAxisRotX] = tilt_axis(kAxisRotX, {{0.20, 0.30, 0.0}});
  } else if (name == "prediction_3mode") {
    s.wave.axes[kAxisRotX] = tilt_axis(
        kAxisRotX, {{0.10, 0.12, 0.0}, {0.25, 0.10, 0.9}, {0.40, 0.05, -1.7}});
    s.wave.axes[kAxisRotY] = tilt_axis(
        kAxisRotY, {{0.15, 0.12, 0.5}, {0.30, 0.08, -0.4}, {0.45, 0.05, 2.2}});
  } else {
    throw std::invalid_argument("builtin_scenario: unknown scenario '" + name + "'");
  }
  s.wave.validate();
  return s;
}

WaveSpec randomized_wave(const WaveSpec& base, bool randomize_phases,
                         double amp_jitter, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  std::uniform_real_distribution<double> jitter(1.0 - amp_jitter,
                                                1.0 + amp_jitter);
  WaveSpec out = base;
  for (int j = 0; j < kNumAxes; ++j) {
    for (Mode& m : out.axes[j].modes) {
      if (randomize_phases) m.phi = wrap_phase(phase(rng));
      if (amp_jitter > 0.0) m.A *= jitter(rng);
    }
  }
  // Jitter may push the tilt sums past the envelope; rescale those axes.
  for (int j : {kAxisRotX, kAxisRotY}) {
    double sum = 0.0;
    for (const Mode& m : out.axes[j].modes) sum += std::abs(m.A);
    if (sum > 0.5) {
      for (Mode& m : out.axes[j].modes) m.A *= 0.5 / sum;
    }
  }
  out.validate();
  return out;
}

Scenario scenario_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  Scenario s;
  s.name = get_or<std::string>(j, "name", "unnamed");

  if (j.contains("wave")) {
    const json& jw = j.at("wave");
    for (const json& ja : jw.value("axes", json::array())) {
      const int axis_b = ja.at("axis").get<int>();  // 1-based, as in b1..b6
      if (axis_b < 1 || axis_b > 6) {
        throw std::invalid_argument("scenario: wave axis must be in 1..6");
      }
      ModeSet& ms = s.wave.axes[axis_b - 1];
      ms.offset = get_or(ja, "offset", 0.0);
      ms.modes.clear();
      for (const json& jm : ja.value("modes", json::array())) {
        ms.modes.push_back(
            {jm.at("f").get<double>(), jm.at("A").get<double>(),
             get_or(jm, "phi", 0.0)});
      }
    }
  }
  s.randomize_phases = get_or(j, "randomize_phases", s.randomize_phases);
  s.amp_jitter = get_or(j, "amp_jitter", s.amp_jitter);

  if (j.contains("vision")) s.vision = sensor_from_json(j.at("vision"), s.vision);
  if (j.contains("imu")) s.imu = sensor_from_json(j.at("imu"), s.imu);

  if (j.contains("plant")) {
    const json& jp = j.at("plant");
    s.plant.tau = get_or(jp, "tau", s.plant.tau);
    s.plant.max_tracked_speed = get_or(jp, "max_tracked_speed", s.plant.max_tracked_speed);
    if (jp.contains("wind")) {
      const auto w = jp.at("wind").get<std::vector<double>>();
      if (w.size() != 3) throw std::invalid_argument("scenario: wind must have 3 entries");
      s.plant.wind = Eigen::Vector3d(w[0], w[1], w[2]);
    }
  }

  if (j.contains("mission")) {
    const json& jm = j.at("mission");
    s.mission.hover_altitude = get_or(jm, "hover_altitude", s.mission.hover_altitude);
    s.mission.ascend_step = get_or(jm, "ascend_step", s.mission.ascend_step);
    s.mission.altitude_ceiling = get_or(jm, "altitude_ceiling", s.mission.altitude_ceiling);
    s.mission.align_pos_tol = get_or(jm, "align_pos_tol", s.mission.align_pos_tol);
    s.mission.align_alt_tol = get_or(jm, "align_alt_tol", s.mission.align_alt_tol);
    s.mission.baseline_descent_rate =
        get_or(jm, "baseline_descent_rate", s.mission.baseline_descent_rate);
    s.mission.wait_altitude = get_or(jm, "wait_altitude", s.mission.wait_altitude);
    s.mission.commit_abort_factor =
        get_or(jm, "commit_abort_factor", s.mission.commit_abort_factor);
    s.mission.envelope_gain = get_or(jm, "envelope_gain", s.mission.envelope_gain);
    s.mission.activation.min_accuracy =
        get_or(jm, "accuracy_threshold", s.mission.activation.min_accuracy);
    s.mission.activation.pos_tol = get_or(jm, "activation_pos_tol", s.mission.activation.pos_tol);
    s.mission.activation.vel_tol = get_or(jm, "activation_vel_tol", s.mission.activation.vel_tol);
  }

  if (j.contains("mpc")) {
    const json& jc = j.at("mpc");
    s.mpc.mp = get_or(jc, "mp", s.mpc.mp);
    s.mpc.mc = get_or(jc, "mc", s.mpc.mc);
    s.mpc.dt_pred = get_or(jc, "dt_pred", s.mpc.dt_pred);
    s.mpc.alpha_l = get_or(jc, "alpha_l", s.mpc.alpha_l);
    s.mpc.h_d = get_or(jc, "h_d", s.mpc.h_d);
    s.mpc.v_max = get_or(jc, "v_max", s.mpc.v_max);
    s.mpc.a_max = get_or(jc, "a_max", s.mpc.a_max);
    s.mpc.soft_weight = get_or(jc, "soft_weight", s.mpc.soft_weight);
    s.mpc.commit_tilt = get_or(jc, "commit_tilt", s.mpc.commit_tilt);
    s.mpc.max_iterations = get_or(jc, "max_iterations", s.mpc.max_iterations);
    s.mpc.time_budget_ms = get_or(jc, "time_budget_ms", s.mpc.time_budget_ms);
    s.mpc.grad_tolerance = get_or(jc, "grad_tolerance", s.mpc.grad_tolerance);
    if (jc.contains("state_penalty")) {
      const auto v = jc.at("state_penalty").get<std::vector<double>>();
      if (v.size() != 12) throw std::invalid_argument("scenario: state_penalty needs 12 entries");
      for (int i = 0; i < 12; ++i) s.mpc.state_penalty[i] = v[i];
    }
    if (jc.contains("input_rate_penalty")) {
      const auto v = jc.at("input_rate_penalty").get<std::vector<double>>();
      if (v.size() != 4) throw std::invalid_argument("scenario: input_rate_penalty needs 4 entries");
      for (int i = 0; i < 4; ++i) s.mpc.input_rate_penalty[i] = v[i];
    }
    if (jc.contains("u_max")) {
      const auto v = jc.at("u_max").get<std::vector<double>>();
      if (v.size() != 4) throw std::invalid_argument("scenario: u_max needs 4 entries");
      for (int i = 0; i < 4; ++i) s.mpc.u_max[i] = v[i];
      s.mpc.u_min = -s.mpc.u_max;
    }
  }

  if (j.contains("episode")) {
    const json& je = j.at("episode");
    s.episode.duration = get_or(je, "duration", s.episode.duration);
    s.episode.plant_rate = get_or(je, "plant_rate", s.episode.plant_rate);
    s.episode.control_rate = get_or(je, "control_rate", s.episode.control_rate);
    s.episode.pad_halfwidth = get_or(je, "pad_halfwidth", s.episode.pad_halfwidth);
    s.episode.spawn_height = get_or(je, "spawn_height", s.episode.spawn_height);
    s.episode.spawn_lateral = get_or(je, "spawn_lateral", s.episode.spawn_lateral);
  }

  if (j.contains("fft")) {
    const json& jf = j.at("fft");
    s.fft.span = get_or(jf, "span", s.fft.span);
    s.fft.period = get_or(jf, "period", s.fft.period);
    s.fft.gate = get_or(jf, "gate", s.fft.gate);
    s.fft.max_modes = get_or(jf, "max_modes", s.fft.max_modes);
    s.fft.resample_rate = get_or(jf, "resample_rate", s.fft.resample_rate);
    s.fft.quiet_rms_ang = get_or(jf, "quiet_rms_ang", s.fft.quiet_rms_ang);
  }
  if (j.contains("observer")) {
    const json& jo = j.at("observer");
    s.observer.lambda = get_or(jo, "lambda", s.observer.lambda);
    s.observer.r_floor = get_or(jo, "r_floor", s.observer.r_floor);
  }
  s.retention = get_or(j, "retention", s.retention);

  s.wave.validate();
  return s;
}

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  j["name"] = s.name;
  json axes = json::array();
  for (int a = 0; a < kNumAxes; ++a) {
    const ModeSet& ms = s.wave.axes[a];
    if (ms.modes.empty() && ms.offset == 0.0) continue;
    json ja;
    ja["axis"] = a + 1;
    ja["offset"] = ms.offset;
    json modes = json::array();
    for (const Mode& m : ms.modes) {
      modes.push_back({{"f", m.f}, {"A", m.A}, {"phi", m.phi}});
    }
    ja["modes"] = modes;
    axes.push_back(ja);
  }
  j["wave"] = {{"axes", axes}};
  j["randomize_phases"] = s.randomize_phases;
  j["amp_jitter"] = s.amp_jitter;
  j["vision"] = sensor_to_json(s.vision);
  j["imu"] = sensor_to_json(s.imu);
  j["plant"] = {{"tau", s.plant.tau},
                {"wind", {s.plant.wind[0], s.plant.wind[1], s.plant.wind[2]}},
                {"max_tracked_speed", s.plant.max_tracked_speed}};
  j["mission"] = {{"hover_altitude", s.mission.hover_altitude},
                  {"ascend_step", s.mission.ascend_step},
                  {"altitude_ceiling", s.mission.altitude_ceiling},
                  {"align_pos_tol", s.mission.align_pos_tol},
                  {"align_alt_tol", s.mission.align_alt_tol},
                  {"baseline_descent_rate", s.mission.baseline_descent_rate},
                  {"wait_altitude", s.mission.wait_altitude},
                  {"commit_abort_factor", s.mission.commit_abort_factor},
                  {"envelope_gain", s.mission.envelope_gain},
                  {"accuracy_threshold", s.mission.activation.min_accuracy},
                  {"activation_pos_tol", s.mission.activation.pos_tol},
                  {"activation_vel_tol", s.mission.activation.vel_tol}};
  std::vector<double> sp(s.mpc.state_penalty.data(), s.mpc.state_penalty.data() + 12);
  std::vector<double> tp(s.mpc.input_rate_penalty.data(), s.mpc.input_rate_penalty.data() + 4);
  std::vector<double> um(s.mpc.u_max.data(), s.mpc.u_max.data() + 4);
  j["mpc"] = {{"mp", s.mpc.mp},
              {"mc", s.mpc.mc},
              {"dt_pred", s.mpc.dt_pred},
              {"alpha_l", s.mpc.alpha_l},
              {"h_d", s.mpc.h_d},
              {"v_max", s.mpc.v_max},
              {"a_max", s.mpc.a_max},
              {"soft_weight", s.mpc.soft_weight},
              {"commit_tilt", s.mpc.commit_tilt},
              {"max_iterations", s.mpc.max_iterations},
              {"time_budget_ms", s.mpc.time_budget_ms},
              {"grad_tolerance", s.mpc.grad_tolerance},
              {"state_penalty", sp},
              {"input_rate_penalty", tp},
              {"u_max", um}};
  j["episode"] = {{"duration", s.episode.duration},
                  {"plant_rate", s.episode.plant_rate},
                  {"control_rate", s.episode.control_rate},
                  {"pad_halfwidth", s.episode.pad_halfwidth},
                  {"spawn_height", s.episode.spawn_height},
                  {"spawn_lateral", s.episode.spawn_lateral}};
  j["fft"] = {{"span", s.fft.span},
              {"period", s.fft.period},
              {"gate", s.fft.gate},
              {"max_modes", s.fft.max_modes},
              {"resample_rate", s.fft.resample_rate},
              {"quiet_rms_ang", s.fft.quiet_rms_ang}};
  j["observer"] = {{"lambda", s.observer.lambda}, {"r_floor", s.observer.r_floor}};
  j["retention"] = s.retention;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path_or_name) {
  const bool looks_like_path =
      path_or_name.find('/') != std::string::npos ||
      path_or_name.size() > 5 &&
          path_or_name.substr(path_or_name.size() - 5) == ".json";
  if (!looks_like_path) return builtin_scenario(path_or_name);

  std::ifstream in(path_or_name);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path_or_name);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scenario_from_json_text(text);
}

}  // namespace decklander
