#include "decklander/mode_observer.hpp"

namespace decklander {

Eigen::Matrix2d ModeObserver::mode_transition_block(double f_hz, double dt) {
  const double w = 2.0 * M_PI * f_hz;
  const double c = std::cos(w * dt);
  const double s = std::sin(w * dt);
  Eigen::Matrix2d b;
  b << c, s / w, -w * s, c;
  return b;
}

Eigen::Vector2d ModeObserver::mode_state(const Mode& m) {
  return {m.A * std::sin(m.phi), 2.0 * M_PI * m.A * m.f * std::cos(m.phi)};
}

ModeObserver::ModeObserver(const ModeSet& modes, double t_start, double dt,
                           double lambda, double r_var)
    : axis_(modes.axis), dt_(dt), lambda_(lambda), r_var_(r_var),
      t_last_(t_start) {
  if (dt <= 0.0) throw std::invalid_argument("ModeObserver: dt must be positive");
  if (lambda <= 0.0) throw std::invalid_argument("ModeObserver: lambda must be positive");
  if (r_var <= 0.0) throw std::invalid_argument("ModeObserver: R must be positive");

  const ModeSet at_start = modes.propagated_to(t_start);
  const int n = at_start.size();
  v_.resize(2 * (n + 1));
  for (int i = 0; i < n; ++i) {
    const Mode& m = at_start.modes[i];
    if (m.f <= 0.0) {
      throw std::invalid_argument(
          "ModeObserver: zero-frequency mode; the offset block handles DC");
    }
    freqs_.push_back(m.f);
    v_.segment<2>(2 * i) = mode_state(m);
  }
  v_.segment<2>(2 * n) = Eigen::Vector2d(at_start.offset, 0.0);

  rebuild_system();
  P_ = p0_scale_ * Q_;
}

void ModeObserver::rebuild_system() {
  const int n = n_modes();
  const int d = 2 * (n + 1);
  Psi_.setZero(d, d);
  for (int i = 0; i < n; ++i) {
    Psi_.block<2, 2>(2 * i, 2 * i) = mode_transition_block(freqs_[i], dt_);
  }
  Psi_.block<2, 2>(2 * n, 2 * n).setIdentity();  // zero-dynamics offset block

  C_.setZero(d);
  for (int i = 0; i <= n; ++i) C_[2 * i] = 1.0;

  // Q = 1/2 (Psi Q_I Psi^T + Q_I) dt with Q_I = lambda I.
  const Eigen::MatrixXd qi = lambda_ * Eigen::MatrixXd::Identity(d, d);
  Q_ = 0.5 * (Psi_ * qi * Psi_.transpose() + qi) * dt_;
}

void ModeObserver::predict_step() {
  v_ = Psi_ * v_;
  P_ = Psi_ * P_ * Psi_.transpose() + Q_;
  P_ = 0.5 * (P_ + P_.transpose()).eval();
  t_last_ += dt_;
}

void ModeObserver::step(double b_meas) {
  if (!std::isfinite(b_meas)) {
    throw std::invalid_argument("ModeObserver::step: non-finite measurement");
  }
  const Eigen::VectorXd v_hat = Psi_ * v_;
  Eigen::MatrixXd p_hat = Psi_ * P_ * Psi_.transpose() + Q_;
  const double b_hat = C_ * v_hat;
  const double s = C_ * p_hat * C_.transpose() + r_var_;
  if (!(s > 0.0)) {
    throw std::runtime_error("ModeObserver::step: innovation covariance not positive");
  }
  const Eigen::VectorXd gain = (p_hat * C_.transpose()) / s;
  v_ = v_hat + gain * (b_meas - b_hat);
  P_ = (Eigen::MatrixXd::Identity(dim(), dim()) - gain * C_) * p_hat;
  P_ = 0.5 * (P_ + P_.transpose()).eval();
  t_last_ += dt_;
}

void ModeObserver::reidentify(const ModeSet& report, double tol_hz) {
  if (report.axis != axis_) {
    throw std::invalid_argument("ModeObserver::reidentify: axis mismatch");
  }

  // Old set carries only frequencies; matching ignores amplitude/phase.
  ModeSet current;
  current.axis = axis_;
  for (double f : freqs_) current.modes.push_back({f, 1.0, 0.0});
  const ModeMatch match = match_modes(current, report, tol_hz);

  const ModeSet fresh = report.propagated_to(t_last_);

  const int n_old = n_modes();
  const int n_new = static_cast<int>(match.retained.size() + match.added.size());
  const int d_new = 2 * (n_new + 1);

  // New layout: retained modes in their old order, then added modes, then
  // the offset block (always kept).
  std::vector<std::pair<int, int>> retained = match.retained;
  std::sort(retained.begin(), retained.end());

  std::vector<double> new_freqs;
  Eigen::VectorXd new_v = Eigen::VectorXd::Zero(d_new);
  std::vector<int> old_block_of(n_new + 1, -1);  // source block in the old state

  int blk = 0;
  for (const auto& [oi, ni] : retained) {
    (void)ni;
    new_freqs.push_back(freqs_[oi]);
    new_v.segment<2>(2 * blk) = v_.segment<2>(2 * oi);
    old_block_of[blk] = oi;
    ++blk;
  }
  for (int ni : match.added) {
    new_freqs.push_back(fresh.modes[ni].f);
    new_v.segment<2>(2 * blk) = mode_state(fresh.modes[ni]);
    ++blk;
  }
  new_v.segment<2>(2 * n_new) = v_.segment<2>(2 * n_old);  // offset block
  old_block_of[n_new] = n_old;

  freqs_ = std::move(new_freqs);
  v_ = std::move(new_v);
  rebuild_system();

  // Covariance: retained-to-retained (and offset) blocks survive verbatim;
  // rows/columns of added modes are reset to the initial scale with zero
  // cross terms.
  Eigen::MatrixXd new_p = Eigen::MatrixXd::Zero(d_new, d_new);
  for (int bi = 0; bi <= n_new; ++bi) {
    for (int bj = 0; bj <= n_new; ++bj) {
      if (old_block_of[bi] >= 0 && old_block_of[bj] >= 0) {
        new_p.block<2, 2>(2 * bi, 2 * bj) =
            P_.block<2, 2>(2 * old_block_of[bi], 2 * old_block_of[bj]);
      }
    }
    if (old_block_of[bi] < 0) {
      new_p.block<2, 2>(2 * bi, 2 * bi) =
          p0_scale_ * Q_.block<2, 2>(2 * bi, 2 * bi);
    }
  }
  P_ = std::move(new_p);
}

AmpPhase ModeObserver::amp_phase(int i) const {
  if (i < 0 || i >= n_modes()) {
    throw std::out_of_range("ModeObserver::amp_phase: mode index");
  }
  const double w = 2.0 * M_PI * freqs_[i];
  const double v1 = v_[2 * i];
  const double v2 = v_[2 * i + 1];
  if (std::abs(v1) < 1e-12 && std::abs(v2) < 1e-12) {
    return {0.0, 0.0, true};
  }
  AmpPhase out;
  out.Phi = std::atan2(w * v1, v2);
  const double s = std::sin(out.Phi);
  if (std::abs(s) > 1e-6) {
    out.A = v1 / s;
  } else {
    out.A = v2 / (w * std::cos(out.Phi));
  }
  if (out.A < 0.0) {
    out.A = -out.A;
    out.Phi = wrap_phase(out.Phi + M_PI);
  }
  return out;
}

double ModeObserver::output() const { return C_ * v_; }

double ModeObserver::predict(double t) const {
  if (t < t_last_ - 1e-9) {
    throw std::invalid_argument("ModeObserver::predict: t precedes last observation");
  }
  double b = v_[2 * n_modes()];  // offset state, first component
  for (int i = 0; i < n_modes(); ++i) {
    const AmpPhase ap = amp_phase(i);
    b += ap.A * std::sin(2.0 * M_PI * freqs_[i] * (t - t_last_) + ap.Phi);
  }
  return b;
}

WaveForecast ModeObserver::forecast() const {
  WaveForecast fc;
  fc.t_obs = t_last_;
  fc.offset = v_[2 * n_modes()];
  for (int i = 0; i < n_modes(); ++i) {
    const AmpPhase ap = amp_phase(i);
    fc.modes.push_back({freqs_[i], ap.A, ap.Phi});
  }
  return fc;
}

}  // namespace decklander
