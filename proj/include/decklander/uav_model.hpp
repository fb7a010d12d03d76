#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace decklander {

// Multirotor prediction state, ordered (x, xd, xdd, y, yd, ydd, z, zd, zdd,
// eta, etad, etadd): position/velocity/acceleration per axis plus heading.
// The control input is the jerk in each of the four axes.
template <typename Scalar>
using UavStateT = Eigen::Matrix<Scalar, 12, 1>;
template <typename Scalar>
using JerkInputT = Eigen::Matrix<Scalar, 4, 1>;

using UavState = UavStateT<double>;
using JerkInput = JerkInputT<double>;

// State-vector indices.
inline constexpr int kStatePosX = 0;
inline constexpr int kStateVelX = 1;
inline constexpr int kStateAccX = 2;
inline constexpr int kStatePosY = 3;
inline constexpr int kStateVelY = 4;
inline constexpr int kStateAccY = 5;
inline constexpr int kStatePosZ = 6;
inline constexpr int kStateVelZ = 7;
inline constexpr int kStateAccZ = 8;
inline constexpr int kStateHeading = 9;
inline constexpr int kStateHeadingRate = 10;
inline constexpr int kStateHeadingAcc = 11;

/// Discrete triple-integrator model x' = D x + E u with jerk input,
/// replicated over four decoupled axes via the Kronecker product.
template <typename Scalar>
struct ModelMatricesT {
  Eigen::Matrix<Scalar, 12, 12> D;
  Eigen::Matrix<Scalar, 12, 4> E;
  Scalar dt_pred;
};

using ModelMatrices = ModelMatricesT<double>;

/// Per-axis Taylor block of the triple integrator over one step.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> integrator_block(Scalar dt) {
  Eigen::Matrix<Scalar, 3, 3> d;
  d << Scalar(1), dt, dt * dt / Scalar(2),
       Scalar(0), Scalar(1), dt,
       Scalar(0), Scalar(0), Scalar(1);
  return d;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> jerk_block(Scalar dt) {
  return {dt * dt * dt / Scalar(6), dt * dt / Scalar(2), dt};
}

template <typename Scalar>
ModelMatricesT<Scalar> build_matrices(Scalar dt_pred) {
  if (!(dt_pred > Scalar(0))) {
    throw std::invalid_argument("build_matrices: dt_pred must be positive");
  }
  ModelMatricesT<Scalar> m;
  m.dt_pred = dt_pred;
  m.D.setZero();
  m.E.setZero();
  const auto db = integrator_block(dt_pred);
  const auto eb = jerk_block(dt_pred);
  for (int axis = 0; axis < 4; ++axis) {
    m.D.template block<3, 3>(3 * axis, 3 * axis) = db;
    m.E.template block<3, 1>(3 * axis, axis) = eb;
  }
  return m;
}

template <typename Scalar>
UavStateT<Scalar> step(const ModelMatricesT<Scalar>& m,
                       const UavStateT<Scalar>& s,
                       const JerkInputT<Scalar>& u) {
  return m.D * s + m.E * u;
}

/// Rolls the model out for `mp` steps from s0. The input sequence holds the
/// `mc` free inputs (mc <= mp); beyond the control horizon the last input is
/// held. Returns states 1..mp.
template <typename Scalar>
std::vector<UavStateT<Scalar>> rollout(
    const ModelMatricesT<Scalar>& m, const UavStateT<Scalar>& s0,
    const std::vector<JerkInputT<Scalar>>& u_seq, int mp, int mc) {
  if (static_cast<int>(u_seq.size()) != mc) {
    throw std::invalid_argument("rollout: input sequence length must equal mc");
  }
  if (mc < 1 || mc > mp) {
    throw std::invalid_argument("rollout: need 1 <= mc <= mp");
  }
  std::vector<UavStateT<Scalar>> states;
  states.reserve(mp);
  UavStateT<Scalar> x = s0;
  for (int k = 0; k < mp; ++k) {
    const auto& u = u_seq[std::min(k, mc - 1)];
    x = step(m, x, u);
    states.push_back(x);
  }
  return states;
}

}  // namespace decklander
