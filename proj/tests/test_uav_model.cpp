#include <doctest.h>

#include <random>

#include "decklander/uav_model.hpp"
#include "oracles.hpp"

using namespace decklander;

TEST_CASE("matrices at dt=0.01 match the stated polynomials") {
  const ModelMatrices m = build_matrices(0.01);
  CHECK(m.D(0, 0) == 1.0);
  CHECK(m.D(0, 1) == 0.01);
  CHECK(m.D(0, 2) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(m.E(0, 0) == doctest::Approx(1.0 / 6.0 * 1e-6).epsilon(1e-9));
  CHECK(m.E(1, 0) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(m.E(2, 0) == 0.01);
}

TEST_CASE("D and E carry the Kronecker block structure") {
  const ModelMatrices m = build_matrices(0.02);
  const Eigen::Matrix3d block = m.D.block<3, 3>(0, 0);
  for (int a = 0; a < 4; ++a) {
    CHECK((m.D.block<3, 3>(3 * a, 3 * a) - block).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      if (r / 3 != c / 3) CHECK(m.D(r, c) == 0.0);
    }
  }
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (r / 3 != c) CHECK(m.E(r, c) == 0.0);
    }
  }
  // Upper-triangular Taylor block.
  CHECK(block(1, 0) == 0.0);
  CHECK(block(2, 0) == 0.0);
  CHECK(block(2, 1) == 0.0);
}

TEST_CASE("dt -> 0 limit: D -> I, E -> 0") {
  const ModelMatrices m = build_matrices(1e-12);
  CHECK((m.D - Eigen::Matrix<double, 12, 12>::Identity()).cwiseAbs().maxCoeff() <
        1e-11);
  CHECK(m.E.cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("non-positive dt is rejected") {
  CHECK_THROWS_AS(build_matrices(0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_matrices(-0.01), std::invalid_argument);
}

TEST_CASE("zero state and zero input stay zero") {
  const ModelMatrices m = build_matrices(0.01);
  CHECK(step(m, UavState(UavState::Zero()), JerkInput(JerkInput::Zero()))
            .isZero(0.0));
}

TEST_CASE("one step under x-jerk matches polynomial integration") {
  const ModelMatrices m = build_matrices(0.01);
  JerkInput u = JerkInput::Zero();
  u[0] = 6.0;
  const UavState x = step(m, UavState(UavState::Zero()), u);
  CHECK(x[kStatePosX] == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(x[kStateVelX] == doctest::Approx(3e-4).epsilon(1e-12));
  CHECK(x[kStateAccX] == doctest::Approx(0.06).epsilon(1e-12));
  for (int i = 3; i < 12; ++i) CHECK(x[i] == 0.0);
}

TEST_CASE("constant jerk over k steps matches closed-form cubic kinematics") {
  const double dt = 0.01;
  const ModelMatrices m = build_matrices(dt);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> val(-2.0, 2.0);

  for (int trial = 0; trial < 20; ++trial) {
    UavState x = UavState::Zero();
    for (int i = 0; i < 12; ++i) x[i] = val(rng);
    JerkInput u;
    for (int i = 0; i < 4; ++i) u[i] = 3.0 * val(rng);

    const UavState x0 = x;
    const int k_steps = 137;
    for (int k = 0; k < k_steps; ++k) x = step(m, x, u);

    const double t = k_steps * dt;
    for (int a = 0; a < 4; ++a) {
      const auto truth = oracles::constant_jerk(x0[3 * a], x0[3 * a + 1],
                                                x0[3 * a + 2], u[a], t);
      CHECK(x[3 * a] == doctest::Approx(truth.p).epsilon(1e-12));
      CHECK(x[3 * a + 1] == doctest::Approx(truth.v).epsilon(1e-12));
      CHECK(x[3 * a + 2] == doctest::Approx(truth.a).epsilon(1e-12));
    }
  }
}

TEST_CASE("step is linear") {
  const ModelMatrices m = build_matrices(0.01);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  UavState s1, s2;
  JerkInput u1, u2;
  for (int i = 0; i < 12; ++i) {
    s1[i] = val(rng);
    s2[i] = val(rng);
  }
  for (int i = 0; i < 4; ++i) {
    u1[i] = val(rng);
    u2[i] = val(rng);
  }
  const UavState lhs = step(m, UavState(s1 + s2), JerkInput(u1 + u2));
  const UavState rhs = step(m, s1, u1) + step(m, s2, u2) -
                       step(m, UavState(UavState::Zero()),
                            JerkInput(JerkInput::Zero()));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("axes are decoupled") {
  const ModelMatrices m = build_matrices(0.01);
  UavState x = UavState::Zero();
  JerkInput u = JerkInput::Zero();
  u[1] = 5.0;  // y jerk only
  for (int k = 0; k < 50; ++k) x = step(m, x, u);
  for (int i : {0, 1, 2, 6, 7, 8, 9, 10, 11}) CHECK(x[i] == 0.0);
  CHECK(x[kStatePosY] > 0.0);
}

TEST_CASE("zero-jerk rollout keeps acceleration constant, velocity affine") {
  const double dt = 0.01;
  const ModelMatrices m = build_matrices(dt);
  UavState x0 = UavState::Zero();
  x0[kStateVelX] = 1.5;
  x0[kStateAccX] = -0.4;
  std::vector<JerkInput> u(30, JerkInput::Zero());
  const auto states = rollout(m, x0, u, 30, 30);
  for (int k = 1; k <= 30; ++k) {
    CHECK(states[k - 1][kStateAccX] == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(states[k - 1][kStateVelX] ==
          doctest::Approx(1.5 - 0.4 * k * dt).epsilon(1e-12));
  }
}

TEST_CASE("rollout freezes the input beyond the control horizon") {
  const ModelMatrices m = build_matrices(0.01);
  std::vector<JerkInput> u(40, JerkInput::Zero());
  for (int k = 0; k < 40; ++k) u[k][2] = 0.1 * (k + 1);
  const auto states = rollout(m, UavState(UavState::Zero()), u, 100, 40);
  REQUIRE(states.size() == 100);

  // Beyond step 40 the held input keeps z-acceleration growing at u[39].
  const double u_last = u[39][2];
  for (int k = 41; k <= 100; ++k) {
    const double dacc = states[k - 1][kStateAccZ] - states[k - 2][kStateAccZ];
    CHECK(dacc == doctest::Approx(u_last * 0.01).epsilon(1e-9));
  }
}

TEST_CASE("rollout equals folded step composition") {
  const ModelMatrices m = build_matrices(0.01);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  UavState x0;
  for (int i = 0; i < 12; ++i) x0[i] = val(rng);
  std::vector<JerkInput> u(15);
  for (auto& ui : u) {
    for (int i = 0; i < 4; ++i) ui[i] = val(rng);
  }
  const auto states = rollout(m, x0, u, 40, 15);

  UavState x = x0;
  for (int k = 1; k <= 40; ++k) {
    x = step(m, x, u[std::min(k, 15) - 1]);
    CHECK((states[k - 1] - x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rollout validates the input length") {
  const ModelMatrices m = build_matrices(0.01);
  std::vector<JerkInput> u(10, JerkInput::Zero());
  CHECK_THROWS_AS(rollout(m, UavState(UavState::Zero()), u, 40, 15),
                  std::invalid_argument);
  CHECK_THROWS_AS(rollout(m, UavState(UavState::Zero()), u, 5, 10),
                  std::invalid_argument);
}
