#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lowrankq/environments.hpp"

namespace lowrankq {

namespace acrobot {

namespace {

double wrap(double x) {
  const double span = 2.0 * kPi;
  while (x > kPi) x -= span;
  while (x < -kPi) x += span;
  return x;
}

// Equations of motion of the two-link underactuated arm, torque on joint 2.
State derivatives(const State& s, double torque) {
  const double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  const double lc1 = kLinkCom1, lc2 = kLinkCom2, i1 = kLinkMoi, i2 = kLinkMoi;
  const double g = kGravity;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];

  const double d1 = m1 * lc1 * lc1 +
                    m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - kPi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - kPi / 2.0) + phi2;
  const double ddtheta2 =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) -
       phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

State axpy(const State& x, double h, const State& k) {
  return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]};
}

}  // namespace

std::vector<double> observe(const State& s) {
  return {std::cos(s[0]), std::sin(s[0]), std::cos(s[1]), std::sin(s[1]), s[2], s[3]};
}

bool is_terminal(const State& s) { return -std::cos(s[0]) - std::cos(s[1] + s[0]) > 1.0; }

State reset_state(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  State s;
  for (double& v : s) v = dist(gen);
  return s;
}

State transition(const State& s, std::size_t action) {
  if (action >= kTorques.size())
    throw std::invalid_argument("acrobot: invalid action " + std::to_string(action));
  const double torque = kTorques[action];
  const double h = kDt / kSubsteps;
  State x = s;
  for (int i = 0; i < kSubsteps; ++i) {
    const State k1 = derivatives(x, torque);
    const State k2 = derivatives(axpy(x, h / 2.0, k1), torque);
    const State k3 = derivatives(axpy(x, h / 2.0, k2), torque);
    const State k4 = derivatives(axpy(x, h, k3), torque);
    for (int j = 0; j < 4; ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  x[0] = wrap(x[0]);
  x[1] = wrap(x[1]);
  x[2] = std::clamp(x[2], -kMaxVel1, kMaxVel1);
  x[3] = std::clamp(x[3], -kMaxVel2, kMaxVel2);
  return x;
}

}  // namespace acrobot

std::vector<double> Acrobot::reset(std::uint64_t seed) {
  state_ = acrobot::reset_state(seed);
  elapsed_ = 0;
  return acrobot::observe(state_);
}

StepResult Acrobot::step(std::size_t action) {
  state_ = acrobot::transition(state_, action);
  ++elapsed_;
  StepResult r;
  r.observation = acrobot::observe(state_);
  r.terminal = acrobot::is_terminal(state_);
  r.reward = r.terminal ? 0.0 : -1.0;
  r.truncated = !r.terminal && elapsed_ >= acrobot::kMaxSteps;
  return r;
}

std::vector<GridSpec> Acrobot::default_grids() const {
  return {GridSpec{-1.0, 1.0, 10},
          GridSpec{-1.0, 1.0, 10},
          GridSpec{-1.0, 1.0, 10},
          GridSpec{-1.0, 1.0, 10},
          GridSpec{-acrobot::kMaxVel1, acrobot::kMaxVel1, 26},
          GridSpec{-acrobot::kMaxVel2, acrobot::kMaxVel2, 26}};
}

}  // namespace lowrankq
