#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lowrankq/environments.hpp"

namespace lowrankq {

namespace pendulum {

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  return w >= std::numbers::pi ? -std::numbers::pi : w;
}

State reset_state(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  State s;
  s.theta = angle(gen);
  s.theta_dot = speed(gen);
  return s;
}

Outcome transition(State s, double torque) {
  const double u = std::clamp(torque, -kMaxTorque, kMaxTorque);
  const double th = wrap_angle(s.theta);
  const double cost = th * th + 0.1 * s.theta_dot * s.theta_dot + 0.001 * u * u;

  double theta_dot = s.theta_dot + (3.0 * kGravity / (2.0 * kLength) * std::sin(s.theta) +
                                    3.0 / (kMass * kLength * kLength) * u) *
                                       kDt;
  theta_dot = std::clamp(theta_dot, -kMaxSpeed, kMaxSpeed);
  Outcome out;
  out.next.theta_dot = theta_dot;
  out.next.theta = wrap_angle(s.theta + theta_dot * kDt);
  out.reward = -cost;
  return out;
}

}  // namespace pendulum

Pendulum::Pendulum(std::size_t torque_levels) {
  if (torque_levels < 1) throw std::invalid_argument("pendulum needs >= 1 torque level");
  torques_.resize(torque_levels);
  if (torque_levels == 1) {
    torques_[0] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < torque_levels; ++i)
    torques_[i] = -pendulum::kMaxTorque +
                  2.0 * pendulum::kMaxTorque * static_cast<double>(i) /
                      static_cast<double>(torque_levels - 1);
}

std::vector<double> Pendulum::reset(std::uint64_t seed) {
  state_ = pendulum::reset_state(seed);
  elapsed_ = 0;
  return {state_.theta, state_.theta_dot};
}

StepResult Pendulum::step(std::size_t action) {
  if (action >= torques_.size())
    throw std::invalid_argument("pendulum: invalid action " + std::to_string(action));
  const auto out = pendulum::transition(state_, torques_[action]);
  state_ = out.next;
  ++elapsed_;
  StepResult r;
  r.observation = {state_.theta, state_.theta_dot};
  r.reward = out.reward;
  r.terminal = false;
  r.truncated = elapsed_ >= pendulum::kMaxSteps;
  return r;
}

std::vector<GridSpec> Pendulum::default_grids() const {
  return {GridSpec{-std::numbers::pi, std::numbers::pi, 21},
          GridSpec{-pendulum::kMaxSpeed, pendulum::kMaxSpeed, 101}};
}

}  // namespace lowrankq
