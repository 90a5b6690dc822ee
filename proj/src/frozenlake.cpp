#include <stdexcept>

#include "lowrankq/environments.hpp"

namespace lowrankq {

namespace frozenlake {

bool is_hole(std::size_t state) {
  return state < kStates && kMap[state / 4][state % 4] == 'H';
}

bool is_terminal(std::size_t state) { return state == kGoal || is_hole(state); }

Outcome transition(std::size_t state, std::size_t action) {
  if (state >= kStates) throw std::out_of_range("frozenlake: state out of range");
  if (action >= kActions)
    throw std::invalid_argument("frozenlake: invalid action " + std::to_string(action));
  std::size_t row = state / 4, col = state % 4;
  switch (action) {
    case 0: col = col > 0 ? col - 1 : 0; break;
    case 1: row = row < 3 ? row + 1 : 3; break;
    case 2: col = col < 3 ? col + 1 : 3; break;
    default: row = row > 0 ? row - 1 : 0; break;
  }
  Outcome out;
  out.next = row * 4 + col;
  out.reward = out.next == kGoal ? 1.0 : 0.0;
  out.terminal = is_terminal(out.next);
  return out;
}

}  // namespace frozenlake

std::size_t FrozenLake::reset(std::uint64_t /*seed*/) {
  state_ = frozenlake::kStart;
  elapsed_ = 0;
  return state_;
}

DiscreteStep FrozenLake::step(std::size_t action) {
  const auto out = frozenlake::transition(state_, action);
  state_ = out.next;
  ++elapsed_;
  DiscreteStep s;
  s.state = out.next;
  s.reward = out.reward;
  s.terminal = out.terminal;
  s.truncated = !out.terminal && elapsed_ >= frozenlake::kMaxSteps;
  s.goal = out.next == frozenlake::kGoal;
  return s;
}

}  // namespace lowrankq
