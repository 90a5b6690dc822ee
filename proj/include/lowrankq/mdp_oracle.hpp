#pragma once

#include <set>
#include <vector>

#include "lowrankq/factor_model.hpp"

namespace lowrankq {

// Deterministic finite MDP. Terminal states absorb with zero reward.
struct TabularMDP {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<std::size_t> next_state;  // [s * n_actions + a]
  std::vector<double> reward;           // [s * n_actions + a]
  std::vector<bool> terminal;           // [s]

  std::size_t next(std::size_t s, std::size_t a) const { return next_state[s * n_actions + a]; }
  double r(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }
};

TabularMDP enumerate_frozenlake();

inline constexpr double kOracleTolerance = 1e-10;

/// Q(s,a) <- r(s,a) + gamma * max_a' Q(s',a') from zero until the largest
/// change drops below tol. Terminal rows stay zero.
QTable q_value_iteration(const TabularMDP& mdp, double gamma, double tol = kOracleTolerance);

/// max |Q(s,a) - r - gamma max Q(s',.)| over non-terminal rows.
double bellman_residual(const TabularMDP& mdp, const QTable& q, double gamma);

inline constexpr double kOptimalActionSlack = 1e-9;

/// Per state, the actions within 1e-9 of the row maximum.
std::vector<std::set<std::size_t>> optimal_actions(const QTable& qstar);

using OptimalSets = std::vector<std::set<std::size_t>>;

/// Follows `policy` from `start`; true when every action taken is optimal and
/// a terminal state is reached within n_states steps.
bool greedy_path_optimal(const TabularMDP& mdp, const OptimalSets& optimal,
                         const std::vector<std::size_t>& policy, std::size_t start);

/// True when some path from `start` built only from optimal actions reaches a
/// terminal state while `policy` picks an optimal action at each of its states.
bool agrees_on_some_optimal_path(const TabularMDP& mdp, const OptimalSets& optimal,
                                 const std::vector<std::size_t>& policy, std::size_t start);

}  // namespace lowrankq
