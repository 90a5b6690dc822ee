#include "lowrankq/mdp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lowrankq/environments.hpp"

namespace lowrankq {

TabularMDP enumerate_frozenlake() {
  TabularMDP mdp;
  mdp.n_states = frozenlake::kStates;
  mdp.n_actions = frozenlake::kActions;
  mdp.next_state.resize(mdp.n_states * mdp.n_actions);
  mdp.reward.resize(mdp.n_states * mdp.n_actions);
  mdp.terminal.resize(mdp.n_states);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    mdp.terminal[s] = frozenlake::is_terminal(s);
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const std::size_t k = s * mdp.n_actions + a;
      if (mdp.terminal[s]) {
        mdp.next_state[k] = s;
        mdp.reward[k] = 0.0;
        continue;
      }
      const auto out = frozenlake::transition(s, a);
      mdp.next_state[k] = out.next;
      mdp.reward[k] = out.reward;
    }
  }
  return mdp;
}

namespace {

double backup(const TabularMDP& mdp, const QTable& q, double gamma, std::size_t s,
              std::size_t a) {
  const std::size_t n = mdp.next(s, a);
  const double future = mdp.terminal[n] ? 0.0 : q.row(static_cast<Index>(n)).maxCoeff();
  return mdp.r(s, a) + gamma * future;
}

}  // namespace

QTable q_value_iteration(const TabularMDP& mdp, double gamma, double tol) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto ns = static_cast<Index>(mdp.n_states);
  const auto na = static_cast<Index>(mdp.n_actions);
  QTable q = QTable::Zero(ns, na);
  QTable next = q;
  for (;;) {
    double change = 0.0;
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
      if (mdp.terminal[s]) continue;
      for (std::size_t a = 0; a < mdp.n_actions; ++a) {
        const double v = backup(mdp, q, gamma, s, a);
        change = std::max(change, std::abs(v - q(static_cast<Index>(s), static_cast<Index>(a))));
        next(static_cast<Index>(s), static_cast<Index>(a)) = v;
      }
    }
    q.swap(next);
    if (change < tol) break;
  }
  return q;
}

double bellman_residual(const TabularMDP& mdp, const QTable& q, double gamma) {
  double res = 0.0;
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    if (mdp.terminal[s]) continue;
    for (std::size_t a = 0; a < mdp.n_actions; ++a)
      res = std::max(res, std::abs(q(static_cast<Index>(s), static_cast<Index>(a)) -
                                   backup(mdp, q, gamma, s, a)));
  }
  return res;
}

std::vector<std::set<std::size_t>> optimal_actions(const QTable& qstar) {
  std::vector<std::set<std::size_t>> out(static_cast<std::size_t>(qstar.rows()));
  for (Index s = 0; s < qstar.rows(); ++s) {
    const double best = qstar.row(s).maxCoeff();
    for (Index a = 0; a < qstar.cols(); ++a)
      if (qstar(s, a) >= best - kOptimalActionSlack)
        out[static_cast<std::size_t>(s)].insert(static_cast<std::size_t>(a));
  }
  return out;
}

bool greedy_path_optimal(const TabularMDP& mdp, const OptimalSets& optimal,
                         const std::vector<std::size_t>& policy, std::size_t start) {
  std::size_t s = start;
  for (std::size_t t = 0; t <= mdp.n_states; ++t) {
    if (mdp.terminal[s]) return true;
    if (!optimal[s].count(policy[s])) return false;
    s = mdp.next(s, policy[s]);
  }
  return false;
}

bool agrees_on_some_optimal_path(const TabularMDP& mdp, const OptimalSets& optimal,
                                 const std::vector<std::size_t>& policy, std::size_t start) {
  // depth-first over the optimal-action graph; on_stack cuts cycles
  std::vector<int> memo(mdp.n_states, -1);
  std::vector<bool> on_stack(mdp.n_states, false);
  auto dfs = [&](auto&& self, std::size_t s) -> bool {
    if (mdp.terminal[s]) return true;
    if (memo[s] >= 0) return memo[s] == 1;
    if (on_stack[s] || !optimal[s].count(policy[s])) return false;
    on_stack[s] = true;
    bool ok = false;
    for (std::size_t a : optimal[s])
      if (self(self, mdp.next(s, a))) {
        ok = true;
        break;
      }
    on_stack[s] = false;
    memo[s] = ok ? 1 : 0;
    return ok;
  };
  return dfs(dfs, start);
}

}  // namespace lowrankq
