#include <doctest.h>

#include <cmath>

#include "lowrankq/agents.hpp"
#include "lowrankq/mdp_oracle.hpp"

using namespace lowrankq;

namespace {

AgentConfig tabular_config(double alpha = 0.1, double eps = 0.0) {
  AgentConfig c;
  c.variant = Variant::tabular;
  c.alpha = {alpha, 0.0};
  c.epsilon = {eps, eps, 0};
  return c;
}

AgentConfig lr_config(Variant v = Variant::lr_sgd, PlanMode mode = PlanMode::classic) {
  AgentConfig c;
  c.variant = v;
  c.plan_mode = mode;
  c.alpha = {0.05, 0.0};
  c.epsilon = {0.0, 0.0, 0};
  c.rank = 2;
  c.seed = 4;
  return c;
}

}  // namespace

TEST_CASE("tabular update hand example") {
  AgentConfig c = tabular_config(0.5);
  c.gamma = 0.9;
  Agent agent(c, ReshapePlan(4, 2, PlanMode::classic));
  agent.learn({0, 1, 1.0, 2, false, false});
  CHECK(agent.q_value(0, 1) == doctest::Approx(0.5));
  CHECK(agent.steps() == 1);

  const QTable before = agent.table();
  agent.learn({3, 0, 0.0, 3, true, false});
  CHECK(agent.table() == before);
}

TEST_CASE("tabular learn changes exactly one entry") {
  Agent agent(tabular_config(0.3), ReshapePlan(6, 3, PlanMode::classic));
  for (int i = 0; i < 20; ++i) {
    const QTable before = agent.table();
    agent.learn({static_cast<std::size_t>(i % 6), static_cast<std::size_t>(i % 3), 1.0 + i,
                 static_cast<std::size_t>((i + 1) % 6), false, false});
    CHECK(((agent.table() - before).array() != 0.0).count() == 1);
  }
}

TEST_CASE("low-rank learn changes one row of L and one column of R") {
  for (PlanMode mode : {PlanMode::classic, PlanMode::flat_near_square}) {
    const ReshapePlan plan(10, 3, mode);
    Agent agent(lr_config(Variant::lr_sgd, mode), plan);
    const FactorPair before = agent.factors();
    agent.learn({7, 2, 1.0, 3, false, false});
    const Cell c = plan.cell_of(7, 2);
    const FactorPair& after = agent.factors();
    CHECK(((after.left - before.left).array() != 0.0).count() == 2);
    CHECK(((after.right - before.right).array() != 0.0).count() == 2);
    CHECK(after.left.row(c.row) != before.left.row(c.row));
    CHECK(after.right.col(c.col) != before.right.col(c.col));
  }
}

TEST_CASE("bootstrapping through truncation only") {
  AgentConfig c = tabular_config(1.0);
  c.gamma = 0.5;
  Agent agent(c, ReshapePlan(3, 2, PlanMode::classic));
  QTable q = QTable::Zero(3, 2);
  q(2, 1) = 4.0;
  agent.load_state_action_matrix(q);
  CHECK(agent.td_target({0, 0, 1.0, 2, false, true}) == doctest::Approx(3.0));
  CHECK(agent.td_target({0, 0, 1.0, 2, false, false}) == doctest::Approx(3.0));
  CHECK(agent.td_target({0, 0, 1.0, 2, true, false}) == doctest::Approx(1.0));
}

TEST_CASE("greedy selection and tie-break") {
  Agent zero(tabular_config(), ReshapePlan(5, 4, PlanMode::classic));
  Rng rng(1);
  for (std::size_t s = 0; s < 5; ++s) {
    CHECK(zero.greedy_action(s) == 0);
    CHECK(zero.select_action(s, rng) == 0);
  }
  CHECK(zero.greedy_policy() == GreedyPolicy(5, 0));

  Agent agent(tabular_config(), ReshapePlan(2, 3, PlanMode::classic));
  QTable q(2, 3);
  q << 0.1, 0.7, 0.7, -1.0, -3.0, -0.5;
  agent.load_state_action_matrix(q);
  CHECK(agent.greedy_action(0) == 1);
  CHECK(agent.greedy_action(1) == 2);

  // shifting every value leaves the choice unchanged
  agent.load_state_action_matrix((q.array() + 123.0).matrix());
  CHECK(agent.greedy_action(0) == 1);
  CHECK(agent.greedy_action(1) == 2);

  const std::string image = agent.serialize();
  const auto p1 = agent.greedy_policy();
  const auto p2 = agent.greedy_policy();
  CHECK(p1 == p2);
  CHECK(agent.serialize() == image);
}

TEST_CASE("epsilon one is uniform") {
  Agent agent(tabular_config(0.1, 1.0), ReshapePlan(1, 4, PlanMode::classic));
  QTable q = QTable::Zero(1, 4);
  q(0, 2) = 5.0;
  agent.load_state_action_matrix(q);
  Rng rng(42);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[agent.select_action(0, rng)];
  const double p = 0.25, sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) < 3 * sigma);
}

TEST_CASE("schedules") {
  Agent agent(tabular_config(0.2, 0.3), ReshapePlan(3, 2, PlanMode::classic));
  for (int i = 0; i < 10000; ++i) {
    agent.learn({0, 0, 0.0, 1, false, false});
    CHECK(agent.alpha() == 0.2);
    CHECK(agent.epsilon() == 0.3);
  }
  const StepSchedule inv{0.5, 0.01};
  CHECK(inv.at(0) == 0.5);
  CHECK(inv.at(100) == doctest::Approx(0.25));
  const ExplorationSchedule lin{1.0, 0.1, 100};
  CHECK(lin.at(0) == 1.0);
  CHECK(lin.at(50) == doctest::Approx(0.55));
  CHECK(lin.at(100) == doctest::Approx(0.1));
  CHECK(lin.at(1000) == doctest::Approx(0.1));
}

TEST_CASE("oracle-loaded tabular agent follows the optimal path") {
  const TabularMDP mdp = enumerate_frozenlake();
  const QTable qstar = q_value_iteration(mdp, 0.95);
  Agent agent(tabular_config(), ReshapePlan(16, 4, PlanMode::classic));
  agent.load_state_action_matrix(qstar);
  const auto pol = agent.greedy_policy();
  std::size_t s = 0, n = 0;
  while (!mdp.terminal[s] && n < 20) {
    s = mdp.next(s, pol[s]);
    ++n;
  }
  CHECK(s == 15);
  CHECK(n == 6);
  CHECK(greedy_path_optimal(mdp, optimal_actions(qstar), pol, 0));
}

TEST_CASE("ALS agent") {
  Agent agent(lr_config(Variant::lr_als), ReshapePlan(16, 4, PlanMode::classic));
  agent.learn({14, 2, 1.0, 15, true, false});
  CHECK(agent.q_value(14, 2) > 0.0);
  CHECK(agent.factors().left.allFinite());
  CHECK_THROWS_AS(Agent(lr_config(Variant::lr_als), ReshapePlan(2121, 41, PlanMode::classic)),
                  std::invalid_argument);
}

TEST_CASE("agent config validation") {
  const ReshapePlan plan(4, 2, PlanMode::classic);
  AgentConfig c = tabular_config();
  c.gamma = 1.0;
  CHECK_THROWS_AS(Agent(c, plan), std::invalid_argument);
  c = tabular_config();
  c.epsilon = {1.5, 1.5, 0};
  CHECK_THROWS_AS(Agent(c, plan), std::invalid_argument);
  c = lr_config();
  c.rank = 3;
  CHECK_THROWS_AS(Agent(c, plan), std::invalid_argument);
  CHECK_THROWS_AS(Agent(lr_config(), ReshapePlan(4, 2, PlanMode::flat_near_square)),
                  std::invalid_argument);
  Agent ok(tabular_config(), plan);
  CHECK_THROWS_AS(ok.learn({4, 0, 0.0, 0, false, false}), std::out_of_range);
  CHECK(default_alpha(Variant::tabular, PlanMode::classic) == 0.1);
  CHECK(default_alpha(Variant::lr_sgd, PlanMode::classic) == 0.01);
  CHECK(default_alpha(Variant::lr_sgd, PlanMode::flat_near_square) == 0.005);
  CHECK(variant_from_string(to_string(Variant::lr_als)) == Variant::lr_als);
}

TEST_CASE("parameter counts") {
  CHECK(Agent(tabular_config(), ReshapePlan(16, 4, PlanMode::classic)).parameter_count() == 64);
  CHECK(Agent(lr_config(), ReshapePlan(16, 4, PlanMode::classic)).parameter_count() == 40);
}
