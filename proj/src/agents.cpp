#include "lowrankq/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace lowrankq {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::tabular: return "tabular";
    case Variant::lr_sgd: return "lr_sgd";
    case Variant::lr_als: return "lr_als";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "tabular") return Variant::tabular;
  if (name == "lr_sgd") return Variant::lr_sgd;
  if (name == "lr_als") return Variant::lr_als;
  throw std::invalid_argument("unknown agent variant '" + name + "'");
}

double ExplorationSchedule::at(std::uint64_t t) const {
  if (steps == 0 || t >= steps) return steps == 0 ? start : floor;
  const double frac = static_cast<double>(t) / static_cast<double>(steps);
  return start + (floor - start) * frac;
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(alpha.initial > 0.0) || !std::isfinite(alpha.initial))
    throw std::invalid_argument("alpha must be positive");
  if (alpha.decay < 0.0) throw std::invalid_argument("alpha decay must be >= 0");
  auto unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!unit(epsilon.start) || !unit(epsilon.floor))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  if (als_k < 1) throw std::invalid_argument("als_k must be >= 1");
  if (!(init_scale > 0.0)) throw std::invalid_argument("init_scale must be positive");
}

double default_alpha(Variant variant, PlanMode mode) {
  if (variant == Variant::tabular) return 0.1;
  if (variant == Variant::lr_sgd) return mode == PlanMode::classic ? 0.01 : 0.005;
  return 1.0;  // unused by ALS sweeps
}

Agent::Agent(AgentConfig config, ReshapePlan plan)
    : config_(std::move(config)), plan_(std::move(plan)) {
  config_.validate();
  if (config_.plan_mode != plan_.mode())
    throw std::invalid_argument("agent plan mode does not match the supplied plan");
  const auto rows = static_cast<Index>(plan_.rows());
  const auto cols = static_cast<Index>(plan_.cols());
  if (config_.variant == Variant::tabular) {
    model_ = QTable::Zero(rows, cols);
  } else {
    if (config_.variant == Variant::lr_als && plan_.total_cells() > kAlsMaxCells)
      throw std::invalid_argument("lr_als is limited to " + std::to_string(kAlsMaxCells) +
                                  " state-action cells, got " +
                                  std::to_string(plan_.total_cells()));
    model_ = init_factors(rows, cols, config_.rank, config_.init_scale, config_.seed);
  }
  scratch_.resize(plan_.action_count());
}

std::size_t Agent::parameter_count() const {
  if (is_tabular()) return plan_.table_parameters();
  return plan_.factor_parameters(static_cast<std::size_t>(config_.rank));
}

void Agent::q_values(std::size_t state, std::span<double> out) const {
  if (state >= plan_.state_count()) throw std::out_of_range("q_values: state out of range");
  const std::size_t n = plan_.action_count();
  if (out.size() != n) throw std::invalid_argument("q_values: output size mismatch");
  if (const auto* q = std::get_if<QTable>(&model_)) {
    for (std::size_t a = 0; a < n; ++a) {
      const Cell c = plan_.cell_unchecked(state, a);
      out[a] = (*q)(c.row, c.col);
    }
    return;
  }
  const auto& fp = std::get<FactorPair>(model_);
  if (plan_.mode() == PlanMode::classic) {
    const auto row = fp.left.row(static_cast<Index>(state));
    for (std::size_t a = 0; a < n; ++a) out[a] = row.dot(fp.right.col(static_cast<Index>(a)));
    return;
  }
  for (std::size_t a = 0; a < n; ++a) {
    const Cell c = plan_.cell_unchecked(state, a);
    out[a] = fp.left.row(c.row).dot(fp.right.col(c.col));
  }
}

std::vector<double> Agent::q_values(std::size_t state) const {
  std::vector<double> out(plan_.action_count());
  q_values(state, out);
  return out;
}

double Agent::q_value(std::size_t state, std::size_t action) const {
  const Cell c = plan_.cell_of(state, action);
  if (const auto* q = std::get_if<QTable>(&model_)) return (*q)(c.row, c.col);
  return predict_cell(std::get<FactorPair>(model_), c);
}

std::size_t Agent::greedy_action(std::size_t state) const {
  q_values(state, scratch_);
  // max_element returns the first maximum, i.e. the lowest index among ties.
  return static_cast<std::size_t>(std::max_element(scratch_.begin(), scratch_.end()) -
                                  scratch_.begin());
}

std::size_t Agent::select_action(std::size_t state, Rng& rng) const {
  return select_action(state, rng, epsilon());
}

std::size_t Agent::select_action(std::size_t state, Rng& rng, double epsilon) const {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, plan_.action_count() - 1);
    return pick(rng);
  }
  return greedy_action(state);
}

double Agent::max_next(std::size_t state) const {
  q_values(state, scratch_);
  return *std::max_element(scratch_.begin(), scratch_.end());
}

double Agent::td_target(const Transition& t) const {
  if (t.terminal) return t.reward;
  return t.reward + config_.gamma * max_next(t.next_state);
}

void Agent::learn(const Transition& t) {
  if (t.state >= plan_.state_count() || t.next_state >= plan_.state_count() ||
      t.action >= plan_.action_count())
    throw std::out_of_range("learn: transition indices out of range");
  const double target = td_target(t);
  const Cell cell = plan_.cell_unchecked(t.state, t.action);
  const double a = alpha();

  if (auto* q = std::get_if<QTable>(&model_)) {
    double& entry = (*q)(cell.row, cell.col);
    entry += a * (target - entry);
  } else if (config_.variant == Variant::lr_sgd) {
    sgd_update(std::get<FactorPair>(model_), TDTarget{cell, target},
               SgdOptions{a, config_.eta, config_.normalize});
  } else {
    auto& fp = std::get<FactorPair>(model_);
    if (!std::isfinite(target))
      throw NumericalDivergence("non-finite TD target in ALS step", cell);
    const QTable qbar = build_target_matrix(fp, TDTarget{cell, target});
    AlsResult res = als_sweep(fp, qbar, config_.als_k);
    if (!res.factors.left.allFinite() || !res.factors.right.allFinite() ||
        res.factors.left.cwiseAbs().maxCoeff() > kDivergenceGuard ||
        res.factors.right.cwiseAbs().maxCoeff() > kDivergenceGuard)
      throw NumericalDivergence("ALS factors exceeded divergence guard", cell);
    damped_solves_ += res.damped_solves;
    fp = std::move(res.factors);
  }
  ++steps_;
}

GreedyPolicy Agent::greedy_policy() const {
  GreedyPolicy pi(plan_.state_count());
  for (std::size_t s = 0; s < pi.size(); ++s) pi[s] = greedy_action(s);
  return pi;
}

QTable Agent::state_action_matrix() const {
  const auto ns = static_cast<Index>(plan_.state_count());
  const auto na = static_cast<Index>(plan_.action_count());
  if (const auto* q = std::get_if<QTable>(&model_); q && plan_.mode() == PlanMode::classic)
    return *q;
  if (const auto* fp = std::get_if<FactorPair>(&model_); fp && plan_.mode() == PlanMode::classic)
    return materialize(*fp);
  QTable out(ns, na);
  for (Index s = 0; s < ns; ++s) {
    q_values(static_cast<std::size_t>(s), scratch_);
    for (Index a = 0; a < na; ++a) out(s, a) = scratch_[static_cast<std::size_t>(a)];
  }
  return out;
}

void Agent::load_state_action_matrix(const QTable& q) {
  auto* table = std::get_if<QTable>(&model_);
  if (!table) throw std::logic_error("load_state_action_matrix needs a tabular agent");
  if (q.rows() != static_cast<Index>(plan_.state_count()) ||
      q.cols() != static_cast<Index>(plan_.action_count()))
    throw std::invalid_argument("load_state_action_matrix: shape mismatch");
  for (std::size_t s = 0; s < plan_.state_count(); ++s)
    for (std::size_t a = 0; a < plan_.action_count(); ++a) {
      const Cell c = plan_.cell_unchecked(s, a);
      (*table)(c.row, c.col) = q(static_cast<Index>(s), static_cast<Index>(a));
    }
}

std::string Agent::serialize() const {
  std::string out;
  auto put = [&out](const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
  };
  put(&steps_, sizeof steps_);
  put(&damped_solves_, sizeof damped_solves_);
  if (const auto* q = std::get_if<QTable>(&model_)) {
    put(q->data(), sizeof(double) * static_cast<std::size_t>(q->size()));
  } else {
    const auto& fp = std::get<FactorPair>(model_);
    put(fp.left.data(), sizeof(double) * static_cast<std::size_t>(fp.left.size()));
    put(fp.right.data(), sizeof(double) * static_cast<std::size_t>(fp.right.size()));
  }
  return out;
}

}  // namespace lowrankq
