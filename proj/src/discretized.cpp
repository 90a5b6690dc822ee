#include <stdexcept>

#include "lowrankq/environments.hpp"

namespace lowrankq {

DiscretizedEnvironment::DiscretizedEnvironment(std::unique_ptr<ContinuousEnvironment> inner,
                                               std::vector<GridSpec> grids)
    : inner_(std::move(inner)), grids_(std::move(grids)) {
  if (!inner_) throw std::invalid_argument("discretized: null environment");
  if (grids_.size() != inner_->observation_size())
    throw std::invalid_argument("discretized: " + std::to_string(grids_.size()) +
                                " grids for " + std::to_string(inner_->observation_size()) +
                                " observation variables");
  for (const auto& g : grids_) {
    g.validate();
    dims_.push_back(g.bins);
  }
  state_count_ = cardinality(dims_);
}

std::size_t DiscretizedEnvironment::encode(const std::vector<double>& observation) const {
  if (observation.size() != grids_.size())
    throw std::invalid_argument("discretized: observation arity mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < grids_.size(); ++i)
    flat = flat * dims_[i] + discretize(grids_[i], observation[i]);
  return flat;
}

std::size_t DiscretizedEnvironment::reset(std::uint64_t seed) {
  return encode(inner_->reset(seed));
}

DiscreteStep DiscretizedEnvironment::step(std::size_t action) {
  const StepResult r = inner_->step(action);
  DiscreteStep s;
  s.state = encode(r.observation);
  s.reward = r.reward;
  s.terminal = r.terminal;
  s.truncated = r.truncated;
  s.goal = r.terminal;
  return s;
}

std::unique_ptr<DiscreteEnvironment> discretized(std::unique_ptr<ContinuousEnvironment> env,
                                                 std::vector<GridSpec> grids) {
  return std::make_unique<DiscretizedEnvironment>(std::move(env), std::move(grids));
}

}  // namespace lowrankq
