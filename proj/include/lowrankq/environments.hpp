#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lowrankq/index_space.hpp"

namespace lowrankq {

// ---------------------------------------------------------------------------
// Episodic contracts
// ---------------------------------------------------------------------------

struct DiscreteStep {
  std::size_t state = 0;
  double reward = 0.0;
  bool terminal = false;   // true terminal state: no bootstrapping
  bool truncated = false;  // step limit reached
  bool goal = false;       // terminal state counts as task success
};

class DiscreteEnvironment {
 public:
  virtual ~DiscreteEnvironment() = default;
  virtual std::size_t reset(std::uint64_t seed) = 0;
  virtual DiscreteStep step(std::size_t action) = 0;
  virtual std::size_t state_count() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t max_steps() const = 0;
  virtual std::string name() const = 0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class ContinuousEnvironment {
 public:
  virtual ~ContinuousEnvironment() = default;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::size_t action) = 0;
  virtual std::size_t observation_size() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t max_steps() const = 0;
  virtual std::vector<GridSpec> default_grids() const = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// FrozenLake 4x4, deterministic
// ---------------------------------------------------------------------------

namespace frozenlake {

inline constexpr std::array<const char*, 4> kMap = {"SFFF", "FHFH", "FFFH", "HFFG"};
inline constexpr std::size_t kStates = 16;
inline constexpr std::size_t kActions = 4;  // 0 left, 1 down, 2 right, 3 up
inline constexpr std::size_t kGoal = 15;
inline constexpr std::size_t kStart = 0;
inline constexpr std::size_t kMaxSteps = 100;

bool is_hole(std::size_t state);
bool is_terminal(std::size_t state);

struct Outcome {
  std::size_t next = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Pure transition function of the map.
Outcome transition(std::size_t state, std::size_t action);

}  // namespace frozenlake

class FrozenLake final : public DiscreteEnvironment {
 public:
  std::size_t reset(std::uint64_t seed) override;
  DiscreteStep step(std::size_t action) override;
  std::size_t state_count() const override { return frozenlake::kStates; }
  std::size_t action_count() const override { return frozenlake::kActions; }
  std::size_t max_steps() const override { return frozenlake::kMaxSteps; }
  std::string name() const override { return "frozenlake"; }
  std::size_t state() const { return state_; }

 private:
  std::size_t state_ = frozenlake::kStart;
  std::size_t elapsed_ = 0;
};

// ---------------------------------------------------------------------------
// Pendulum swing-up
// ---------------------------------------------------------------------------

namespace pendulum {

inline constexpr double kGravity = 10.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLength = 1.0;
inline constexpr double kDt = 0.05;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr double kMaxTorque = 2.0;
inline constexpr std::size_t kMaxSteps = 200;

struct State {
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct Outcome {
  State next;
  double reward = 0.0;
};

double wrap_angle(double theta);  // into [-pi, pi)
State reset_state(std::uint64_t seed);
/// One explicit-Euler step; torque is clipped to [-2, 2]. The cost uses the
/// pre-step state and the applied torque.
Outcome transition(State s, double torque);

}  // namespace pendulum

class Pendulum final : public ContinuousEnvironment {
 public:
  /// Torque levels uniformly spaced on [-2, 2].
  explicit Pendulum(std::size_t torque_levels);

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  std::size_t observation_size() const override { return 2; }
  std::size_t action_count() const override { return torques_.size(); }
  std::size_t max_steps() const override { return pendulum::kMaxSteps; }
  std::vector<GridSpec> default_grids() const override;
  std::string name() const override { return "pendulum"; }

  double torque(std::size_t action) const { return torques_.at(action); }
  pendulum::State state() const { return state_; }
  void set_state(pendulum::State s) { state_ = s; }

 private:
  std::vector<double> torques_;
  pendulum::State state_;
  std::size_t elapsed_ = 0;
};

// ---------------------------------------------------------------------------
// Acrobot swing-up
// ---------------------------------------------------------------------------

namespace acrobot {

inline constexpr double kLinkLength1 = 1.0;
inline constexpr double kLinkMass1 = 1.0;
inline constexpr double kLinkMass2 = 1.0;
inline constexpr double kLinkCom1 = 0.5;
inline constexpr double kLinkCom2 = 0.5;
inline constexpr double kLinkMoi = 1.0;
inline constexpr double kGravity = 9.8;
inline constexpr double kDt = 0.2;
inline constexpr int kSubsteps = 4;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMaxVel1 = 4.0 * kPi;
inline constexpr double kMaxVel2 = 9.0 * kPi;
inline constexpr std::size_t kMaxSteps = 500;
inline constexpr std::array<double, 3> kTorques = {-1.0, 0.0, 1.0};

// theta1, theta2, theta1_dot, theta2_dot
using State = std::array<double, 4>;

std::vector<double> observe(const State& s);
bool is_terminal(const State& s);
State reset_state(std::uint64_t seed);
/// Integrates dt = 0.2 with kSubsteps RK4 substeps, wraps angles to [-pi, pi]
/// and clips the joint velocities.
State transition(const State& s, std::size_t action);

}  // namespace acrobot

class Acrobot final : public ContinuousEnvironment {
 public:
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  std::size_t observation_size() const override { return 6; }
  std::size_t action_count() const override { return 3; }
  std::size_t max_steps() const override { return acrobot::kMaxSteps; }
  std::vector<GridSpec> default_grids() const override;
  std::string name() const override { return "acrobot"; }

  const acrobot::State& state() const { return state_; }
  void set_state(const acrobot::State& s) { state_ = s; }

 private:
  acrobot::State state_{};
  std::size_t elapsed_ = 0;
};

// ---------------------------------------------------------------------------
// Discretizing wrapper
// ---------------------------------------------------------------------------

/// Exposes a continuous environment over flat bin indices: each observation
/// component goes through its grid and the bin tuple is flattened row-major.
class DiscretizedEnvironment final : public DiscreteEnvironment {
 public:
  DiscretizedEnvironment(std::unique_ptr<ContinuousEnvironment> inner,
                         std::vector<GridSpec> grids);

  std::size_t reset(std::uint64_t seed) override;
  DiscreteStep step(std::size_t action) override;
  std::size_t state_count() const override { return state_count_; }
  std::size_t action_count() const override { return inner_->action_count(); }
  std::size_t max_steps() const override { return inner_->max_steps(); }
  std::string name() const override { return inner_->name(); }

  std::size_t encode(const std::vector<double>& observation) const;
  const std::vector<GridSpec>& grids() const { return grids_; }
  const Dims& dims() const { return dims_; }
  ContinuousEnvironment& inner() { return *inner_; }

 private:
  std::unique_ptr<ContinuousEnvironment> inner_;
  std::vector<GridSpec> grids_;
  Dims dims_;
  std::size_t state_count_ = 0;
};

std::unique_ptr<DiscreteEnvironment> discretized(std::unique_ptr<ContinuousEnvironment> env,
                                                 std::vector<GridSpec> grids);

}  // namespace lowrankq
