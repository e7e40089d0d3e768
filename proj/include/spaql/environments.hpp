#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "spaql/metric_space.hpp"
#include "spaql/rng.hpp"

namespace spaql {

struct StepOutcome {
  StateVec observation;  // standard-space state coordinates
  double reward = 0.0;
  bool done = false;
};

// Raw simulator state and dynamics, separate from the standard-space wrapper
// so the physics can be tested against closed-form oracles directly.

struct PendulumState {
  double theta = 0.0;      // unnormalized angle accumulator, 0 = upright
  double theta_dot = 0.0;  // clamped to [-8, 8] after every step
};

PendulumState pendulum_reset(Rng& rng);                                   // U[-pi,pi] x U[-1,1]
std::pair<PendulumState, double> pendulum_step(const PendulumState& s, double torque);
double pendulum_reward_scaled(double r);                                  // affine [r_min,0] -> [0,1]
const std::vector<double>& pendulum_discrete_actions();                   // (-2,-1,0,1,2)
inline constexpr double kPendulumRewardMin = -(M_PI * M_PI + 0.1 * 64.0 + 0.001 * 4.0);

struct CartPoleState {
  double x = 0.0, x_dot = 0.0, theta = 0.0, theta_dot = 0.0;
};

struct CartPoleStep {
  CartPoleState state;
  double reward = 1.0;
  bool done = false;
};

CartPoleState cartpole_reset(Rng& rng);  // U[-0.05, 0.05]^4
CartPoleStep cartpole_step(const CartPoleState& s, int action);

// Standard-space wrapper the agents train against. Instances are single-owner;
// run one per worker.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const SpaceSpec& space() const = 0;
  virtual StateVec reset(Rng& rng) = 0;
  virtual StepOutcome step(const Action& a) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

class PendulumEnv : public Environment {
 public:
  PendulumEnv(bool scaled_reward, bool discrete_actions);
  const SpaceSpec& space() const override { return spec_; }
  StateVec reset(Rng& rng) override;
  StepOutcome step(const Action& a) override;
  std::unique_ptr<Environment> clone() const override;
  PendulumState raw_state() const { return s_; }

 private:
  SpaceSpec spec_;
  PendulumState s_;
  bool scaled_;
  bool discrete_;
};

class CartPoleEnv : public Environment {
 public:
  CartPoleEnv();
  const SpaceSpec& space() const override { return spec_; }
  StateVec reset(Rng& rng) override;
  StepOutcome step(const Action& a) override;
  std::unique_ptr<Environment> clone() const override;
  CartPoleState raw_state() const { return s_; }

 private:
  SpaceSpec spec_;
  CartPoleState s_;
};

}  // namespace spaql
