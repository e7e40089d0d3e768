#include "spaql/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spaql {

namespace {
constexpr double kPendulumDt = 0.05;
constexpr double kPendulumG = 10.0;
constexpr double kCartPoleDt = 0.02;
constexpr double kCartPoleG = 9.8;
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kPoleHalfLength = 0.5;
constexpr double kForceMag = 10.0;
constexpr double kXLimit = 2.4;
const double kThetaLimit = 12.0 * M_PI / 180.0;
}  // namespace

PendulumState pendulum_reset(Rng& rng) {
  return {rng.uniform(-M_PI, M_PI), rng.uniform(-1.0, 1.0)};
}

std::pair<PendulumState, double> pendulum_step(const PendulumState& s, double torque) {
  if (!std::isfinite(s.theta) || !std::isfinite(s.theta_dot))
    throw std::invalid_argument("pendulum_step: non-finite state");
  const double u = std::clamp(torque, -2.0, 2.0);
  // Per-step cost at the pre-step state, with the applied torque.
  const double a = normalize_angle(s.theta);
  const double reward = -(a * a + 0.1 * s.theta_dot * s.theta_dot + 0.001 * u * u);
  // theta'' = (3g/2l) sin(theta) + (3/ml^2) u with m = l = 1; semi-implicit
  // Euler: velocity first, position with the updated velocity.
  const double acc = 1.5 * kPendulumG * std::sin(s.theta) + 3.0 * u;
  PendulumState next;
  next.theta_dot = std::clamp(s.theta_dot + acc * kPendulumDt, -8.0, 8.0);
  next.theta = s.theta + next.theta_dot * kPendulumDt;
  return {next, reward};
}

double pendulum_reward_scaled(double r) {
  return std::clamp(1.0 + r / -kPendulumRewardMin, 0.0, 1.0);
}

const std::vector<double>& pendulum_discrete_actions() {
  static const std::vector<double> torques{-2.0, -1.0, 0.0, 1.0, 2.0};
  return torques;
}

CartPoleState cartpole_reset(Rng& rng) {
  CartPoleState s;
  s.x = rng.uniform(-0.05, 0.05);
  s.x_dot = rng.uniform(-0.05, 0.05);
  s.theta = rng.uniform(-0.05, 0.05);
  s.theta_dot = rng.uniform(-0.05, 0.05);
  return s;
}

CartPoleStep cartpole_step(const CartPoleState& s, int action) {
  if (action != 0 && action != 1) throw std::invalid_argument("cartpole_step: action must be 0 or 1");
  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double total_mass = kCartMass + kPoleMass;
  const double pole_ml = kPoleMass * kPoleHalfLength;
  const double temp = (force + pole_ml * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc = (kCartPoleG * sin_t - cos_t * temp) /
                           (kPoleHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;
  CartPoleStep out;
  // Explicit Euler; positions advance with the pre-step velocities.
  out.state.x = s.x + kCartPoleDt * s.x_dot;
  out.state.x_dot = s.x_dot + kCartPoleDt * x_acc;
  out.state.theta = s.theta + kCartPoleDt * s.theta_dot;
  out.state.theta_dot = s.theta_dot + kCartPoleDt * theta_acc;
  out.reward = 1.0;
  out.done = std::abs(out.state.x) > kXLimit || std::abs(out.state.theta) > kThetaLimit;
  return out;
}

PendulumEnv::PendulumEnv(bool scaled_reward, bool discrete_actions)
    : spec_(discrete_actions ? pendulum_discrete_space() : pendulum_space()),
      scaled_(scaled_reward),
      discrete_(discrete_actions) {}

StateVec PendulumEnv::reset(Rng& rng) {
  s_ = pendulum_reset(rng);
  return pendulum_to_standard(std::cos(s_.theta), std::sin(s_.theta), s_.theta_dot);
}

StepOutcome PendulumEnv::step(const Action& a) {
  double torque;
  if (discrete_) {
    if (a.kind != ActionKind::kCategorical || a.index < 0 || a.index >= spec_.num_actions())
      throw std::invalid_argument("PendulumEnv: bad categorical action");
    torque = spec_.categorical_actions()[static_cast<std::size_t>(a.index)];
  } else {
    if (a.kind != ActionKind::kContinuous)
      throw std::invalid_argument("PendulumEnv: expected continuous action");
    torque = standard_to_torque(a.value);
  }
  auto [next, reward] = pendulum_step(s_, torque);
  s_ = next;
  StepOutcome out;
  out.observation = pendulum_to_standard(std::cos(s_.theta), std::sin(s_.theta), s_.theta_dot);
  out.reward = scaled_ ? pendulum_reward_scaled(reward) : reward;
  out.done = false;
  return out;
}

std::unique_ptr<Environment> PendulumEnv::clone() const {
  return std::make_unique<PendulumEnv>(*this);
}

CartPoleEnv::CartPoleEnv() : spec_(cartpole_space()) {}

StateVec CartPoleEnv::reset(Rng& rng) {
  s_ = cartpole_reset(rng);
  return cartpole_to_standard(s_.x, s_.x_dot, s_.theta, s_.theta_dot);
}

StepOutcome CartPoleEnv::step(const Action& a) {
  if (a.kind != ActionKind::kCategorical)
    throw std::invalid_argument("CartPoleEnv: expected categorical action");
  CartPoleStep raw = cartpole_step(s_, a.index);
  s_ = raw.state;
  StepOutcome out;
  out.observation = cartpole_to_standard(s_.x, s_.x_dot, s_.theta, s_.theta_dot);
  out.reward = raw.reward;
  out.done = raw.done;
  return out;
}

std::unique_ptr<Environment> CartPoleEnv::clone() const {
  return std::make_unique<CartPoleEnv>(*this);
}

}  // namespace spaql
