#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spaql {

// Small inline vector for state coordinates. Observations are 3-4 doubles and
// get copied around every simulation step, so no heap.
inline constexpr int kMaxStateDims = 8;

struct StateVec {
  std::array<double, kMaxStateDims> v{};
  int n = 0;

  StateVec() = default;
  StateVec(std::initializer_list<double> xs) {
    if (xs.size() > kMaxStateDims) throw std::length_error("StateVec capacity");
    for (double x : xs) v[n++] = x;
  }

  int size() const { return n; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  void push_back(double x) {
    if (n >= kMaxStateDims) throw std::length_error("StateVec capacity");
    v[static_cast<std::size_t>(n++)] = x;
  }
  const double* begin() const { return v.data(); }
  const double* end() const { return v.data() + n; }
  std::span<const double> span() const { return {v.data(), static_cast<std::size_t>(n)}; }
  operator std::span<const double>() const { return span(); }
};

enum class ActionKind { kContinuous, kCategorical };

struct Action {
  ActionKind kind = ActionKind::kContinuous;
  double value = 0.0;  // continuous: standard-space action in [-1, 1]
  int index = 0;       // categorical: index into SpaceSpec::categorical_actions

  static Action continuous(double v) { return {ActionKind::kContinuous, v, 0}; }
  static Action categorical(int i) { return {ActionKind::kCategorical, 0.0, i}; }
};

struct DimTransform {
  enum class Kind { kLinearScale, kSigmoidSquash };
  Kind kind = Kind::kLinearScale;
  double param = 1.0;  // divisor for kLinearScale, slope m for kSigmoidSquash

  double apply(double raw) const;
};

// Description of a standard space: every state coordinate lives in [-1, 1],
// the action is either a continuous interval rescaled to [-1, 1] or a finite
// ordered set.
class SpaceSpec {
 public:
  SpaceSpec(std::vector<DimTransform> transforms, double raw_action_scale);
  SpaceSpec(std::vector<DimTransform> transforms, std::vector<double> categorical_actions);

  int state_dims() const { return static_cast<int>(transforms_.size()); }
  ActionKind action_kind() const { return action_kind_; }
  const std::vector<DimTransform>& transforms() const { return transforms_; }
  int num_actions() const { return static_cast<int>(categorical_actions_.size()); }
  const std::vector<double>& categorical_actions() const { return categorical_actions_; }
  // Raw action magnitude for continuous spaces (standard a maps to raw a*scale).
  double raw_action_scale() const { return raw_action_scale_; }

 private:
  std::vector<DimTransform> transforms_;
  ActionKind action_kind_;
  std::vector<double> categorical_actions_;
  double raw_action_scale_ = 1.0;
};

struct StandardPoint {
  StateVec coords;
  Action action;

  StandardPoint() = default;
  // Clamps every coordinate into [-1, 1]; continuous actions likewise.
  StandardPoint(StateVec c, Action a);
};

// 2/(1 + exp(-2 m y)) - 1, identically tanh(m y); maps the reals into (-1, 1).
double squash(double m, double y);

// Principal argument in (-pi, pi].
double normalize_angle(double theta);

// L-infinity distance over the state parts only (used by SPAQL-TS weighting).
double state_distance(std::span<const double> a, std::span<const double> b);

// Product metric: max over per-coordinate absolute differences, with the
// action entering the max directly (continuous) or as 2*[u != u'] (categorical).
double distance(const SpaceSpec& spec, const StandardPoint& p, const StandardPoint& q);

// Benchmark-specific standard-space mappings.
StateVec pendulum_to_standard(double cos_theta, double sin_theta, double theta_dot);
double standard_to_torque(double a);
StateVec cartpole_to_standard(double x, double x_dot, double theta, double theta_dot);

// Canonical space descriptions for the built-in benchmarks.
SpaceSpec pendulum_space();           // 3 state dims + continuous torque
SpaceSpec pendulum_discrete_space();  // 3 state dims + 5 torques
SpaceSpec cartpole_space();           // 4 state dims + {0, 1}

}  // namespace spaql
