#include "spaql/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spaql {

namespace {
double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }
}  // namespace

double DimTransform::apply(double raw) const {
  switch (kind) {
    case Kind::kLinearScale:
      return clamp_unit(raw / param);
    case Kind::kSigmoidSquash:
      return squash(param, raw);
  }
  return 0.0;  // unreachable
}

SpaceSpec::SpaceSpec(std::vector<DimTransform> transforms, double raw_action_scale)
    : transforms_(std::move(transforms)),
      action_kind_(ActionKind::kContinuous),
      raw_action_scale_(raw_action_scale) {
  if (transforms_.empty() || transforms_.size() > kMaxStateDims)
    throw std::invalid_argument("SpaceSpec: bad state dimension count");
  for (const auto& t : transforms_)
    if (t.param <= 0.0) throw std::invalid_argument("SpaceSpec: non-positive transform parameter");
}

SpaceSpec::SpaceSpec(std::vector<DimTransform> transforms, std::vector<double> categorical_actions)
    : transforms_(std::move(transforms)),
      action_kind_(ActionKind::kCategorical),
      categorical_actions_(std::move(categorical_actions)) {
  if (transforms_.empty() || transforms_.size() > kMaxStateDims)
    throw std::invalid_argument("SpaceSpec: bad state dimension count");
  for (const auto& t : transforms_)
    if (t.param <= 0.0) throw std::invalid_argument("SpaceSpec: non-positive transform parameter");
  if (categorical_actions_.empty() || categorical_actions_.size() > 64)
    throw std::invalid_argument("SpaceSpec: categorical action set empty or too large");
  std::set<double> uniq(categorical_actions_.begin(), categorical_actions_.end());
  if (uniq.size() != categorical_actions_.size())
    throw std::invalid_argument("SpaceSpec: duplicate categorical action");
}

StandardPoint::StandardPoint(StateVec c, Action a) : coords(c), action(a) {
  for (int i = 0; i < coords.size(); ++i) coords[i] = clamp_unit(coords[i]);
  if (action.kind == ActionKind::kContinuous) action.value = clamp_unit(action.value);
}

double squash(double m, double y) {
  if (!(m > 0.0)) throw std::invalid_argument("squash: slope must be positive");
  return 2.0 / (1.0 + std::exp(-2.0 * m * y)) - 1.0;
}

double normalize_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("normalize_angle: non-finite angle");
  const double two_pi = 2.0 * M_PI;
  double m = std::fmod(theta + M_PI, two_pi);
  if (m <= 0.0) m += two_pi;  // (0, 2*pi]
  return m - M_PI;            // (-pi, pi]
}

double state_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("state_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double distance(const SpaceSpec& spec, const StandardPoint& p, const StandardPoint& q) {
  if (p.coords.size() != spec.state_dims() || q.coords.size() != spec.state_dims())
    throw std::invalid_argument("distance: dimension mismatch");
  if (p.action.kind != spec.action_kind() || q.action.kind != spec.action_kind())
    throw std::invalid_argument("distance: action kind mismatch");
  double d = state_distance(p.coords, q.coords);
  if (spec.action_kind() == ActionKind::kContinuous)
    d = std::max(d, std::abs(p.action.value - q.action.value));
  else if (p.action.index != q.action.index)
    d = std::max(d, 2.0);
  return d;
}

StateVec pendulum_to_standard(double cos_theta, double sin_theta, double theta_dot) {
  return {clamp_unit(cos_theta), clamp_unit(sin_theta), clamp_unit(theta_dot / 8.0)};
}

double standard_to_torque(double a) { return 2.0 * clamp_unit(a); }

StateVec cartpole_to_standard(double x, double x_dot, double theta, double theta_dot) {
  // Position/angle can exceed the termination bounds by one observation; the
  // observation ranges are doubled so that point still lands inside [-1, 1].
  const double theta_max = 24.0 * M_PI / 180.0;
  return {clamp_unit(x / 4.8), squash(1.0 / 240.0, x_dot),
          clamp_unit(theta / theta_max), squash(1.0 / 21.0, theta_dot)};
}

SpaceSpec pendulum_space() {
  std::vector<DimTransform> t{{DimTransform::Kind::kLinearScale, 1.0},
                              {DimTransform::Kind::kLinearScale, 1.0},
                              {DimTransform::Kind::kLinearScale, 8.0}};
  return SpaceSpec(std::move(t), 2.0);
}

SpaceSpec pendulum_discrete_space() {
  std::vector<DimTransform> t{{DimTransform::Kind::kLinearScale, 1.0},
                              {DimTransform::Kind::kLinearScale, 1.0},
                              {DimTransform::Kind::kLinearScale, 8.0}};
  return SpaceSpec(std::move(t), std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
}

SpaceSpec cartpole_space() {
  std::vector<DimTransform> t{{DimTransform::Kind::kLinearScale, 4.8},
                              {DimTransform::Kind::kSigmoidSquash, 1.0 / 240.0},
                              {DimTransform::Kind::kLinearScale, 24.0 * M_PI / 180.0},
                              {DimTransform::Kind::kSigmoidSquash, 1.0 / 21.0}};
  return SpaceSpec(std::move(t), std::vector<double>{0.0, 1.0});
}

}  // namespace spaql
