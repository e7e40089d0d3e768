#pragma once

#include <optional>

#include "spaql/environments.hpp"
#include "spaql/partition.hpp"

namespace spaql {

// UCB bonus b_xi(v) = xi / sqrt(v).
double ucb_bonus(double xi, std::uint64_t visits);

// (H+1)/(H+v); equals 1 at v = 1 so the optimistic init is overwritten.
double learning_rate(double horizon, std::uint64_t visits);

// Q <- (1-a)Q + a(r + v_next + b_xi(v)), with v the ball's already-incremented
// visit count. Uncapped; the cap lives in value_upper.
void q_update(Ball& ball, double reward, double v_next, double horizon, double xi);

// 2 sqrt(H^3 log(4HK/delta)) + 4 L d_max. Calculator only; runs hand-tune xi.
double theoretical_xi(double horizon, double episodes, double delta, double lipschitz,
                      double d_max);

struct TerminalStateConfig {
  StateVec x_ref;
  double lambda = 1.2;
};

// Gaussian factor exp(-(D(x, x_ref)/lambda)^2), D the state-part max metric.
double ts_weight(std::span<const double> x, const TerminalStateConfig& ts);

// Terminal-state-weighted value: ts_weight(x_next) * value_upper(x_next).
double spaql_ts_value(const PartitionTree& tree, std::span<const double> x_next, double horizon,
                      const TerminalStateConfig& ts);

// kShift subtracts max(Q) inside the exponent (distribution identical to the
// raw softmax); kScale divides Q by max(Q) first — kept for fidelity studies,
// not shift-invariant and ill-behaved when max(Q) <= 0.
enum class BoltzmannNorm { kShift, kScale };

std::int32_t boltzmann_select(const PartitionTree& tree, std::span<const std::int32_t> leaves,
                              double tau, Rng& rng, BoltzmannNorm norm = BoltzmannNorm::kShift);

struct EvalResult {
  double mean = 0.0;
  std::vector<double> returns;
};

// Greedy selection + uniform within-ball action draw until step `horizon` or
// env termination.
double greedy_rollout(const PartitionTree& tree, Environment& env, Rng& rng, int horizon);
EvalResult evaluate(const PartitionTree& tree, Environment& env, int n_rollouts, Rng& rng,
                    int horizon);

// ---- AQL: one partition per timestep, greedy + UCB ----

struct AqlAgent {
  std::vector<PartitionTree> trees;  // trees[h-1] drives step h
  double xi = 0.0;
  int horizon = 0;

  AqlAgent(const SpaceSpec& spec, int horizon, double xi);
  std::int64_t total_arms() const;
};

// One training episode; returns the cumulative reward. V at step h+1 comes
// from trees[h], with V = 0 beyond the horizon and at early termination.
double aql_episode(AqlAgent& agent, Environment& env, Rng& rng);
double aql_greedy_rollout(const AqlAgent& agent, Environment& env, Rng& rng);
EvalResult aql_evaluate(const AqlAgent& agent, Environment& env, int n_rollouts, Rng& rng);

// ---- SPAQL / SPAQL-TS: single partition, Boltzmann + cyclic temperature ----

struct SpaqlParams {
  double xi = 0.0;
  double tau_min = 0.01;
  double u = 2.0;
  double d = 0.8;
  int split_reset_at = 2;  // reset trainee after this many splits without accept
  BoltzmannNorm norm = BoltzmannNorm::kShift;
  std::optional<TerminalStateConfig> ts;  // engaged for SPAQL-TS
  // Weight the bootstrapped value by the previous state's distance instead of
  // the successor's own.
  bool ts_weight_uses_prev_state = false;
};

struct SpaqlAgent {
  PartitionTree best;     // P: best agent found so far
  PartitionTree trainee;  // P': the copy being trained
  SpaqlParams params;
  int horizon = 0;
  double tau;
  double u_cur;
  int splits_since_accept = 0;
  double best_score;                 // NaN until init_baseline
  std::vector<double> best_returns;  // eval returns backing best_score

  SpaqlAgent(const SpaceSpec& spec, int horizon, SpaqlParams params);

  // Evaluates the fresh agent to seed best_score before the first iteration.
  void init_baseline(Environment& env, int n_rollouts, Rng& rng);

  // Acceptance / temperature / reset transition after an evaluation. Returns
  // whether the trainee was accepted as the new best.
  bool apply_eval_outcome(double eval_mean);
};

struct SpaqlIterationResult {
  bool accepted = false;
  double eval_mean = 0.0;
};

// One SPAQL cycle: train the trainee for one episode (Boltzmann at the current
// temperature), evaluate it with n_rollouts greedy rollouts, then accept /
// heat / reset per the temperature schedule.
SpaqlIterationResult spaql_iteration(SpaqlAgent& agent, Environment& env, Rng& rng,
                                     int n_rollouts);

}  // namespace spaql
