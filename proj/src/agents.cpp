#include "spaql/agents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spaql {

double ucb_bonus(double xi, std::uint64_t visits) {
  if (xi < 0.0) throw std::invalid_argument("ucb_bonus: xi must be nonnegative");
  if (visits == 0) throw std::invalid_argument("ucb_bonus: visits must be >= 1");
  return xi / std::sqrt(static_cast<double>(visits));
}

double learning_rate(double horizon, std::uint64_t visits) {
  if (visits == 0) throw std::invalid_argument("learning_rate: visits must be >= 1");
  return (horizon + 1.0) / (horizon + static_cast<double>(visits));
}

void q_update(Ball& ball, double reward, double v_next, double horizon, double xi) {
  const double alpha = learning_rate(horizon, ball.visits);
  ball.q = (1.0 - alpha) * ball.q + alpha * (reward + v_next + ucb_bonus(xi, ball.visits));
}

double theoretical_xi(double horizon, double episodes, double delta, double lipschitz,
                      double d_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("theoretical_xi: delta in (0,1)");
  return 2.0 * std::sqrt(horizon * horizon * horizon *
                         std::log(4.0 * horizon * episodes / delta)) +
         4.0 * lipschitz * d_max;
}

double ts_weight(std::span<const double> x, const TerminalStateConfig& ts) {
  if (!(ts.lambda > 0.0)) throw std::invalid_argument("ts_weight: lambda must be positive");
  const double z = state_distance(x, ts.x_ref.span()) / ts.lambda;
  return std::exp(-z * z);
}

double spaql_ts_value(const PartitionTree& tree, std::span<const double> x_next, double horizon,
                      const TerminalStateConfig& ts) {
  return ts_weight(x_next, ts) * tree.value_upper(x_next, horizon);
}

std::int32_t boltzmann_select(const PartitionTree& tree, std::span<const std::int32_t> leaves,
                              double tau, Rng& rng, BoltzmannNorm norm) {
  if (leaves.empty()) throw std::invalid_argument("boltzmann_select: empty leaf set");
  if (!(tau > 0.0)) throw std::invalid_argument("boltzmann_select: tau must be positive");
  if (leaves.size() == 1) return leaves[0];

  // The exponent argument per leaf: Q/tau, optionally with Q first divided by
  // max(Q) (kScale). Stabilized by subtracting the max exponent, which leaves
  // the sampling distribution unchanged.
  double qmax = -std::numeric_limits<double>::infinity();
  for (std::int32_t i : leaves) qmax = std::max(qmax, tree.node(i).q);
  const double scale = (norm == BoltzmannNorm::kScale && qmax != 0.0) ? qmax : 1.0;

  double emax = -std::numeric_limits<double>::infinity();
  for (std::int32_t i : leaves) emax = std::max(emax, tree.node(i).q / scale / tau);

  thread_local std::vector<double> weights;
  weights.clear();
  double total = 0.0;
  for (std::int32_t i : leaves) {
    const double w = std::exp(tree.node(i).q / scale / tau - emax);
    weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    // Degenerate weights: fall back to a uniform draw.
    return leaves[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(leaves.size())))];
  }
  double r = rng.next_double() * total;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    r -= weights[k];
    if (r < 0.0) return leaves[k];
  }
  return leaves.back();
}

double greedy_rollout(const PartitionTree& tree, Environment& env, Rng& rng, int horizon) {
  StateVec obs = env.reset(rng);
  std::vector<std::int32_t> buf;
  double total = 0.0;
  for (int h = 1; h <= horizon; ++h) {
    tree.relevant_leaves(obs.span(), buf);
    const std::int32_t sel = select_greedy(tree, buf);
    const Action act = sample_action(tree, sel, rng);
    const StepOutcome out = env.step(act);
    total += out.reward;
    obs = out.observation;
    if (out.done) break;
  }
  return total;
}

EvalResult evaluate(const PartitionTree& tree, Environment& env, int n_rollouts, Rng& rng,
                    int horizon) {
  if (n_rollouts < 1) throw std::invalid_argument("evaluate: need at least one rollout");
  EvalResult res;
  res.returns.reserve(static_cast<std::size_t>(n_rollouts));
  double sum = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    const double ret = greedy_rollout(tree, env, rng, horizon);
    res.returns.push_back(ret);
    sum += ret;
  }
  res.mean = sum / n_rollouts;
  return res;
}

AqlAgent::AqlAgent(const SpaceSpec& spec, int horizon_in, double xi_in)
    : xi(xi_in), horizon(horizon_in) {
  if (horizon < 1) throw std::invalid_argument("AqlAgent: horizon must be >= 1");
  trees.reserve(static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) trees.emplace_back(spec, static_cast<double>(horizon));
}

std::int64_t AqlAgent::total_arms() const {
  std::int64_t n = 0;
  for (const auto& t : trees) n += t.arm_count();
  return n;
}

double aql_episode(AqlAgent& agent, Environment& env, Rng& rng) {
  StateVec obs = env.reset(rng);
  std::vector<std::int32_t> buf;
  const double cap = static_cast<double>(agent.horizon);
  double total = 0.0;
  for (int h = 1; h <= agent.horizon; ++h) {
    PartitionTree& tree = agent.trees[static_cast<std::size_t>(h - 1)];
    tree.relevant_leaves(obs.span(), buf);
    const std::int32_t sel = select_greedy(tree, buf);
    const Action act = sample_action(tree, sel, rng);
    const StepOutcome out = env.step(act);
    total += out.reward;
    tree.record_visit(sel);
    double v_next = 0.0;  // V_{H+1} = 0, and 0 once the env terminates
    if (!out.done && h < agent.horizon)
      v_next = agent.trees[static_cast<std::size_t>(h)].value_upper(out.observation.span(), cap);
    q_update(tree.node_mut(sel), out.reward, v_next, cap, agent.xi);
    tree.split_if_due(sel);
    obs = out.observation;
    if (out.done) break;
  }
  return total;
}

double aql_greedy_rollout(const AqlAgent& agent, Environment& env, Rng& rng) {
  StateVec obs = env.reset(rng);
  std::vector<std::int32_t> buf;
  double total = 0.0;
  for (int h = 1; h <= agent.horizon; ++h) {
    const PartitionTree& tree = agent.trees[static_cast<std::size_t>(h - 1)];
    tree.relevant_leaves(obs.span(), buf);
    const std::int32_t sel = select_greedy(tree, buf);
    const Action act = sample_action(tree, sel, rng);
    const StepOutcome out = env.step(act);
    total += out.reward;
    obs = out.observation;
    if (out.done) break;
  }
  return total;
}

EvalResult aql_evaluate(const AqlAgent& agent, Environment& env, int n_rollouts, Rng& rng) {
  if (n_rollouts < 1) throw std::invalid_argument("aql_evaluate: need at least one rollout");
  EvalResult res;
  res.returns.reserve(static_cast<std::size_t>(n_rollouts));
  double sum = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    const double ret = aql_greedy_rollout(agent, env, rng);
    res.returns.push_back(ret);
    sum += ret;
  }
  res.mean = sum / n_rollouts;
  return res;
}

SpaqlAgent::SpaqlAgent(const SpaceSpec& spec, int horizon_in, SpaqlParams params_in)
    : best(spec, static_cast<double>(horizon_in)),
      trainee(spec, static_cast<double>(horizon_in)),
      params(std::move(params_in)),
      horizon(horizon_in),
      tau(params.tau_min),
      u_cur(params.u),
      best_score(std::numeric_limits<double>::quiet_NaN()) {
  if (horizon < 1) throw std::invalid_argument("SpaqlAgent: horizon must be >= 1");
  if (!(params.tau_min > 0.0)) throw std::invalid_argument("SpaqlAgent: tau_min must be positive");
  if (!(params.u > 1.0)) throw std::invalid_argument("SpaqlAgent: u must exceed 1");
  if (!(params.d > 0.0 && params.d < 1.0)) throw std::invalid_argument("SpaqlAgent: d in (0,1)");
}

void SpaqlAgent::init_baseline(Environment& env, int n_rollouts, Rng& rng) {
  EvalResult ev = evaluate(best, env, n_rollouts, rng, horizon);
  best_score = ev.mean;
  best_returns = std::move(ev.returns);
}

bool SpaqlAgent::apply_eval_outcome(double eval_mean) {
  if (eval_mean > best_score) {  // strict: ties reject
    best = trainee;
    best_score = eval_mean;
    tau = params.tau_min;
    u_cur = std::pow(u_cur, params.d);
    splits_since_accept = 0;
    return true;
  }
  tau = u_cur * tau;
  if (splits_since_accept >= params.split_reset_at) {
    trainee = best;
    tau = params.tau_min;
    splits_since_accept = 0;
  }
  return false;
}

SpaqlIterationResult spaql_iteration(SpaqlAgent& agent, Environment& env, Rng& rng,
                                     int n_rollouts) {
  if (std::isnan(agent.best_score))
    throw std::logic_error("spaql_iteration: call init_baseline first");

  // Training episode on the trainee.
  StateVec obs = env.reset(rng);
  std::vector<std::int32_t> buf;
  const double cap = static_cast<double>(agent.horizon);
  int splits = 0;
  for (int h = 1; h <= agent.horizon; ++h) {
    agent.trainee.relevant_leaves(obs.span(), buf);
    const std::int32_t sel =
        boltzmann_select(agent.trainee, buf, agent.tau, rng, agent.params.norm);
    const Action act = sample_action(agent.trainee, sel, rng);
    const StepOutcome out = env.step(act);
    agent.trainee.record_visit(sel);
    double v_next = 0.0;  // nothing is collectible after true termination
    if (!out.done) {
      // No V_{H+1} = 0 boundary here: the last step bootstraps as if
      // non-terminal, which is what makes the single partition time-invariant.
      v_next = agent.trainee.value_upper(out.observation.span(), cap);
      if (agent.params.ts) {
        const std::span<const double> wstate =
            agent.params.ts_weight_uses_prev_state ? obs.span() : out.observation.span();
        v_next *= ts_weight(wstate, *agent.params.ts);
      }
    }
    q_update(agent.trainee.node_mut(sel), out.reward, v_next, cap, agent.params.xi);
    if (agent.trainee.split_if_due(sel)) ++splits;
    obs = out.observation;
    if (out.done) break;
  }
  agent.splits_since_accept += splits;

  EvalResult ev = evaluate(agent.trainee, env, n_rollouts, rng, agent.horizon);
  const bool accepted = agent.apply_eval_outcome(ev.mean);
  if (accepted) agent.best_returns = std::move(ev.returns);
  return {accepted, ev.mean};
}

}  // namespace spaql
