#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spaql/agents.hpp"
#include "spaql/policy_table.hpp"
#include "spaql/stats.hpp"

namespace spaql {

inline constexpr int kHorizon = 200;

// The sweep grid used across the benchmark study (13 values including 0).
inline constexpr double kDefaultXiSweep[] = {0.0, 0.4, 4.0,  10.0, 20.0, 30.0, 40.0,
                                             50.0, 60.0, 70.0, 80.0, 120.0, 160.0};

enum class EnvKind { kPendulum, kPendulumScaled, kPendulumDiscrete, kCartPole };
enum class AlgoKind { kRandom, kAql, kSpaql, kSpaqlTs };

std::string to_string(EnvKind env);
std::string to_string(AlgoKind algo);
std::optional<EnvKind> parse_env(const std::string& name);
std::optional<AlgoKind> parse_algo(const std::string& name);

std::unique_ptr<Environment> make_environment(EnvKind env);
// Standard-space reference state for terminal-state weighting.
StateVec default_x_ref(EnvKind env);

struct RunConfig {
  EnvKind env = EnvKind::kCartPole;
  AlgoKind algo = AlgoKind::kSpaql;
  double xi = 0.4;
  int iterations = 100;    // K
  int eval_rollouts = 20;  // N
  int n_agents = 20;
  std::uint64_t base_seed = 0;  // agent i uses seed base_seed + i
  double tau_min = 0.01;
  double u = 2.0;
  double d = 0.8;
  double lambda = 1.2;
  BoltzmannNorm norm = BoltzmannNorm::kShift;
  int split_reset_at = 2;
  bool ts_weight_uses_prev_state = false;
  int workers = 0;  // 0: use available parallelism
  bool capture_policies = false;
};

struct IterationRecord {
  int iteration = 0;
  std::int64_t samples = 0;  // iteration * H; training samples only
  double eval_mean = 0.0;
  std::int64_t arms = 0;
};

struct AgentOutcome {
  std::uint64_t seed = 0;
  std::vector<IterationRecord> curve;
  double final_eval = 0.0;
  std::int64_t final_arms = 0;
  std::vector<double> final_returns;  // per-rollout returns behind final_eval
  PolicyTable policy;                 // populated when capture_policies is set
};

struct RunResult {
  RunConfig config;
  std::vector<AgentOutcome> agents;
  double aggregate_mean = 0.0;
  ConfidenceInterval ci;

  std::vector<double> final_means() const;
};

AgentOutcome run_single_agent(const RunConfig& config, int agent_index);
RunResult train_run(const RunConfig& config);

struct SweepPoint {
  double xi = 0.0;
  double final_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_agents = 0;
};

std::vector<SweepPoint> xi_sweep(const RunConfig& base, std::span<const double> xi_values);

// curves CSV: algo,env,xi,seed,iteration,samples,eval_mean,n_arms
void write_curves_csv(std::ostream& os, const RunResult& result);
void write_curves_csv(const RunResult& result, const std::string& path);

// sweep CSV: algo,env,xi,final_mean,ci95_low,ci95_high,n_agents
void write_sweep_csv(std::ostream& os, const RunConfig& config, std::span<const SweepPoint> points);
void write_sweep_csv(const RunConfig& config, std::span<const SweepPoint> points,
                     const std::string& path);

struct CurveRow {
  std::string algo, env;
  double xi = 0.0;
  std::uint64_t seed = 0;
  int iteration = 0;
  std::int64_t samples = 0;
  double eval_mean = 0.0;
  std::int64_t arms = 0;
};

std::vector<CurveRow> parse_curves_csv(std::istream& is);
std::vector<CurveRow> read_curves_csv(const std::string& path);
// Final-iteration eval mean per seed, ordered by seed.
std::vector<double> final_eval_means(const std::vector<CurveRow>& rows);

// Saved-agent file: `# key = value` header (env, algo, xi, seed, H) followed
// by the policy TSV.
struct AgentSnapshot {
  EnvKind env = EnvKind::kCartPole;
  AlgoKind algo = AlgoKind::kSpaql;
  double xi = 0.0;
  std::uint64_t seed = 0;
  int horizon = kHorizon;
  PolicyTable table;
};

void save_agent(std::ostream& os, const AgentSnapshot& snap);
void save_agent(const AgentSnapshot& snap, const std::string& path);
AgentSnapshot load_agent(std::istream& is);
AgentSnapshot load_agent_file(const std::string& path);

// Greedy rollouts driven by a policy table instead of a live tree.
double table_greedy_rollout(const PolicyTable& table, Environment& env, Rng& rng, int horizon);
EvalResult table_evaluate(const PolicyTable& table, Environment& env, int n_rollouts, Rng& rng,
                          int horizon);

}  // namespace spaql
