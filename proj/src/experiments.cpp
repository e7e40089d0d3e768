#include "spaql/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spaql {

std::string to_string(EnvKind env) {
  switch (env) {
    case EnvKind::kPendulum: return "pendulum";
    case EnvKind::kPendulumScaled: return "pendulum-scaled";
    case EnvKind::kPendulumDiscrete: return "pendulum-discrete";
    case EnvKind::kCartPole: return "cartpole";
  }
  return "?";
}

std::string to_string(AlgoKind algo) {
  switch (algo) {
    case AlgoKind::kRandom: return "random";
    case AlgoKind::kAql: return "aql";
    case AlgoKind::kSpaql: return "spaql";
    case AlgoKind::kSpaqlTs: return "spaql-ts";
  }
  return "?";
}

std::optional<EnvKind> parse_env(const std::string& name) {
  if (name == "pendulum") return EnvKind::kPendulum;
  if (name == "pendulum-scaled") return EnvKind::kPendulumScaled;
  if (name == "pendulum-discrete") return EnvKind::kPendulumDiscrete;
  if (name == "cartpole") return EnvKind::kCartPole;
  return std::nullopt;
}

std::optional<AlgoKind> parse_algo(const std::string& name) {
  if (name == "random") return AlgoKind::kRandom;
  if (name == "aql") return AlgoKind::kAql;
  if (name == "spaql") return AlgoKind::kSpaql;
  if (name == "spaql-ts") return AlgoKind::kSpaqlTs;
  return std::nullopt;
}

std::unique_ptr<Environment> make_environment(EnvKind env) {
  switch (env) {
    case EnvKind::kPendulum: return std::make_unique<PendulumEnv>(false, false);
    case EnvKind::kPendulumScaled: return std::make_unique<PendulumEnv>(true, false);
    case EnvKind::kPendulumDiscrete: return std::make_unique<PendulumEnv>(false, true);
    case EnvKind::kCartPole: return std::make_unique<CartPoleEnv>();
  }
  throw std::invalid_argument("make_environment: unknown environment");
}

StateVec default_x_ref(EnvKind env) {
  // Upright-at-rest references: pendulum (cos, sin, vel) = (1, 0, 0),
  // cartpole all-zero.
  if (env == EnvKind::kCartPole) return {0.0, 0.0, 0.0, 0.0};
  return {1.0, 0.0, 0.0};
}

std::vector<double> RunResult::final_means() const {
  std::vector<double> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.final_eval);
  return out;
}

namespace {
void validate(const RunConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
  if (cfg.eval_rollouts < 1) throw std::invalid_argument("config: eval-rollouts must be >= 1");
  if (cfg.n_agents < 1) throw std::invalid_argument("config: agents must be >= 1");
  if (cfg.xi < 0.0) throw std::invalid_argument("config: xi must be >= 0");
  if (!(cfg.tau_min > 0.0)) throw std::invalid_argument("config: tau-min must be > 0");
  if (!(cfg.u > 1.0)) throw std::invalid_argument("config: u must be > 1");
  if (!(cfg.d > 0.0 && cfg.d < 1.0)) throw std::invalid_argument("config: d must be in (0, 1)");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("config: lambda must be > 0");
  if (cfg.split_reset_at != 2 && cfg.split_reset_at != 3)
    throw std::invalid_argument("config: split-reset-at must be 2 or 3");
  if (cfg.workers < 0) throw std::invalid_argument("config: workers must be >= 0");
}
}  // namespace

AgentOutcome run_single_agent(const RunConfig& cfg, int agent_index) {
  AgentOutcome out;
  out.seed = cfg.base_seed + static_cast<std::uint64_t>(agent_index);
  Rng rng(out.seed);
  std::unique_ptr<Environment> env = make_environment(cfg.env);
  const int K = cfg.iterations;
  const int N = cfg.eval_rollouts;
  out.curve.reserve(static_cast<std::size_t>(K));

  switch (cfg.algo) {
    case AlgoKind::kRandom: {
      // Never-trained single ball: uniform action sampling under the same
      // evaluation protocol as everyone else.
      PartitionTree tree(env->space(), kHorizon);
      EvalResult ev;
      for (int k = 1; k <= K; ++k) {
        ev = evaluate(tree, *env, N, rng, kHorizon);
        out.curve.push_back({k, static_cast<std::int64_t>(k) * kHorizon, ev.mean, tree.arm_count()});
      }
      out.final_returns = std::move(ev.returns);
      if (cfg.capture_policies) out.policy = to_policy_table(tree);
      break;
    }
    case AlgoKind::kAql: {
      AqlAgent agent(env->space(), kHorizon, cfg.xi);
      EvalResult ev;
      for (int k = 1; k <= K; ++k) {
        aql_episode(agent, *env, rng);
        ev = aql_evaluate(agent, *env, N, rng);
        out.curve.push_back(
            {k, static_cast<std::int64_t>(k) * kHorizon, ev.mean, agent.total_arms()});
      }
      out.final_returns = std::move(ev.returns);
      break;
    }
    case AlgoKind::kSpaql:
    case AlgoKind::kSpaqlTs: {
      SpaqlParams p;
      p.xi = cfg.xi;
      p.tau_min = cfg.tau_min;
      p.u = cfg.u;
      p.d = cfg.d;
      p.split_reset_at = cfg.split_reset_at;
      p.norm = cfg.norm;
      if (cfg.algo == AlgoKind::kSpaqlTs) {
        p.ts = TerminalStateConfig{default_x_ref(cfg.env), cfg.lambda};
        p.ts_weight_uses_prev_state = cfg.ts_weight_uses_prev_state;
      }
      SpaqlAgent agent(env->space(), kHorizon, p);
      agent.init_baseline(*env, N, rng);
      for (int k = 1; k <= K; ++k) {
        spaql_iteration(agent, *env, rng, N);
        // Curves track the stored best agent: the policy this run would hand
        // back if stopped after iteration k.
        out.curve.push_back({k, static_cast<std::int64_t>(k) * kHorizon, agent.best_score,
                             agent.best.arm_count()});
      }
      out.final_returns = agent.best_returns;
      if (cfg.capture_policies) out.policy = to_policy_table(agent.best);
      break;
    }
  }

  out.final_eval = out.curve.back().eval_mean;
  out.final_arms = out.curve.back().arms;
  return out;
}

RunResult train_run(const RunConfig& cfg) {
  validate(cfg);
  RunResult result;
  result.config = cfg;
  result.agents.resize(static_cast<std::size_t>(cfg.n_agents));

  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, cfg.n_agents);

  if (workers == 1) {
    for (int i = 0; i < cfg.n_agents; ++i)
      result.agents[static_cast<std::size_t>(i)] = run_single_agent(cfg, i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto body = [&] {
      try {
        for (int i = next.fetch_add(1); i < cfg.n_agents; i = next.fetch_add(1))
          result.agents[static_cast<std::size_t>(i)] = run_single_agent(cfg, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  const std::vector<double> finals = result.final_means();
  result.aggregate_mean = mean(finals);
  result.ci = finals.size() >= 2 ? ci95(finals)
                                 : ConfidenceInterval{result.aggregate_mean, result.aggregate_mean};
  return result;
}

std::vector<SweepPoint> xi_sweep(const RunConfig& base, std::span<const double> xi_values) {
  if (xi_values.empty()) throw std::invalid_argument("xi_sweep: empty xi list");
  std::vector<SweepPoint> points;
  points.reserve(xi_values.size());
  for (double xi : xi_values) {
    RunConfig cfg = base;
    cfg.xi = xi;
    const RunResult r = train_run(cfg);
    points.push_back({xi, r.aggregate_mean, r.ci.low, r.ci.high, cfg.n_agents});
  }
  return points;
}

void write_curves_csv(std::ostream& os, const RunResult& result) {
  os << "algo,env,xi,seed,iteration,samples,eval_mean,n_arms\n";
  const std::string algo = to_string(result.config.algo);
  const std::string env = to_string(result.config.env);
  const std::string xi = format_g9(result.config.xi);
  for (const AgentOutcome& a : result.agents) {
    for (const IterationRecord& rec : a.curve) {
      os << algo << ',' << env << ',' << xi << ',' << a.seed << ',' << rec.iteration << ','
         << rec.samples << ',' << format_g9(rec.eval_mean) << ',' << rec.arms << '\n';
    }
  }
}

void write_curves_csv(const RunResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_curves_csv(f, result);
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

void write_sweep_csv(std::ostream& os, const RunConfig& config,
                     std::span<const SweepPoint> points) {
  os << "algo,env,xi,final_mean,ci95_low,ci95_high,n_agents\n";
  const std::string algo = to_string(config.algo);
  const std::string env = to_string(config.env);
  for (const SweepPoint& p : points) {
    os << algo << ',' << env << ',' << format_g9(p.xi) << ',' << format_g9(p.final_mean) << ','
       << format_g9(p.ci_low) << ',' << format_g9(p.ci_high) << ',' << p.n_agents << '\n';
  }
}

void write_sweep_csv(const RunConfig& config, std::span<const SweepPoint> points,
                     const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_sweep_csv(f, config, points);
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}
}  // namespace

std::vector<CurveRow> parse_curves_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("curves csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "algo,env,xi,seed,iteration,samples,eval_mean,n_arms")
    throw std::runtime_error("curves csv: unexpected header '" + line + "'");
  std::vector<CurveRow> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 8) throw std::runtime_error("curves csv: bad row '" + line + "'");
    CurveRow r;
    r.algo = f[0];
    r.env = f[1];
    r.xi = std::stod(f[2]);
    r.seed = std::stoull(f[3]);
    r.iteration = std::stoi(f[4]);
    r.samples = std::stoll(f[5]);
    r.eval_mean = std::stod(f[6]);
    r.arms = std::stoll(f[7]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("curves csv: no data rows");
  return rows;
}

std::vector<CurveRow> read_curves_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return parse_curves_csv(f);
}

std::vector<double> final_eval_means(const std::vector<CurveRow>& rows) {
  std::map<std::uint64_t, CurveRow> last;
  for (const CurveRow& r : rows) {
    auto it = last.find(r.seed);
    if (it == last.end() || r.iteration > it->second.iteration) last[r.seed] = r;
  }
  std::vector<double> out;
  out.reserve(last.size());
  for (const auto& [seed, row] : last) out.push_back(row.eval_mean);
  return out;
}

void save_agent(std::ostream& os, const AgentSnapshot& snap) {
  os << "# env = " << to_string(snap.env) << '\n';
  os << "# algo = " << to_string(snap.algo) << '\n';
  os << "# xi = " << format_g9(snap.xi) << '\n';
  os << "# seed = " << snap.seed << '\n';
  os << "# H = " << snap.horizon << '\n';
  write_policy_tsv(os, snap.table);
}

void save_agent(const AgentSnapshot& snap, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_agent(f, snap);
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

AgentSnapshot load_agent(std::istream& is) {
  AgentSnapshot snap;
  bool have_env = false, have_algo = false;
  std::string line;
  while (is.peek() == '#' && std::getline(is, line)) {
    std::istringstream ls(line);
    std::string hash, key, eq, value;
    ls >> hash >> key >> eq >> value;
    if (hash != "#" || eq != "=") throw std::runtime_error("agent file: bad header line '" + line + "'");
    if (key == "env") {
      const auto e = parse_env(value);
      if (!e) throw std::runtime_error("agent file: unknown env '" + value + "'");
      snap.env = *e;
      have_env = true;
    } else if (key == "algo") {
      const auto a = parse_algo(value);
      if (!a) throw std::runtime_error("agent file: unknown algo '" + value + "'");
      snap.algo = *a;
      have_algo = true;
    } else if (key == "xi") {
      snap.xi = std::stod(value);
    } else if (key == "seed") {
      snap.seed = std::stoull(value);
    } else if (key == "H") {
      snap.horizon = std::stoi(value);
    } else {
      throw std::runtime_error("agent file: unknown header key '" + key + "'");
    }
  }
  if (!have_env || !have_algo) throw std::runtime_error("agent file: missing env/algo header");
  snap.table = parse_policy_tsv(is);
  const SpaceSpec spec = make_environment(snap.env)->space();
  if (snap.table.state_dims != spec.state_dims() || snap.table.action_kind != spec.action_kind())
    throw std::runtime_error("agent file: table does not match environment space");
  return snap;
}

AgentSnapshot load_agent_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return load_agent(f);
}

double table_greedy_rollout(const PolicyTable& table, Environment& env, Rng& rng, int horizon) {
  StateVec obs = env.reset(rng);
  double total = 0.0;
  for (int h = 1; h <= horizon; ++h) {
    const int row = table.greedy_row(obs.span());
    if (row < 0) throw std::runtime_error("policy table does not cover the observed state");
    const Action act = sample_row_action(table, row, rng);
    const StepOutcome out = env.step(act);
    total += out.reward;
    obs = out.observation;
    if (out.done) break;
  }
  return total;
}

EvalResult table_evaluate(const PolicyTable& table, Environment& env, int n_rollouts, Rng& rng,
                          int horizon) {
  if (n_rollouts < 1) throw std::invalid_argument("table_evaluate: need at least one rollout");
  EvalResult res;
  res.returns.reserve(static_cast<std::size_t>(n_rollouts));
  double sum = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    const double ret = table_greedy_rollout(table, env, rng, horizon);
    res.returns.push_back(ret);
    sum += ret;
  }
  res.mean = sum / n_rollouts;
  return res;
}

}  // namespace spaql
