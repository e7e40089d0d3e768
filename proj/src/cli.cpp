#include "spaql/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "spaql/experiments.hpp"

namespace spaql {

namespace {

struct RunOpts {
  std::string env = "cartpole";
  std::string algo = "spaql";
  double xi = 0.4;
  int iterations = 100;
  int agents = 20;
  int eval_rollouts = 20;
  std::uint64_t seed = 0;
  double tau_min = 0.01;
  double u = 2.0;
  double d = 0.8;
  double lambda = 1.2;
  std::string boltzmann_norm = "shift";
  int split_reset_at = 2;
  bool ts_weight_prev = false;
  int workers = 0;
  std::string out_path;
  std::string config_path;
};

void add_run_options(CLI::App* cmd, RunOpts& o) {
  cmd->add_option("--env", o.env, "Environment")
      ->check(CLI::IsMember({"pendulum", "pendulum-scaled", "pendulum-discrete", "cartpole"}))
      ->capture_default_str();
  cmd->add_option("--algo", o.algo, "Algorithm")
      ->check(CLI::IsMember({"random", "aql", "spaql", "spaql-ts"}))
      ->capture_default_str();
  cmd->add_option("--iterations", o.iterations, "Training iterations per agent (K)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--agents", o.agents, "Number of independently seeded agents")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--eval-rollouts", o.eval_rollouts, "Evaluation rollouts per iteration (N)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed; agent i runs on seed + i")->capture_default_str();
  cmd->add_option("--tau-min", o.tau_min, "Minimum Boltzmann temperature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--u", o.u, "Temperature growth factor (> 1)")->capture_default_str();
  cmd->add_option("--d", o.d, "Growth-factor decay exponent in (0, 1)")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "Terminal-state weighting width (spaql-ts)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--boltzmann-norm", o.boltzmann_norm,
                  "Softmax stabilization: shift (subtract max) or scale (divide by max)")
      ->check(CLI::IsMember({"shift", "scale"}))
      ->capture_default_str();
  cmd->add_option("--split-reset-at", o.split_reset_at,
                  "Trainee resets after this many splits without improvement")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  cmd->add_flag("--ts-weight-prev", o.ts_weight_prev,
                "Weight the bootstrapped value by the pre-step state's distance");
  cmd->add_option("--workers", o.workers, "Parallel agents (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--config", o.config_path,
                  "Read defaults from a flat key = value file; command-line flags win");
}

// CLI11 only processes set_config on the root app, and the flat key = value
// layout maps onto subcommand flags, so config files are expanded by hand:
// each entry feeds the matching option (running its validators) unless the
// flag was also given on the command line.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::FileError(path + " was not readable");
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw CLI::FileError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    CLI::Option* opt =
        key == "config" || key == "help" ? nullptr : cmd->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw CLI::FileError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;  // flags override the file
    opt->add_result(value);
    opt->run_callback();
  }
}

RunConfig to_config(const RunOpts& o) {
  RunConfig cfg;
  cfg.env = *parse_env(o.env);
  cfg.algo = *parse_algo(o.algo);
  cfg.xi = o.xi;
  cfg.iterations = o.iterations;
  cfg.eval_rollouts = o.eval_rollouts;
  cfg.n_agents = o.agents;
  cfg.base_seed = o.seed;
  cfg.tau_min = o.tau_min;
  cfg.u = o.u;
  cfg.d = o.d;
  cfg.lambda = o.lambda;
  cfg.norm = o.boltzmann_norm == "scale" ? BoltzmannNorm::kScale : BoltzmannNorm::kShift;
  cfg.split_reset_at = o.split_reset_at;
  cfg.ts_weight_uses_prev_state = o.ts_weight_prev;
  cfg.workers = o.workers;
  return cfg;
}

std::string summary_line(const RunResult& r) {
  double arms = 0.0;
  for (const auto& a : r.agents) arms += static_cast<double>(a.final_arms);
  arms /= static_cast<double>(r.agents.size());
  std::ostringstream os;
  os << to_string(r.config.algo) << " on " << to_string(r.config.env) << " (xi="
     << format_g9(r.config.xi) << ", " << r.agents.size() << " agents, K=" << r.config.iterations
     << "): final mean " << format_g9(r.aggregate_mean) << ", 95% CI ["
     << format_g9(r.ci.low) << ", " << format_g9(r.ci.high) << "], mean arms "
     << format_g9(arms);
  return os.str();
}

int cmd_train(const RunOpts& o, double xi, const std::string& save_prefix, std::ostream& out) {
  RunConfig cfg = to_config(o);
  cfg.xi = xi;
  cfg.capture_policies = !save_prefix.empty();
  const RunResult result = train_run(cfg);
  write_curves_csv(result, o.out_path.empty() ? "curves.csv" : o.out_path);
  if (!save_prefix.empty()) {
    for (const AgentOutcome& a : result.agents) {
      AgentSnapshot snap{cfg.env, cfg.algo, cfg.xi, a.seed, kHorizon, a.policy};
      save_agent(snap, save_prefix + "_seed" + std::to_string(a.seed) + ".tsv");
    }
  }
  out << summary_line(result) << '\n';
  return 0;
}

int cmd_sweep(const RunOpts& o, const std::vector<double>& xi_list, std::ostream& out) {
  const RunConfig cfg = to_config(o);
  std::vector<double> xis = xi_list;
  if (xis.empty()) xis.assign(std::begin(kDefaultXiSweep), std::end(kDefaultXiSweep));
  const std::vector<SweepPoint> points = xi_sweep(cfg, xis);
  write_sweep_csv(cfg, points, o.out_path.empty() ? "sweep.csv" : o.out_path);
  for (const SweepPoint& p : points) {
    out << "xi=" << format_g9(p.xi) << " final_mean=" << format_g9(p.final_mean) << " ci95=["
        << format_g9(p.ci_low) << ", " << format_g9(p.ci_high) << "]\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& agent_path, int n_rollouts, std::uint64_t seed,
                 bool seed_given, std::ostream& out) {
  const AgentSnapshot snap = load_agent_file(agent_path);
  auto env = make_environment(snap.env);
  Rng rng(seed_given ? seed : snap.seed);
  const EvalResult ev = table_evaluate(snap.table, *env, n_rollouts, rng, snap.horizon);
  std::ostringstream os;
  os << to_string(snap.algo) << " on " << to_string(snap.env) << ": mean "
     << format_g9(ev.mean) << " over " << n_rollouts << " rollouts";
  if (ev.returns.size() >= 2) {
    const ConfidenceInterval ci = ci95(ev.returns);
    os << ", 95% CI [" << format_g9(ci.low) << ", " << format_g9(ci.high) << "]";
  }
  if (snap.env == EnvKind::kCartPole && ev.returns.size() == 100)
    os << ", solved=" << (solved_check(ev.returns) ? "yes" : "no");
  out << os.str() << '\n';
  return 0;
}

int cmd_export_policy(const std::string& agent_path, const std::string& out_path,
                      std::ostream& out) {
  const AgentSnapshot snap = load_agent_file(agent_path);
  if (out_path.empty()) {
    write_policy_tsv(out, snap.table);
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
    write_policy_tsv(f, snap.table);
    if (!f.good()) throw std::runtime_error("write failed: " + out_path);
  }
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, std::ostream& out) {
  const std::vector<CurveRow> rows_a = read_curves_csv(path_a);
  const std::vector<CurveRow> rows_b = read_curves_csv(path_b);
  const std::vector<double> a = final_eval_means(rows_a);
  const std::vector<double> b = final_eval_means(rows_b);
  out << "A: " << path_a << " (" << rows_a.front().algo << " on " << rows_a.front().env
      << ", n=" << a.size() << ", mean=" << format_g9(mean(a)) << ")\n";
  out << "B: " << path_b << " (" << rows_b.front().algo << " on " << rows_b.front().env
      << ", n=" << b.size() << ", mean=" << format_g9(mean(b)) << ")\n";
  const WelchResult two = welch_test(a, b, Sided::kTwo);
  const WelchResult one_ab = welch_test(a, b, Sided::kOne);
  const WelchResult one_ba = welch_test(b, a, Sided::kOne);
  out << "welch two-sided: t=" << format_g9(two.t) << " dof=" << format_g9(two.dof)
      << " p=" << format_g9(two.p) << '\n';
  out << "welch one-sided (A > B): p=" << format_g9(one_ab.p) << '\n';
  out << "welch one-sided (B > A): p=" << format_g9(one_ba.p) << '\n';
  if (one_ab.p < 0.05)
    out << "verdict: A better than B at alpha = 0.05\n";
  else if (one_ba.p < 0.05)
    out << "verdict: B better than A at alpha = 0.05\n";
  else
    out << "verdict: no significant difference at alpha = 0.05\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-partition Q-learning benchmark harness"};
  app.require_subcommand(1);

  RunOpts train_opts;
  double train_xi = 0.4;
  std::string save_prefix;
  CLI::App* train = app.add_subcommand("train", "Train agents and write a learning-curves CSV");
  train->add_option("--xi", train_xi, "UCB bonus scale")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_run_options(train, train_opts);
  train->add_option("--out", train_opts.out_path, "Curves CSV path")->default_str("curves.csv");
  train->add_option("--save-agents", save_prefix,
                    "Write each trained agent to PREFIX_seed<seed>.tsv");

  RunOpts sweep_opts;
  std::vector<double> xi_list;
  CLI::App* sweep = app.add_subcommand("sweep", "Run the xi sweep and write a summary CSV");
  sweep->add_option("--xi-list", xi_list, "Comma-separated xi values (default: the 13-value grid)")
      ->delimiter(',');
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--out", sweep_opts.out_path, "Sweep CSV path")->default_str("sweep.csv");

  std::string eval_path;
  int eval_rollouts = 100;
  std::uint64_t eval_seed = 0;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a saved agent file");
  evaluate->add_option("agent", eval_path, "Saved agent file")->required();
  CLI::Option* eval_seed_opt =
      evaluate->add_option("--seed", eval_seed, "Evaluation seed (default: the saved seed)");
  evaluate->add_option("--eval-rollouts", eval_rollouts, "Number of rollouts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string export_path, export_out;
  CLI::App* export_policy =
      app.add_subcommand("export-policy", "Write the policy table of a saved agent");
  export_policy->add_option("agent", export_path, "Saved agent file")->required();
  export_policy->add_option("--out", export_out, "Output TSV path (default: stdout)");

  std::string cmp_a, cmp_b;
  CLI::App* compare = app.add_subcommand("compare", "Welch test between two curves CSVs");
  compare->add_option("a", cmp_a, "First curves CSV")->required();
  compare->add_option("b", cmp_b, "Second curves CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (train->parsed() && !train_opts.config_path.empty())
      apply_config_file(train, train_opts.config_path);
    if (sweep->parsed() && !sweep_opts.config_path.empty())
      apply_config_file(sweep, sweep_opts.config_path);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (train->parsed()) {
      if (!save_prefix.empty() && train_opts.algo == "aql") {
        err << "error: --save-agents: aql has one partition per timestep and no single-table "
               "policy; use spaql, spaql-ts, or random\n";
        return 2;
      }
      return cmd_train(train_opts, train_xi, save_prefix, out);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_opts, xi_list, out);
    if (evaluate->parsed())
      return cmd_evaluate(eval_path, eval_rollouts, eval_seed, eval_seed_opt->count() > 0, out);
    if (export_policy->parsed()) return cmd_export_policy(export_path, export_out, out);
    if (compare->parsed()) return cmd_compare(cmp_a, cmp_b, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no command\n";
  return 2;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace spaql
