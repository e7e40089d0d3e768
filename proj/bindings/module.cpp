#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spaql/agents.hpp"
#include "spaql/cli.hpp"
#include "spaql/experiments.hpp"
#include "spaql/stats.hpp"

#include <sstream>

namespace py = pybind11;
using namespace spaql;

namespace {

StateVec to_state(const std::vector<double>& xs) {
  if (xs.size() > kMaxStateDims) throw std::invalid_argument("state vector too long");
  StateVec v;
  for (double x : xs) v.push_back(x);
  return v;
}

std::vector<double> from_state(const StateVec& v) { return {v.begin(), v.end()}; }

EnvKind env_from_name(const std::string& name) {
  const auto e = parse_env(name);
  if (!e) throw std::invalid_argument("unknown environment '" + name + "'");
  return *e;
}

AlgoKind algo_from_name(const std::string& name) {
  const auto a = parse_algo(name);
  if (!a) throw std::invalid_argument("unknown algorithm '" + name + "'");
  return *a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive-partition Q-learning: environments, agents, and experiment harness";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("next_double", &Rng::next_double)
      .def("uniform", &Rng::uniform, py::arg("lo"), py::arg("hi"))
      .def("uniform_int", &Rng::uniform_int, py::arg("n"))
      .def("split", &Rng::split);

  m.def("squash", &squash, py::arg("m"), py::arg("y"));
  m.def("normalize_angle", &normalize_angle, py::arg("theta"));
  m.def(
      "state_distance",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return state_distance(std::span<const double>(a), std::span<const double>(b));
      },
      py::arg("a"), py::arg("b"));
  m.def("theoretical_xi", &theoretical_xi, py::arg("horizon"), py::arg("episodes"),
        py::arg("delta"), py::arg("lipschitz") = 0.0, py::arg("d_max") = 1.0);
  m.def("ucb_bonus", &ucb_bonus, py::arg("xi"), py::arg("visits"));
  m.def("learning_rate", &learning_rate, py::arg("horizon"), py::arg("visits"));

  py::class_<Environment>(m, "Environment")
      .def("reset", [](Environment& env, Rng& rng) { return from_state(env.reset(rng)); },
           py::arg("rng"))
      .def(
          "step_continuous",
          [](Environment& env, double a) {
            const StepOutcome out = env.step(Action::continuous(a));
            return py::make_tuple(from_state(out.observation), out.reward, out.done);
          },
          py::arg("action"))
      .def(
          "step_categorical",
          [](Environment& env, int index) {
            const StepOutcome out = env.step(Action::categorical(index));
            return py::make_tuple(from_state(out.observation), out.reward, out.done);
          },
          py::arg("index"))
      .def_property_readonly("state_dims",
                             [](const Environment& env) { return env.space().state_dims(); })
      .def_property_readonly("continuous_actions", [](const Environment& env) {
        return env.space().action_kind() == ActionKind::kContinuous;
      });
  m.def("make_environment",
        [](const std::string& name) { return make_environment(env_from_name(name)); },
        py::arg("name"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_property(
          "env", [](const RunConfig& c) { return to_string(c.env); },
          [](RunConfig& c, const std::string& name) { c.env = env_from_name(name); })
      .def_property(
          "algo", [](const RunConfig& c) { return to_string(c.algo); },
          [](RunConfig& c, const std::string& name) { c.algo = algo_from_name(name); })
      .def_readwrite("xi", &RunConfig::xi)
      .def_readwrite("iterations", &RunConfig::iterations)
      .def_readwrite("eval_rollouts", &RunConfig::eval_rollouts)
      .def_readwrite("n_agents", &RunConfig::n_agents)
      .def_readwrite("base_seed", &RunConfig::base_seed)
      .def_readwrite("tau_min", &RunConfig::tau_min)
      .def_readwrite("u", &RunConfig::u)
      .def_readwrite("d", &RunConfig::d)
      .def_readwrite("lambda_", &RunConfig::lambda)
      .def_readwrite("split_reset_at", &RunConfig::split_reset_at)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("capture_policies", &RunConfig::capture_policies);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("samples", &IterationRecord::samples)
      .def_readonly("eval_mean", &IterationRecord::eval_mean)
      .def_readonly("arms", &IterationRecord::arms);

  py::class_<AgentOutcome>(m, "AgentOutcome")
      .def_readonly("seed", &AgentOutcome::seed)
      .def_readonly("curve", &AgentOutcome::curve)
      .def_readonly("final_eval", &AgentOutcome::final_eval)
      .def_readonly("final_arms", &AgentOutcome::final_arms)
      .def_readonly("final_returns", &AgentOutcome::final_returns);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("agents", &RunResult::agents)
      .def_readonly("aggregate_mean", &RunResult::aggregate_mean)
      .def_property_readonly("ci95",
                             [](const RunResult& r) { return py::make_tuple(r.ci.low, r.ci.high); })
      .def("final_means", &RunResult::final_means);

  m.def("train_run", &train_run, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_single_agent", &run_single_agent, py::arg("config"), py::arg("agent_index"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "ci95",
      [](const std::vector<double>& xs) {
        const ConfidenceInterval ci = ci95(std::span<const double>(xs));
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("samples"));
  m.def(
      "welch_test",
      [](const std::vector<double>& a, const std::vector<double>& b, bool one_sided) {
        const WelchResult r = welch_test(std::span<const double>(a), std::span<const double>(b),
                                         one_sided ? Sided::kOne : Sided::kTwo);
        return py::make_tuple(r.t, r.dof, r.p);
      },
      py::arg("a"), py::arg("b"), py::arg("one_sided") = false);
  m.def(
      "solved_check",
      [](const std::vector<double>& returns) {
        return solved_check(std::span<const double>(returns));
      },
      py::arg("returns"));

  py::class_<PolicyTable>(m, "PolicyTable")
      .def_property_readonly("n_rows",
                             [](const PolicyTable& t) { return t.rows.size(); })
      .def(
          "greedy_row",
          [](const PolicyTable& t, const std::vector<double>& state) {
            return t.greedy_row(to_state(state).span());
          },
          py::arg("state"))
      .def("to_tsv", &policy_table_to_tsv);

  py::class_<AgentSnapshot>(m, "AgentSnapshot")
      .def_property_readonly("env", [](const AgentSnapshot& s) { return to_string(s.env); })
      .def_property_readonly("algo", [](const AgentSnapshot& s) { return to_string(s.algo); })
      .def_readonly("xi", &AgentSnapshot::xi)
      .def_readonly("seed", &AgentSnapshot::seed)
      .def_readonly("horizon", &AgentSnapshot::horizon)
      .def_readonly("table", &AgentSnapshot::table);

  m.def("load_agent", &load_agent_file, py::arg("path"));
  m.def(
      "evaluate_table",
      [](const AgentSnapshot& snap, int n_rollouts, std::uint64_t seed) {
        auto env = make_environment(snap.env);
        Rng rng(seed);
        const EvalResult ev = table_evaluate(snap.table, *env, n_rollouts, rng, snap.horizon);
        return py::make_tuple(ev.mean, ev.returns);
      },
      py::arg("snapshot"), py::arg("n_rollouts"), py::arg("seed"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
