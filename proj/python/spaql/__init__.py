"""Adaptive-partition Q-learning benchmark harness (python surface).

Thin re-export of the compiled core: environments, training runs, statistics,
and policy-table inspection. See the project README for the CLI front end.
"""

from spaql._core import (
    AgentOutcome,
    AgentSnapshot,
    Environment,
    IterationRecord,
    PolicyTable,
    Rng,
    RunConfig,
    RunResult,
    ci95,
    evaluate_table,
    learning_rate,
    load_agent,
    make_environment,
    normalize_angle,
    run_cli,
    run_single_agent,
    solved_check,
    squash,
    state_distance,
    theoretical_xi,
    train_run,
    ucb_bonus,
    welch_test,
)

__all__ = [
    "AgentOutcome",
    "AgentSnapshot",
    "Environment",
    "IterationRecord",
    "PolicyTable",
    "Rng",
    "RunConfig",
    "RunResult",
    "ci95",
    "evaluate_table",
    "learning_rate",
    "load_agent",
    "make_environment",
    "normalize_angle",
    "run_cli",
    "run_single_agent",
    "solved_check",
    "squash",
    "state_distance",
    "theoretical_xi",
    "train_run",
    "ucb_bonus",
    "welch_test",
]
