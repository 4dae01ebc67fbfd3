"""Command-line entry point: design, verify, decide, sweep, learn, fixture.

Exit codes: 0 success/found/realized, 3 correctly-determined negative
(unrealizable / violated / not expressible), 2 usage error, 1 internal
error.  Code 3 lets shell pipelines branch on the negative outcome.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .design import decide_expressible, design
from .errors import RewardDesignError
from .experiments import (
    DEFAULT_GRIDS,
    SWEEP_PARAMETERS,
    SweepSpec,
    cautious_grid_soap,
    run_expressivity_sweep,
    run_learning_experiment,
    write_learning_csv,
    write_sweep_csv,
)
from .mdp import (
    BUILTIN_ENVS,
    builtin_cmp,
    cmp_from_json,
    cmp_to_json,
    make_russell_norvig_grid,
    make_xor_cmp,
)
from .qlearn import LearningConfig
from .samplers import SamplerConfig
from .tasks import (
    EQUAL,
    LESS_THAN,
    RANGE,
    PolicyOrder,
    Soap,
    TrajectoryOrder,
    task_from_json,
    task_to_json,
    verify_po,
    verify_soap,
    verify_to,
)
from .tolerances import DEFAULT

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NEGATIVE = 3


def _load_env(spec: str):
    if spec.startswith("builtin:"):
        return builtin_cmp(spec.split(":", 1)[1])
    return cmp_from_json(Path(spec).read_text())


def _load_task(path: str):
    return task_from_json(Path(path).read_text())


def _load_reward(path: str, cmp) -> np.ndarray:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc["reward"]
    reward = np.asarray(doc, dtype=float)
    if reward.shape != (cmp.n_states, cmp.n_actions):
        raise RewardDesignError(
            f"reward shape {reward.shape} does not match environment "
            f"({cmp.n_states}, {cmp.n_actions})"
        )
    return reward


def _fixture_tasks():
    xor = make_xor_cmp()
    gamma = xor.gamma
    pi = lambda *a: tuple(a)  # noqa: E731
    xor_good = (pi(0, 1), pi(1, 0))
    xor_bad = (pi(0, 0), pi(1, 1))
    to_good = (((0, 0), (1, 1)), ((0, 1), (1, 0)))
    to_bad = (((0, 0), (1, 0)), ((0, 1), (1, 1)))
    return {
        "xor-soap-equal": Soap(xor_good, EQUAL),
        "xor-soap-range": Soap(xor_good, RANGE),
        "steady-soap": Soap((pi(1, 0),), EQUAL),
        "entail-soap-equal": Soap((pi(0, 0), pi(1, 0), pi(0, 1)), EQUAL),
        "entail-soap-range": Soap((pi(0, 0), pi(1, 0), pi(0, 1)), RANGE),
        "xor-po": PolicyOrder(tuple(
            (b, LESS_THAN, g) for g in xor_good for b in xor_bad
        )),
        "xor-to": TrajectoryOrder(2, tuple(
            (b, LESS_THAN, g) for g in to_good for b in to_bad
        )),
        "nonclosed-soap": Soap((pi(0, 0, 1), pi(1, 0, 1)), EQUAL),
        "grid-cautious-soap": cautious_grid_soap(make_russell_norvig_grid()),
    }


def cmd_design(args) -> int:
    cmp = _load_env(args.env)
    task = _load_task(args.task)
    outcome = design(cmp, task, rmax=args.rmax, dump_path=args.dump_lp,
                     state_only=args.state_only)
    doc = {"status": outcome.status, "epsilon": outcome.epsilon}
    if outcome.found:
        doc["reward"] = outcome.reward.tolist()
    print(json.dumps(doc))
    return EXIT_OK if outcome.found else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    cmp = _load_env(args.env)
    task = _load_task(args.task)
    reward = _load_reward(args.reward, cmp)
    if isinstance(task, Soap):
        result = verify_soap(cmp, reward, task)
    elif isinstance(task, PolicyOrder):
        result = verify_po(cmp, reward, task)
    else:
        result = verify_to(cmp, reward, task)
    doc = {"status": "realized" if result.realized else "violated"}
    if result.witness is not None:
        left, lv, rel, right, rv = result.witness
        doc["witness"] = {"left": left, "left_value": lv, "relation": rel,
                          "right": right, "right_value": rv}
    print(json.dumps(doc, default=list))
    return EXIT_OK if result.realized else EXIT_NEGATIVE


def cmd_decide(args) -> int:
    cmp = _load_env(args.env)
    task = _load_task(args.task)
    expressible = decide_expressible(cmp, task, rmax=args.rmax,
                                     state_only=args.state_only)
    print(json.dumps({"expressible": expressible}))
    return EXIT_OK if expressible else EXIT_NEGATIVE


def cmd_sweep(args) -> int:
    grid = tuple(float(v) for v in args.grid.split(",")) if args.grid \
        else DEFAULT_GRIDS[args.vary]
    spec = SweepSpec(
        varied_parameter=args.vary,
        grid=grid,
        samples_per_point=args.samples,
        base=SamplerConfig(seed=args.seed),
        rmax=args.rmax,
        wilson_ci=args.wilson,
    )
    result = run_expressivity_sweep(spec)
    write_sweep_csv(result, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_learn(args) -> int:
    if not args.env.startswith("builtin:grid"):
        print("learn currently supports --env builtin:grid", file=sys.stderr)
        return EXIT_USAGE
    grid = make_russell_norvig_grid(slip=args.slip)
    soap = _load_task(args.task) if args.task else cautious_grid_soap(grid)
    if not isinstance(soap, Soap):
        print("--task for learn must be a SOAP", file=sys.stderr)
        return EXIT_USAGE
    config = LearningConfig(epsilon=args.epsilon, alpha=args.alpha,
                            episodes=args.episodes, seed=args.seed)
    if args.reward == "builtin:goal":
        designed = grid.goal_reward()
    else:
        designed = _load_reward(args.reward, grid.cmp)
    curves = run_learning_experiment(args.runs, config, grid, soap, designed)
    write_learning_csv(curves, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_fixture(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = _fixture_tasks()
    written = []
    if args.name == "all":
        names = sorted(tasks) + [f"env-{n}" for n in BUILTIN_ENVS]
    else:
        names = [args.name]
    for name in names:
        if name.startswith("env-"):
            text = cmp_to_json(builtin_cmp(name[4:]))
        elif name in tasks:
            text = task_to_json(tasks[name])
        else:
            print(f"unknown fixture {name!r}; tasks: {sorted(tasks)}, "
                  f"envs: {['env-' + n for n in BUILTIN_ENVS]}, or 'all'",
                  file=sys.stderr)
            return EXIT_USAGE
        path = out_dir / f"{name}.json"
        path.write_text(text + "\n")
        written.append(str(path))
    print(json.dumps({"written": written}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewarddesign",
        description="Construct Markov reward functions realizing policy/trajectory tasks.",
    )
    parser.add_argument("--version", action="version",
                        version=f"rewarddesign {__version__} tolerances={DEFAULT}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_env_task(p):
        p.add_argument("--env", required=True,
                       help="environment JSON path or builtin:<xor|steady|grid|nonclosed-x|nonclosed-y>")
        p.add_argument("--task", required=True, help="task JSON path")

    p = sub.add_parser("design", help="construct a realizing reward or report unrealizable")
    add_env_task(p)
    p.add_argument("--rmax", type=float, default=1.0)
    p.add_argument("--state-only", action="store_true",
                   help="restrict to rewards constant across actions")
    p.add_argument("--dump-lp", default=None, help="write the LP in plain text to this path")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("verify", help="check a reward against a task by exhaustive evaluation")
    add_env_task(p)
    p.add_argument("--reward", required=True, help="reward JSON path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decide", help="decide expressibility without emitting the reward")
    add_env_task(p)
    p.add_argument("--rmax", type=float, default=1.0)
    p.add_argument("--state-only", action="store_true",
                   help="restrict to rewards constant across actions")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("sweep", help="expressivity fractions over a parameter grid")
    p.add_argument("--vary", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--grid", default=None, help="comma-separated values; defaults per parameter")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rmax", type=float, default=1.0)
    p.add_argument("--wilson", action="store_true", help="Wilson confidence intervals")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("learn", help="Q-learning SOAP-match curves, designed vs goal reward")
    p.add_argument("--env", default="builtin:grid")
    p.add_argument("--reward", required=True, help="designed reward JSON or builtin:goal")
    p.add_argument("--task", default=None, help="metric SOAP JSON (default: built-in cautious SOAP)")
    p.add_argument("--episodes", type=int, default=250)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--slip", type=float, default=0.35)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("fixture", help="write built-in environment/task JSON files")
    p.add_argument("name", help="fixture name or 'all'")
    p.add_argument("--out-dir", default="fixtures")
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except RewardDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())
