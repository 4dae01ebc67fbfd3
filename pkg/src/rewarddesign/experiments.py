"""Sweep driver for expressivity fractions and the grid-world learning experiment.

Emits CSV only; plotting lives in a separate package so this suite never
needs a graphics stack.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .design import design_soap
from .errors import InvalidIndex
from .mdp import GridWorld
from .qlearn import LearningConfig, q_learning_run
from .samplers import SamplerConfig, sample_cmp, sample_cmp_with_entropy, sample_soap, sample_soap_spread
from .tasks import EQUAL, RANGE, Soap
from .tolerances import DEFAULT, Tolerances

SWEEP_PARAMETERS = ("n_actions", "n_states", "gamma", "soap_size", "entropy", "spread")

DEFAULT_GRIDS: Dict[str, Tuple[float, ...]] = {
    "n_actions": (2, 3, 4, 5, 6),
    "n_states": (2, 3, 4, 5, 6),
    "gamma": (0.1, 0.3, 0.5, 0.7, 0.9, 0.99),
    "soap_size": (1, 2, 3, 4, 5, 6, 7, 8, 9, 10),
    "entropy": (0.0, 0.5, 1.0, 1.5, 2.0),
    "spread": (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
}

SWEEP_COLUMNS = ("param", "value", "mode", "n", "fraction", "ci_low", "ci_high", "seed")
LEARNING_COLUMNS = ("series", "run", "episode", "metric")


@dataclass(frozen=True)
class SweepSpec:
    varied_parameter: str
    grid: Tuple[float, ...]
    samples_per_point: int = 200
    base: SamplerConfig = field(default_factory=SamplerConfig)
    rmax: float = 1.0
    wilson_ci: bool = False

    def __post_init__(self):
        if self.varied_parameter not in SWEEP_PARAMETERS:
            raise InvalidIndex(
                f"varied parameter must be one of {SWEEP_PARAMETERS}, got {self.varied_parameter!r}"
            )
        if not self.grid:
            raise InvalidIndex("grid must be non-empty")
        if self.samples_per_point < 1:
            raise InvalidIndex("samples_per_point must be >= 1")
        object.__setattr__(self, "grid", tuple(self.grid))


@dataclass(frozen=True)
class SweepPoint:
    param: str
    value: float
    # per-sample design outcomes, aligned across modes
    equal_found: Tuple[bool, ...]
    range_found: Tuple[bool, ...]


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: Tuple[SweepPoint, ...]

    def rows(self) -> List[dict]:
        out = []
        for pt in self.points:
            for mode, found in ((EQUAL, pt.equal_found), (RANGE, pt.range_found)):
                n = len(found)
                frac = sum(found) / n
                lo, hi = binomial_ci(sum(found), n, wilson=self.spec.wilson_ci)
                out.append({
                    "param": pt.param, "value": pt.value, "mode": mode, "n": n,
                    "fraction": frac, "ci_low": lo, "ci_high": hi,
                    "seed": self.spec.base.seed,
                })
        return out


def binomial_ci(successes: int, n: int, confidence: float = 0.95, wilson: bool = False) -> Tuple[float, float]:
    """95% interval for a fraction; normal approximation by default, Wilson on request."""
    z = 1.959963984540054  # two-sided 95%
    p = successes / n
    if wilson:
        denom = 1.0 + z * z / n
        center = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        return max(0.0, center - half), min(1.0, center + half)
    half = z * math.sqrt(p * (1 - p) / n)
    return max(0.0, p - half), min(1.0, p + half)


def _derive_seed(base_seed: int, sample_index: int) -> int:
    # CMP seeds depend only on (base seed, sample index), never on the varied
    # parameter, so every sweep point sees the same environments up to the
    # deviation being studied.
    return int(np.random.SeedSequence([base_seed, sample_index]).generate_state(1)[0])


def _sample_point(spec: SweepSpec, value, sample_index: int):
    cfg = dataclasses.replace(spec.base, seed=_derive_seed(spec.base.seed, sample_index))
    param = spec.varied_parameter
    if param == "n_actions":
        cfg = dataclasses.replace(cfg, n_actions=int(value))
    elif param == "n_states":
        cfg = dataclasses.replace(cfg, n_states=int(value))
    elif param == "gamma":
        cfg = dataclasses.replace(cfg, gamma=float(value))
    elif param == "soap_size":
        cfg = dataclasses.replace(cfg, soap_size=int(value))
    elif param == "spread":
        cfg = dataclasses.replace(cfg, spread_theta=float(value))
    if cfg.soap_size is None:
        cfg = dataclasses.replace(cfg, soap_size=2)

    if param == "entropy":
        cmp_ = sample_cmp_with_entropy(cfg, float(value))
    else:
        cmp_ = sample_cmp(cfg)
    if param == "spread":
        soap = sample_soap_spread(cfg, cmp_)
    else:
        soap = sample_soap(cfg, cmp_)
    return cmp_, soap


def run_expressivity_sweep(spec: SweepSpec, tol: Tolerances = DEFAULT) -> SweepResult:
    """Fraction of sampled SOAPs realizable per grid value, in both modes.

    Each sampled task is designed under both the equal and the range
    criterion so the two fractions are comparable pointwise.
    """
    points = []
    for value in spec.grid:
        eq_found, rg_found = [], []
        for i in range(spec.samples_per_point):
            cmp_, soap = _sample_point(spec, value, i)
            eq = design_soap(cmp_, Soap(soap.good_policies, EQUAL), spec.rmax, tol)
            rg = design_soap(cmp_, Soap(soap.good_policies, RANGE), spec.rmax, tol)
            eq_found.append(eq.found)
            rg_found.append(rg.found)
        points.append(SweepPoint(spec.varied_parameter, value, tuple(eq_found), tuple(rg_found)))
    return SweepResult(spec, tuple(points))


def write_sweep_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in result.rows():
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Learning experiment (grid world, designed vs goal reward)


def cautious_grid_soap(grid: GridWorld) -> Soap:
    """The two-policy fire-averse acceptable set for the learning experiment.

    Both members walk the left column up and the top row right toward the
    goal.  In the two fire-adjacent cells they take the single action whose
    intended and slipped effects all avoid the fire, relying on slip to make
    progress.  They differ only in the cell right of the start, where either
    bouncing off the wall or stepping back left is acceptable.  Every
    non-terminal cell is reachable under both members (slip wanders), so the
    one-flip fringe is separable everywhere it needs to be.
    """
    c2s = grid.cell_to_state
    base = {
        (0, 0): 0, (1, 0): 0,              # left column: up
        (2, 0): 1, (2, 1): 1, (2, 2): 1,   # top row: right, into the goal
        (0, 2): 0,                         # up toward the safe corridor
        (1, 2): 3,                         # left of fire: only safe action
        (0, 3): 2,                         # below fire: only safe action
        (1, 3): 0, (2, 3): 0,              # terminals, action irrelevant
    }
    members = []
    for alt in (0, 3):  # at (0, 1): bounce off the wall, or head back left
        actions = [0] * grid.cmp.n_states
        for cell, a in base.items():
            actions[c2s[cell]] = a
        actions[c2s[(0, 1)]] = alt
        members.append(tuple(actions))
    return Soap(tuple(members), EQUAL)


@dataclass(frozen=True)
class LearningCurves:
    designed: np.ndarray  # (runs, episodes)
    goal: np.ndarray      # (runs, episodes)

    def rows(self) -> List[dict]:
        out = []
        for series, data in (("designed", self.designed), ("goal", self.goal)):
            for run in range(data.shape[0]):
                for ep in range(data.shape[1]):
                    out.append({"series": series, "run": run, "episode": ep,
                                "metric": data[run, ep]})
        return out

    def episode_mean_ci(self, series: str) -> Tuple[np.ndarray, np.ndarray]:
        data = self.designed if series == "designed" else self.goal
        mean = data.mean(axis=0)
        half = 1.959963984540054 * data.std(axis=0, ddof=1) / math.sqrt(data.shape[0])
        return mean, half


def run_learning_experiment(runs: int, config: LearningConfig, grid: GridWorld,
                            soap: Soap, designed_reward: np.ndarray) -> LearningCurves:
    """Per-episode SOAP-match curves under the designed and the goal reward."""
    goal_reward = grid.goal_reward()
    designed = np.zeros((runs, config.episodes))
    goal = np.zeros((runs, config.episodes))
    for run in range(runs):
        cfg = dataclasses.replace(config, seed=_derive_seed(config.seed, run))
        designed[run] = q_learning_run(grid.cmp, designed_reward, cfg, soap).metrics
        goal[run] = q_learning_run(grid.cmp, goal_reward, cfg, soap).metrics
    return LearningCurves(designed, goal)


def write_learning_csv(curves: LearningCurves, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=LEARNING_COLUMNS)
        writer.writeheader()
        for row in curves.rows():
            writer.writerow(row)
