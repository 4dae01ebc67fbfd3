"""Tabular Q-learning with epsilon-greedy exploration and the SOAP-match metric.

Episodes reset to the start state and end early on entering a terminal
state; the update target drops the bootstrap term there.  Q starts at zero
(configurable) since optimistic initialization would change early curves.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySoap, InvalidIndex
from .mdp import Cmp, Policy
from .policies import reachable_states
from .tasks import Soap


@dataclass(frozen=True)
class LearningConfig:
    epsilon: float = 0.2
    alpha: float = 0.1
    episodes: int = 250
    steps_per_episode: int = 10
    seed: int = 0
    q_init: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 1.0) or not (0.0 <= self.alpha <= 1.0):
            raise InvalidIndex("epsilon and alpha must be in [0, 1]")
        if self.episodes <= 0 or self.steps_per_episode <= 0:
            raise InvalidIndex("episode counts must be positive")


def greedy_policy(q: np.ndarray) -> Policy:
    return tuple(int(a) for a in q.argmax(axis=1))


def soap_policy_match(cmp: Cmp, greedy: Policy, soap: Soap) -> float:
    """Best agreement with any SOAP member over the greedy-reachable states.

    1.0 iff the greedy policy coincides with some acceptable policy on every
    state it can reach; actions at unreachable states never matter.
    """
    if not soap.good_policies:
        raise EmptySoap("metric needs a non-empty SOAP")
    reach = sorted(s for s in reachable_states(cmp, greedy) if not cmp.terminal_mask[s])
    if not reach:
        return 1.0  # no decisions before termination, nothing to disagree on
    best = 0.0
    for member in soap.good_policies:
        agree = sum(1 for s in reach if greedy[s] == member[s])
        best = max(best, agree / len(reach))
    return best


@dataclass
class RunResult:
    q: np.ndarray
    metrics: Optional[np.ndarray]  # per-episode SOAP match, when requested


def q_learning_run(cmp: Cmp, reward: np.ndarray, config: LearningConfig,
                   metric_soap: Optional[Soap] = None) -> RunResult:
    """One seeded Q-learning run; returns the final table and metric series."""
    r = np.asarray(reward, dtype=float)
    if r.shape != (cmp.n_states, cmp.n_actions):
        raise InvalidIndex(f"reward shape {r.shape} mismatch")
    rng = np.random.default_rng(config.seed)
    q = np.full((cmp.n_states, cmp.n_actions), config.q_init, dtype=float)
    metrics = np.zeros(config.episodes) if metric_soap is not None else None
    for episode in range(config.episodes):
        s = cmp.start_state
        for _ in range(config.steps_per_episode):
            if cmp.terminal_mask[s]:
                break
            if rng.random() < config.epsilon:
                a = int(rng.integers(0, cmp.n_actions))
            else:
                a = int(q[s].argmax())
            s2 = int(rng.choice(cmp.n_states, p=cmp.transition[s, a]))
            target = r[s, a]
            if not cmp.terminal_mask[s2]:
                target += cmp.gamma * q[s2].max()
            q[s, a] += config.alpha * (target - q[s, a])
            if cmp.terminal_mask[s2]:
                s = s2
                break
            s = s2
        if metrics is not None:
            metrics[episode] = soap_policy_match(cmp, greedy_policy(q), metric_soap)
    return RunResult(q, metrics)
