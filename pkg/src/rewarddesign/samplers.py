"""Seeded random generation of CMPs and SOAPs for the expressivity experiments.

Every sampler derives its generator from (config.seed, substream id) through
numpy's SeedSequence, so results are reproducible regardless of call order
or parallel scheduling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EntropyOutOfRange, InvalidIndex, InvalidProbability
from .mdp import Cmp
from .policies import policy_count, policy_from_index
from .tasks import EQUAL, Soap

# substream ids
_STREAM_TRANSITION = 0
_STREAM_SOAP = 1
_STREAM_ENTROPY = 2
_STREAM_SPREAD = 3


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    n_states: int = 4
    n_actions: int = 3
    gamma: float = 0.95
    dirichlet_alpha: Optional[float] = None  # default 1/n_states
    entropy_target: Optional[float] = None   # bits
    soap_size: Optional[int] = None
    spread_theta: Optional[float] = None
    soap_mode: str = EQUAL
    spread_shared_action: bool = False

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(stream,)))


def sample_cmp(config: SamplerConfig) -> Cmp:
    """Transition rows drawn i.i.d. Dirichlet(alpha), alpha defaulting to 1/|S|."""
    rng = config.rng(_STREAM_TRANSITION)
    n, a = config.n_states, config.n_actions
    alpha = config.dirichlet_alpha if config.dirichlet_alpha is not None else 1.0 / n
    t = rng.dirichlet(np.full(n, alpha), size=(n, a))
    return Cmp(n, a, t, config.gamma, 0)


def _softmax_row(n: int, designated: int, beta: float) -> np.ndarray:
    row = np.full(n, 1.0)
    row[designated] = math.exp(min(beta, 700.0))
    return row / row.sum()


def _row_entropy_bits(row: np.ndarray) -> float:
    nz = row[row > 0]
    return float(-(nz * np.log2(nz)).sum())


def sample_cmp_with_entropy(config: SamplerConfig, target_entropy_bits: float) -> Cmp:
    """Interpolate each row between deterministic and uniform to hit a target entropy.

    Per (s, a): pick a designated next state uniformly, then put softmax
    mass on it at an inverse temperature found by bisection so the row's
    Shannon entropy matches the target within 1e-6 bits.
    """
    n, a = config.n_states, config.n_actions
    max_bits = math.log2(n)
    if not (0.0 <= target_entropy_bits <= max_bits + 1e-12):
        raise EntropyOutOfRange(
            f"target {target_entropy_bits} bits outside [0, {max_bits}] for {n} states"
        )
    rng = config.rng(_STREAM_ENTROPY)
    designated = rng.integers(0, n, size=(n, a))
    t = np.zeros((n, a, n))
    for s in range(n):
        for act in range(a):
            j = int(designated[s, act])
            if target_entropy_bits <= 1e-12 or n == 1:
                t[s, act, j] = 1.0
                continue
            if abs(target_entropy_bits - max_bits) <= 1e-12:
                t[s, act, :] = 1.0 / n
                continue
            lo, hi = 0.0, 700.0  # entropy decreases in beta
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if _row_entropy_bits(_softmax_row(n, j, mid)) > target_entropy_bits:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-13:
                    break
            t[s, act, :] = _softmax_row(n, j, 0.5 * (lo + hi))
    return Cmp(n, a, t, config.gamma, 0)


def sample_soap(config: SamplerConfig, cmp: Cmp) -> Soap:
    """Uniform SOAP: size from config (or uniform in [1, |Pi|]), members distinct."""
    rng = config.rng(_STREAM_SOAP)
    total = policy_count(cmp)
    size = config.soap_size
    if size is None:
        size = int(rng.integers(1, total + 1))
    if not (1 <= size <= total):
        raise InvalidIndex(f"SOAP size {size} outside [1, {total}]")
    indices = rng.choice(total, size=size, replace=False)
    return Soap(tuple(policy_from_index(cmp, int(i)) for i in sorted(indices)), config.soap_mode)


def sample_soap_spread(config: SamplerConfig, cmp: Cmp, max_retries: int = 50) -> Soap:
    """Reference policy plus coin-flip perturbations controlling the SOAP's spread.

    Each extra member copies the reference and, per state, replaces the
    action with a uniformly random one with probability theta.  With the
    shared-action flag one replacement action is drawn per member and used
    at every flipped state.  Collisions are resampled up to a retry cap,
    then a smaller set is accepted.
    """
    theta = config.spread_theta
    if theta is None or not (0.0 <= theta <= 1.0):
        raise InvalidProbability(f"spread theta must be in [0, 1], got {theta}")
    if config.soap_size is None or config.soap_size < 1:
        raise InvalidIndex("spread sampling requires soap_size >= 1")
    rng = config.rng(_STREAM_SPREAD)
    ref = tuple(int(x) for x in rng.integers(0, cmp.n_actions, size=cmp.n_states))
    members = {ref}
    for _ in range(config.soap_size - 1):
        for _ in range(max_retries):
            member = perturb_policy(ref, theta, cmp.n_actions, rng, config.spread_shared_action)
            if member not in members:
                members.add(member)
                break
    ordered = [ref] + sorted(members - {ref})
    return Soap(tuple(ordered), config.soap_mode)


def perturb_policy(ref, theta: float, n_actions: int, rng: np.random.Generator,
                   shared_action: bool = False):
    """One coin flip per state; on heads the action is redrawn uniformly."""
    shared = int(rng.integers(0, n_actions)) if shared_action else None
    member = list(ref)
    for s in range(len(ref)):
        if rng.random() < theta:
            member[s] = shared if shared is not None else int(rng.integers(0, n_actions))
    return tuple(member)
