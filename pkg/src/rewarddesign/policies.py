"""Exact policy machinery: enumeration, discounted visitation, evaluation, fringe."""
from __future__ import annotations

import itertools
from typing import Iterable, List, Sequence, Set, Tuple

import numpy as np

from .errors import EmptySoap, InvalidIndex, PolicySpaceTooLarge, SingularSystem
from .mdp import Cmp, Policy, validate_policy

DEFAULT_POLICY_CAP = 10**6


def policy_count(cmp: Cmp) -> int:
    return cmp.n_actions ** cmp.n_states


def enumerate_policies(cmp: Cmp, cap: int = DEFAULT_POLICY_CAP) -> List[Policy]:
    """All deterministic policies in lexicographic order of action vectors."""
    count = policy_count(cmp)
    if count > cap:
        raise PolicySpaceTooLarge(count, cap)
    return [p for p in itertools.product(range(cmp.n_actions), repeat=cmp.n_states)]


def policy_from_index(cmp: Cmp, index: int) -> Policy:
    """Policy at the given lexicographic position."""
    if not (0 <= index < policy_count(cmp)):
        raise InvalidIndex(f"policy index {index} out of range")
    digits = []
    for _ in range(cmp.n_states):
        digits.append(index % cmp.n_actions)
        index //= cmp.n_actions
    return tuple(reversed(digits))


def transition_matrix(cmp: Cmp, policy: Policy) -> np.ndarray:
    """P[s, s'] = T[s, policy(s), s']."""
    idx = np.arange(cmp.n_states)
    return cmp.transition[idx, np.asarray(policy, dtype=int), :]


def compute_visitation(cmp: Cmp, policy: Policy) -> np.ndarray:
    """Discounted expected (s, a) visitation from the start state, flat length S*A.

    Solves (I - gamma * P^T) v = e_{s0} exactly with a dense solve, then
    scatters v(s) onto the (s, policy(s)) coordinates.  Terminal states get
    zero visitation: the agent takes no action there, so no reward accrues
    after termination (matching the episodic view a learner sees).
    """
    validate_policy(cmp, policy)
    p = transition_matrix(cmp, policy)
    n = cmp.n_states
    e0 = np.zeros(n)
    e0[cmp.start_state] = 1.0
    try:
        v = np.linalg.solve(np.eye(n) - cmp.gamma * p.T, e0)
    except np.linalg.LinAlgError as exc:  # cannot happen for gamma < 1, stochastic P
        raise SingularSystem(str(exc)) from exc
    v[cmp.terminal_mask] = 0.0
    rho = np.zeros((n, cmp.n_actions))
    rho[np.arange(n), np.asarray(policy, dtype=int)] = v
    return rho.ravel()


def start_value(cmp: Cmp, reward: np.ndarray, policy: Policy) -> float:
    """V^pi(s0) = rho_pi . R."""
    r = np.asarray(reward, dtype=float)
    if r.shape != (cmp.n_states, cmp.n_actions):
        raise InvalidIndex(f"reward shape {r.shape} mismatch")
    return float(compute_visitation(cmp, policy) @ r.ravel())


def evaluate_policy(cmp: Cmp, reward: np.ndarray, policy: Policy) -> np.ndarray:
    """All-state values via (I - gamma * P) V = R_pi; oracle route for tests.

    Terminal states earn nothing, consistently with compute_visitation.
    """
    r = np.asarray(reward, dtype=float)
    r_pi = r[np.arange(cmp.n_states), np.asarray(policy, dtype=int)]
    r_pi = np.where(cmp.terminal_mask, 0.0, r_pi)
    p = transition_matrix(cmp, policy)
    return np.linalg.solve(np.eye(cmp.n_states) - cmp.gamma * p, r_pi)


def canonical_policies(cmp: Cmp, cap: int = DEFAULT_POLICY_CAP) -> List[Policy]:
    """One representative per terminal-equivalence class, lexicographic order."""
    ranges = [range(1) if cmp.terminal_mask[s] else range(cmp.n_actions)
              for s in range(cmp.n_states)]
    count = 1
    for r in ranges:
        count *= len(r)
    if count > cap:
        raise PolicySpaceTooLarge(count, cap)
    return [p for p in itertools.product(*ranges)]


def canonical_policy(cmp: Cmp, policy: Policy) -> Policy:
    """Zero out the action at terminal states, where the choice is irrelevant.

    Terminal states absorb regardless of action, so policies differing only
    there are indistinguishable by value; this picks one representative.
    """
    return tuple(0 if cmp.terminal_mask[s] else int(a) for s, a in enumerate(policy))


def compute_fringe(cmp: Cmp, soap: Iterable[Policy]) -> Set[Policy]:
    """Policies outside the set at Hamming distance exactly one from a member.

    Flips happen only at non-terminal states, and membership is judged up to
    terminal-state actions: a neighbor that matches some member everywhere
    except at terminals is inside the set, not on its fringe.
    """
    good = set(tuple(p) for p in soap)
    if not good:
        raise EmptySoap("acceptable policy set must be non-empty")
    canon_good = {canonical_policy(cmp, p) for p in good}
    fringe: Set[Policy] = set()
    for pol in good:
        validate_policy(cmp, pol)
        pol = canonical_policy(cmp, pol)
        for s in range(cmp.n_states):
            if cmp.terminal_mask[s]:
                continue
            for a in range(cmp.n_actions):
                if a == pol[s]:
                    continue
                neighbor = pol[:s] + (a,) + pol[s + 1:]
                if neighbor not in canon_good:
                    fringe.add(neighbor)
    return fringe


def trajectory_weights(cmp: Cmp, trajectory: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Discounted indicator vector w with G(tau; s0) = w . R, flat length S*A."""
    if len(trajectory) == 0:
        raise InvalidIndex("trajectory must be non-empty")
    w = np.zeros(cmp.n_states * cmp.n_actions)
    for i, (s, a) in enumerate(trajectory):
        if not (0 <= s < cmp.n_states and 0 <= a < cmp.n_actions):
            raise InvalidIndex(f"trajectory step {i} has out-of-range pair ({s}, {a})")
        w[s * cmp.n_actions + a] += cmp.gamma ** i
    return w


def trajectory_return(reward: np.ndarray, trajectory: Sequence[Tuple[int, int]], gamma: float) -> float:
    """N-step discounted return of a fixed (s, a) trajectory."""
    if len(trajectory) == 0:
        raise InvalidIndex("trajectory must be non-empty")
    r = np.asarray(reward, dtype=float)
    total = 0.0
    for i, (s, a) in enumerate(trajectory):
        if not (0 <= s < r.shape[0] and 0 <= a < r.shape[1]):
            raise InvalidIndex(f"trajectory step {i} has out-of-range pair ({s}, {a})")
        total += gamma ** i * r[s, a]
    return total


def reachable_states(cmp: Cmp, policy: Policy) -> Set[int]:
    """States reachable from s0 with nonzero probability under the policy."""
    seen = {cmp.start_state}
    frontier = [cmp.start_state]
    while frontier:
        s = frontier.pop()
        for s2 in np.flatnonzero(cmp.transition[s, policy[s]] > 0.0):
            if int(s2) not in seen:
                seen.add(int(s2))
                frontier.append(int(s2))
    return seen
