"""Task types (SOAP, policy order, trajectory order) and exhaustive realization verifiers.

Verifiers are the ground truth the LP designers are tested against: they
evaluate start-state values (or trajectory returns) directly and check the
order constraints, returning a concrete witness on violation.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import EmptySoap, InconsistentOrder, InvalidIndex
from .mdp import Cmp, Policy, validate_policy
from .policies import (
    DEFAULT_POLICY_CAP,
    canonical_policies,
    canonical_policy,
    compute_visitation,
    trajectory_return,
)
from .tolerances import DEFAULT, Tolerances

EQUAL = "equal"
RANGE = "range"

LESS_THAN = "<"
EQUALS = "="

Trajectory = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class Soap:
    """Non-empty set of acceptable policies with an equal/range realization mode."""

    good_policies: Tuple[Policy, ...]
    mode: str = EQUAL

    def __post_init__(self):
        pols = tuple(dict.fromkeys(tuple(p) for p in self.good_policies))
        if not pols:
            raise EmptySoap("SOAP must contain at least one policy")
        if self.mode not in (EQUAL, RANGE):
            raise InvalidIndex(f"SOAP mode must be {EQUAL!r} or {RANGE!r}, got {self.mode!r}")
        object.__setattr__(self, "good_policies", pols)

    def bind(self, cmp: Cmp) -> None:
        for p in self.good_policies:
            validate_policy(cmp, p)


@dataclass(frozen=True)
class PolicyOrder:
    """Explicit list of (policy, rel, policy) relations, rel in {'<', '='}.

    The relation list must be consistent as a partial order: no strict cycle
    after collapsing equality classes.
    """

    relations: Tuple[Tuple[Policy, str, Policy], ...]

    def __post_init__(self):
        rels = tuple((tuple(a), rel, tuple(b)) for a, rel, b in self.relations)
        for _, rel, _ in rels:
            if rel not in (LESS_THAN, EQUALS):
                raise InvalidIndex(f"relation must be {LESS_THAN!r} or {EQUALS!r}, got {rel!r}")
        object.__setattr__(self, "relations", rels)
        _check_order_consistency(rels)

    def policies(self) -> List[Policy]:
        seen = dict.fromkeys(p for a, _, b in self.relations for p in (a, b))
        return list(seen)

    def bind(self, cmp: Cmp) -> None:
        for p in self.policies():
            validate_policy(cmp, p)


@dataclass(frozen=True)
class TrajectoryOrder:
    """Relations over fixed-length (s, a) trajectories starting at s0."""

    horizon: int
    relations: Tuple[Tuple[Trajectory, str, Trajectory], ...]

    def __post_init__(self):
        if self.horizon <= 0:
            raise InvalidIndex(f"horizon must be positive, got {self.horizon}")
        rels = tuple(
            (tuple(tuple(p) for p in a), rel, tuple(tuple(p) for p in b))
            for a, rel, b in self.relations
        )
        for a, rel, b in rels:
            if rel not in (LESS_THAN, EQUALS):
                raise InvalidIndex(f"relation must be {LESS_THAN!r} or {EQUALS!r}, got {rel!r}")
            for tau in (a, b):
                if len(tau) != self.horizon:
                    raise InvalidIndex(f"trajectory length {len(tau)} != horizon {self.horizon}")
        object.__setattr__(self, "relations", rels)
        _check_order_consistency(rels)

    def trajectories(self) -> List[Trajectory]:
        seen = dict.fromkeys(t for a, _, b in self.relations for t in (a, b))
        return list(seen)

    def bind(self, cmp: Cmp) -> None:
        """Validate indices; warn on dynamically infeasible trajectories.

        Design never uses the transition function for TOs, so infeasible
        trajectories are allowed but flagged.
        """
        for tau in self.trajectories():
            if tau[0][0] != cmp.start_state:
                raise InvalidIndex(f"trajectory must start at s0={cmp.start_state}, got {tau[0][0]}")
            for s, a in tau:
                if not (0 <= s < cmp.n_states and 0 <= a < cmp.n_actions):
                    raise InvalidIndex(f"trajectory pair ({s}, {a}) out of range")
            for (s, a), (s2, _) in zip(tau, tau[1:]):
                if cmp.transition[s, a, s2] <= 0.0:
                    warnings.warn(
                        f"trajectory step ({s}, {a}) -> {s2} has zero probability",
                        stacklevel=2,
                    )


Task = Union[Soap, PolicyOrder, TrajectoryOrder]


def _check_order_consistency(relations) -> None:
    """Union equality classes, then cycle-detect strict relations over classes."""
    parent: Dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, rel, b in relations:
        find(a), find(b)
        if rel == EQUALS:
            parent[find(a)] = find(b)

    edges: Dict = {}
    for a, rel, b in relations:
        if rel == LESS_THAN:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise InconsistentOrder([a, b])
            edges.setdefault(ra, set()).add(rb)

    # iterative DFS cycle detection over class representatives
    color = {}
    for start in list(edges):
        if color.get(start):
            continue
        stack = [(start, iter(edges.get(start, ())))]
        color[start] = "gray"
        path = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt) == "gray":
                    raise InconsistentOrder(path[path.index(nxt):] + [nxt])
                if nxt not in color:
                    color[nxt] = "gray"
                    path.append(nxt)
                    stack.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = "black"
                path.pop()
                stack.pop()


# ---------------------------------------------------------------------------
# Verification results


@dataclass(frozen=True)
class Verification:
    realized: bool
    witness: Optional[tuple] = None  # (left, left_value, rel, right, right_value)

    def __bool__(self):
        return self.realized


REALIZED = Verification(True)


def verify_soap(cmp: Cmp, reward: np.ndarray, soap: Soap, tol: Tolerances = DEFAULT,
                cap: int = DEFAULT_POLICY_CAP) -> Verification:
    """Exhaustively evaluate every deterministic policy against the SOAP conditions.

    Policies are compared up to terminal-state actions: a policy matching
    some member at every non-terminal state counts as acceptable.
    """
    soap.bind(cmp)
    all_policies = canonical_policies(cmp, cap=cap)
    values = {p: float(compute_visitation(cmp, p) @ np.asarray(reward, dtype=float).ravel())
              for p in all_policies}
    good = {canonical_policy(cmp, p) for p in soap.good_policies}
    good_vals = [(p, values[p]) for p in sorted(good)]
    bad_vals = [(p, values[p]) for p in all_policies if p not in good]

    if soap.mode == EQUAL:
        ref_p, ref_v = good_vals[0]
        for p, v in good_vals[1:]:
            if abs(v - ref_v) > tol.equal_tol:
                return Verification(False, (ref_p, ref_v, EQUALS, p, v))
    for pg, vg in good_vals:
        for pb, vb in bad_vals:
            if not (vg > vb + tol.strict_margin):
                return Verification(False, (pb, vb, LESS_THAN, pg, vg))
    return REALIZED


def verify_po(cmp: Cmp, reward: np.ndarray, po: PolicyOrder, tol: Tolerances = DEFAULT) -> Verification:
    """Check each listed relation against start-state values."""
    po.bind(cmp)
    r = np.asarray(reward, dtype=float).ravel()
    values = {p: float(compute_visitation(cmp, p) @ r) for p in po.policies()}
    return _verify_relations(po.relations, values, tol)


def verify_to(cmp: Cmp, reward: np.ndarray, to: TrajectoryOrder, tol: Tolerances = DEFAULT) -> Verification:
    """Check each listed relation against N-step discounted returns."""
    to.bind(cmp)
    values = {t: trajectory_return(reward, t, cmp.gamma) for t in to.trajectories()}
    return _verify_relations(to.relations, values, tol)


def _verify_relations(relations, values, tol: Tolerances) -> Verification:
    for a, rel, b in relations:
        va, vb = values[a], values[b]
        if rel == EQUALS:
            if abs(va - vb) > tol.equal_tol:
                return Verification(False, (a, va, rel, b, vb))
        else:
            if not (va < vb - tol.strict_margin):
                return Verification(False, (a, va, rel, b, vb))
    return REALIZED


# ---------------------------------------------------------------------------
# JSON task format


def task_to_json(task: Task) -> str:
    if isinstance(task, Soap):
        doc = {"type": "soap", "mode": task.mode,
               "policies": [list(p) for p in task.good_policies]}
    elif isinstance(task, PolicyOrder):
        doc = {"type": "po",
               "relations": [[list(a), rel, list(b)] for a, rel, b in task.relations]}
    elif isinstance(task, TrajectoryOrder):
        doc = {"type": "to", "horizon": task.horizon,
               "relations": [[[list(p) for p in a], rel, [list(p) for p in b]]
                             for a, rel, b in task.relations]}
    else:
        raise InvalidIndex(f"unknown task type {type(task).__name__}")
    return json.dumps(doc, sort_keys=True)


def task_from_json(text: str) -> Task:
    doc = json.loads(text)
    kind = doc.get("type")
    if kind == "soap":
        return Soap(tuple(tuple(p) for p in doc["policies"]), doc.get("mode", EQUAL))
    if kind == "po":
        return PolicyOrder(tuple((tuple(a), rel, tuple(b)) for a, rel, b in doc["relations"]))
    if kind == "to":
        return TrajectoryOrder(
            int(doc["horizon"]),
            tuple((tuple(tuple(p) for p in a), rel, tuple(tuple(p) for p in b))
                  for a, rel, b in doc["relations"]),
        )
    raise InvalidIndex(f"unknown task type {kind!r}")
