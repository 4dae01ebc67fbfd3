"""LP-based reward design for SOAP/PO/TO tasks, plus the binary-reward brute-force oracle.

Every designer builds one LP over the reward vector X (box-bounded by
+-rmax) and a separation margin eps, maximizes eps, and declares the task
realizable iff eps clears the realizability threshold.  The box bound is
what makes "maximize eps" finite; it does not change the found/unrealizable
decision because the constraint system is homogeneous in X.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import simplex
from .errors import (
    InvalidIndex,
    MalformedProgram,
    SearchSpaceTooLarge,
    StateActionMismatch,
)
from .mdp import Cmp, Policy
from .policies import compute_fringe, compute_visitation, trajectory_weights
from .simplex import LinearProgram
from .tasks import EQUAL, LESS_THAN, PolicyOrder, Soap, Task, TrajectoryOrder
from .tolerances import DEFAULT, Tolerances

FOUND = "found"
UNREALIZABLE = "unrealizable"


@dataclass(frozen=True)
class DesignOutcome:
    status: str
    reward: Optional[np.ndarray] = None  # (S, A) when found
    epsilon: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


class _VisitationCache:
    """Per-call visitation cache keyed by (env index, policy)."""

    def __init__(self):
        self._store: Dict[tuple, np.ndarray] = {}

    def get(self, cmp: Cmp, policy: Policy, env_key: int = 0) -> np.ndarray:
        key = (env_key, tuple(policy))
        if key not in self._store:
            self._store[key] = compute_visitation(cmp, policy)
        return self._store[key]


def _solve_margin_lp(
    n_sa: int,
    strict: Sequence[Tuple[np.ndarray, np.ndarray]],  # lo . X + eps <= hi . X
    equal: Sequence[Tuple[np.ndarray, np.ndarray]],   # a . X = b . X
    rmax: float,
    shape: Tuple[int, int],
    tol: Tolerances,
    dump_path: Optional[str] = None,
    state_only: bool = False,
) -> DesignOutcome:
    if rmax <= 0:
        raise InvalidIndex(f"rmax must be positive, got {rmax}")
    diagnostics = {"n_strict": len(strict), "n_equal": len(equal)}
    if not strict:
        # Vacuous convention: no strict relations -> zero reward, eps = 0.
        # Equality relations are homogeneous in X, so zero satisfies them.
        diagnostics["lp_status"] = "skipped"
        return DesignOutcome(FOUND, np.zeros(shape), 0.0, diagnostics)

    if state_only:
        # Restrict to rewards constant across actions: R(s, a) = r(s).  The
        # LP variables shrink to one per state; constraint coefficients fold
        # by summing visitation over actions.
        collapse = lambda vec: vec.reshape(shape).sum(axis=1)  # noqa: E731
        strict = [(collapse(lo), collapse(hi)) for lo, hi in strict]
        equal = [(collapse(a), collapse(b)) for a, b in equal]
        n_sa = shape[0]

    # Duplicate rows are common (policies differing only at unreachable
    # states share a visitation vector); drop them before building the
    # tableau, keyed on the rounded difference vector.
    strict = list({tuple(np.round(lo - hi, 12)): (lo, hi) for lo, hi in strict}.values())
    equal = list({tuple(np.round(a - b, 12)): (a, b) for a, b in equal}.values())
    equal = [(a, b) for a, b in equal if np.abs(a - b).max() > 1e-12]
    diagnostics["n_strict_unique"] = len(strict)
    diagnostics["n_equal_unique"] = len(equal)

    n = n_sa + 1  # trailing variable is eps
    ineq_lhs = np.zeros((len(strict), n))
    for i, (lo, hi) in enumerate(strict):
        ineq_lhs[i, :n_sa] = lo - hi
        ineq_lhs[i, n_sa] = 1.0
    eq_lhs = np.zeros((len(equal), n))
    for i, (a, b) in enumerate(equal):
        eq_lhs[i, :n_sa] = a - b
    objective = np.zeros(n)
    objective[n_sa] = 1.0
    lower = np.full(n, -rmax)
    upper = np.full(n, rmax)
    lower[n_sa], upper[n_sa] = 0.0, np.inf
    lp = LinearProgram(
        objective=objective,
        ineq_lhs=ineq_lhs,
        ineq_rhs=np.zeros(len(strict)),
        eq_lhs=eq_lhs if len(equal) else None,
        eq_rhs=np.zeros(len(equal)) if len(equal) else None,
        lower=lower,
        upper=upper,
    )
    if dump_path:
        with open(dump_path, "w") as f:
            f.write(lp.dump())
    start = time.perf_counter()
    perturbed = False
    try:
        sol = simplex.solve(lp, tol=tol)
    except MalformedProgram:
        # Iteration-limit escape hatch for heavily degenerate instances (all
        # right-hand sides are zero, so many bases tie).  Distinct tiny
        # positive slacks break the ties; the reward found this way is then
        # re-scored against the original rows, so the margin reported below
        # is exact and the relaxation cannot manufacture a false positive
        # beyond the perturbation scale (1e-9, well under the 1e-7 margin).
        perturbed = True
        delta = 1e-9 * (1.0 + np.arange(len(strict), dtype=float) / max(len(strict), 1))
        lp = LinearProgram(
            objective=objective,
            ineq_lhs=ineq_lhs,
            ineq_rhs=delta,
            eq_lhs=eq_lhs if len(equal) else None,
            eq_rhs=np.zeros(len(equal)) if len(equal) else None,
            lower=lower,
            upper=upper,
        )
        sol = simplex.solve(lp, tol=tol)
    diagnostics["lp_status"] = sol.status
    diagnostics["lp_perturbed"] = perturbed
    diagnostics["solve_seconds"] = time.perf_counter() - start
    diagnostics["lp_iterations"] = sol.iterations
    if sol.status == simplex.UNBOUNDED:
        raise MalformedProgram("margin LP unbounded despite box-bounded reward")
    if sol.status != simplex.OPTIMAL:
        return DesignOutcome(UNREALIZABLE, diagnostics=diagnostics)
    eps = float(sol.x[n_sa])
    if perturbed:
        # exact margin of the returned reward under the unperturbed rows
        eps = min(float((hi - lo) @ sol.x[:n_sa]) for lo, hi in strict)
    if eps <= tol.realizable_margin:
        return DesignOutcome(UNREALIZABLE, epsilon=eps, diagnostics=diagnostics)
    if state_only:
        reward = np.repeat(sol.x[:n_sa, None], shape[1], axis=1)
    else:
        reward = sol.x[:n_sa].reshape(shape)
    return DesignOutcome(FOUND, reward, eps, diagnostics)


def design_soap(cmp: Cmp, soap: Soap, rmax: float = 1.0, tol: Tolerances = DEFAULT,
                dump_path: Optional[str] = None, state_only: bool = False) -> DesignOutcome:
    """Constructive reward design against the SOAP's one-flip fringe.

    Equal mode: tie all good policies and push the fringe eps below the
    first one.  Range mode: no ties; every good policy must exceed every
    fringe policy.  Constraining the fringe alone suffices because any
    single-flip improving path out of the acceptable set crosses it.
    """
    return design_multi_env_soap([cmp], soap, rmax, tol, dump_path, state_only)


def design_po(cmp: Cmp, po: PolicyOrder, rmax: float = 1.0, tol: Tolerances = DEFAULT,
              dump_path: Optional[str] = None, state_only: bool = False) -> DesignOutcome:
    """One visitation vector per distinct policy; '<' adds an eps margin."""
    return design_multi_env_po([cmp], po, rmax, tol, dump_path, state_only)


def design_to(cmp: Cmp, to: TrajectoryOrder, rmax: float = 1.0, tol: Tolerances = DEFAULT,
              dump_path: Optional[str] = None, state_only: bool = False) -> DesignOutcome:
    """Trajectories become discounted indicator vectors; relations become rows."""
    return design_multi_env_to([cmp], to, rmax, tol, dump_path, state_only)


def design_multi_env_soap(cmps, soap, rmax, tol, dump_path=None, state_only=False) -> DesignOutcome:
    cache = _VisitationCache()
    strict, equal = [], []
    fringe = sorted(compute_fringe(cmps[0], soap.good_policies))
    good = soap.good_policies
    for e, cmp in enumerate(cmps):
        soap.bind(cmp)
        rho_good = [cache.get(cmp, g, e) for g in good]
        rho_fringe = [cache.get(cmp, f, e) for f in fringe]
        if soap.mode == EQUAL:
            for rho in rho_good[1:]:
                equal.append((rho_good[0], rho))
            for rho in rho_fringe:
                strict.append((rho, rho_good[0]))
        else:
            for rho_g in rho_good:
                for rho_f in rho_fringe:
                    strict.append((rho_f, rho_g))
    shape = (cmps[0].n_states, cmps[0].n_actions)
    outcome = _solve_margin_lp(cmps[0].n_state_actions, strict, equal, rmax, shape, tol, dump_path, state_only)
    return _zero_shared_terminals(outcome, cmps)


def _zero_shared_terminals(outcome: DesignOutcome, cmps) -> DesignOutcome:
    """Zero reward rows at states terminal in every environment.

    Visitation is zero there, so the LP leaves those variables free; pinning
    them to zero keeps the outcome optimal and the reward readable.
    """
    if not outcome.found:
        return outcome
    shared = np.logical_and.reduce([c.terminal_mask for c in cmps])
    if not shared.any():
        return outcome
    reward = outcome.reward.copy()
    reward[shared] = 0.0
    return DesignOutcome(outcome.status, reward, outcome.epsilon, outcome.diagnostics)


def design_multi_env_po(cmps, po, rmax, tol, dump_path=None, state_only=False) -> DesignOutcome:
    cache = _VisitationCache()
    strict, equal = [], []
    for e, cmp in enumerate(cmps):
        po.bind(cmp)
        for a, rel, b in po.relations:
            rho_a, rho_b = cache.get(cmp, a, e), cache.get(cmp, b, e)
            if rel == LESS_THAN:
                strict.append((rho_a, rho_b))
            else:
                equal.append((rho_a, rho_b))
    shape = (cmps[0].n_states, cmps[0].n_actions)
    outcome = _solve_margin_lp(cmps[0].n_state_actions, strict, equal, rmax, shape, tol, dump_path, state_only)
    return _zero_shared_terminals(outcome, cmps)


def design_multi_env_to(cmps, to, rmax, tol, dump_path=None, state_only=False) -> DesignOutcome:
    strict, equal = [], []
    for cmp in cmps:
        to.bind(cmp)
        weights = {t: trajectory_weights(cmp, t) for t in to.trajectories()}
        for a, rel, b in to.relations:
            if rel == LESS_THAN:
                strict.append((weights[a], weights[b]))
            else:
                equal.append((weights[a], weights[b]))
    shape = (cmps[0].n_states, cmps[0].n_actions)
    return _solve_margin_lp(cmps[0].n_state_actions, strict, equal, rmax, shape, tol, dump_path, state_only)


def design(cmp: Cmp, task: Task, rmax: float = 1.0, tol: Tolerances = DEFAULT,
           dump_path: Optional[str] = None, state_only: bool = False) -> DesignOutcome:
    """Dispatch to the matching designer for the task type."""
    if isinstance(task, Soap):
        return design_soap(cmp, task, rmax, tol, dump_path, state_only)
    if isinstance(task, PolicyOrder):
        return design_po(cmp, task, rmax, tol, dump_path, state_only)
    if isinstance(task, TrajectoryOrder):
        return design_to(cmp, task, rmax, tol, dump_path, state_only)
    raise InvalidIndex(f"unknown task type {type(task).__name__}")


def design_multi_env(cmps: Sequence[Cmp], task: Task, rmax: float = 1.0,
                     tol: Tolerances = DEFAULT, dump_path: Optional[str] = None,
                     state_only: bool = False) -> DesignOutcome:
    """One shared reward vector constrained by every environment's LP rows."""
    if not cmps:
        raise InvalidIndex("environment list must be non-empty")
    shapes = {(c.n_states, c.n_actions) for c in cmps}
    if len(shapes) != 1:
        raise StateActionMismatch(f"environments disagree on (|S|, |A|): {sorted(shapes)}")
    if isinstance(task, Soap):
        return design_multi_env_soap(cmps, task, rmax, tol, dump_path, state_only)
    if isinstance(task, PolicyOrder):
        return design_multi_env_po(cmps, task, rmax, tol, dump_path, state_only)
    if isinstance(task, TrajectoryOrder):
        return design_multi_env_to(cmps, task, rmax, tol, dump_path, state_only)
    raise InvalidIndex(f"unknown task type {type(task).__name__}")


def decide_expressible(cmp: Cmp, task: Task, rmax: float = 1.0, tol: Tolerances = DEFAULT,
                       state_only: bool = False) -> bool:
    """True iff the matching design operation finds a realizing reward."""
    return design(cmp, task, rmax, tol, state_only=state_only).found


# ---------------------------------------------------------------------------
# Binary (state-only, {0,1}-valued) reward decision, brute force


MAX_BINARY_STATES = 24


def _state_occupancies(cmp: Cmp, policies: Sequence[Policy]) -> np.ndarray:
    """Rows of discounted state-occupancy vectors, one per policy."""
    rows = []
    for p in policies:
        rho = compute_visitation(cmp, p).reshape(cmp.n_states, cmp.n_actions)
        rows.append(rho.sum(axis=1))
    return np.array(rows)


def binary_po_satisfying_assignments(cmp: Cmp, po: PolicyOrder, margin: float = 1e-9) -> np.ndarray:
    """All R in {0,1}^|S| (rows) satisfying the listed relations on state rewards."""
    if cmp.n_states > MAX_BINARY_STATES:
        raise SearchSpaceTooLarge(f"2^{cmp.n_states} assignments exceed 2^{MAX_BINARY_STATES}")
    po.bind(cmp)
    policies = po.policies()
    occ = _state_occupancies(cmp, policies)  # (P, S)
    index = {p: i for i, p in enumerate(policies)}
    count = 1 << cmp.n_states
    bits = (np.arange(count)[:, None] >> np.arange(cmp.n_states)) & 1  # (2^S, S)
    values = bits.astype(float) @ occ.T  # (2^S, P)
    ok = np.ones(count, dtype=bool)
    for a, rel, b in po.relations:
        va, vb = values[:, index[a]], values[:, index[b]]
        if rel == LESS_THAN:
            ok &= va < vb - margin
        else:
            ok &= np.abs(va - vb) <= margin
    return bits[ok]


def decide_binary_po_bruteforce(cmp: Cmp, po: PolicyOrder, margin: float = 1e-9) -> bool:
    """True iff some {0,1} state-reward assignment satisfies all listed relations."""
    return binary_po_satisfying_assignments(cmp, po, margin).shape[0] > 0


# ---------------------------------------------------------------------------
# Monotone 3-SAT reduction fixture generator (test gadget, not a shipped solver)

Clause = Tuple[bool, Tuple[int, int, int]]  # (is_positive, variable ids)


def build_monotone_3sat_instance(n_vars: int, clauses: Sequence[Clause],
                                 gamma: float = 0.95) -> Tuple[Cmp, PolicyOrder]:
    """Reduction MDP: one decision state fanning out to absorbing literal states.

    States: the decision state, two anchor states, then one absorbing state
    per literal.  Actions: the two anchor actions, one per variable (50/50
    split over its literal pair), one per clause (uniform over its three
    literal states).  Constraints pin the anchors to rewards 0 and 1, force
    each literal pair to sum to 1, and force each clause above/below its
    anchor.
    """
    for is_pos, lits in clauses:
        if len(lits) != 3:
            raise InvalidIndex(f"clause must have exactly 3 literals, got {lits}")
        for v in lits:
            if not (0 <= v < n_vars):
                raise InvalidIndex(f"clause variable {v} out of range [0, {n_vars})")

    def lit_state(v: int, negated: bool) -> int:
        return 3 + 2 * v + (1 if negated else 0)

    n_states = 3 + 2 * n_vars
    n_actions = 2 + n_vars + len(clauses)
    t = np.zeros((n_states, n_actions, n_states))
    t[0, 0, 1] = 1.0  # anchor low
    t[0, 1, 2] = 1.0  # anchor high
    for v in range(n_vars):
        t[0, 2 + v, lit_state(v, False)] = 0.5
        t[0, 2 + v, lit_state(v, True)] = 0.5
    for c, (_, lits) in enumerate(clauses):
        # Both clause kinds point at the positive-literal states; the
        # relation direction below encodes the polarity: "above the low
        # anchor" forces a 1 somewhere, "below the high anchor" forces a 0.
        for v in lits:
            t[0, 2 + n_vars + c, lit_state(v, False)] += 1.0 / 3.0
    # Literal and anchor states absorb but are not flagged terminal: their
    # rewards must keep accruing for the value separations below to encode
    # the formula.
    for s in range(1, n_states):
        t[s, :, s] = 1.0
    cmp = Cmp(n_states, n_actions, t, gamma, 0, np.zeros(n_states, dtype=bool))

    def pol(action: int) -> Policy:
        return (action,) + (0,) * (n_states - 1)

    relations: List[tuple] = [(pol(0), LESS_THAN, pol(1))]
    for v in range(n_vars):
        relations.append((pol(0), LESS_THAN, pol(2 + v)))
        relations.append((pol(2 + v), LESS_THAN, pol(1)))
    for c, (is_pos, _) in enumerate(clauses):
        if is_pos:
            relations.append((pol(0), LESS_THAN, pol(2 + n_vars + c)))
        else:
            relations.append((pol(2 + n_vars + c), LESS_THAN, pol(1)))
    return cmp, PolicyOrder(tuple(relations))
