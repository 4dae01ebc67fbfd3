"""Finite controlled Markov processes: representation, validation, fixtures, JSON I/O.

A CMP is an MDP without a reward function.  Rewards are dense (state, action)
matrices; a state-only reward is the special case with equal rows across actions.
Terminal states are modeled as absorbing self-loops inside the transition tensor
so discounted-visitation math stays uniform; episodic cutoffs live in the RL agent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidDiscount, InvalidDistribution, InvalidIndex, InvalidProbability
from .tolerances import DEFAULT, Tolerances

Policy = Tuple[int, ...]  # action index per state


@dataclass(frozen=True)
class Cmp:
    """Finite CMP: (S, A, T, gamma, s0) plus a terminal mask."""

    n_states: int
    n_actions: int
    transition: np.ndarray  # shape (S, A, S), T[s, a, s']
    gamma: float
    start_state: int = 0
    terminal_mask: np.ndarray = None  # shape (S,), bool

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        object.__setattr__(self, "transition", t)
        mask = self.terminal_mask
        if mask is None:
            mask = np.zeros(self.n_states, dtype=bool)
        object.__setattr__(self, "terminal_mask", np.asarray(mask, dtype=bool))
        self.transition.setflags(write=False)
        self.terminal_mask.setflags(write=False)

    @property
    def n_state_actions(self) -> int:
        return self.n_states * self.n_actions


@dataclass(frozen=True)
class Mdp:
    cmp: Cmp
    reward: np.ndarray  # shape (S, A)

    def __post_init__(self):
        r = np.asarray(self.reward, dtype=float)
        if r.shape != (self.cmp.n_states, self.cmp.n_actions):
            raise InvalidIndex(
                f"reward shape {r.shape} does not match CMP "
                f"({self.cmp.n_states}, {self.cmp.n_actions})"
            )
        object.__setattr__(self, "reward", r)


def validate_cmp(cmp: Cmp, tol: Tolerances = DEFAULT) -> None:
    """Raise if any CMP invariant is violated."""
    if not (0.0 <= cmp.gamma < 1.0):
        raise InvalidDiscount(f"gamma must be in [0, 1), got {cmp.gamma}")
    if not (0 <= cmp.start_state < cmp.n_states):
        raise InvalidIndex(f"start state {cmp.start_state} out of range [0, {cmp.n_states})")
    t = cmp.transition
    if t.shape != (cmp.n_states, cmp.n_actions, cmp.n_states):
        raise InvalidIndex(f"transition tensor shape {t.shape} inconsistent with counts")
    for s in range(cmp.n_states):
        for a in range(cmp.n_actions):
            row = t[s, a]
            if (row < 0).any():
                raise InvalidDistribution(s, a, "negative probability")
            total = row.sum()
            if abs(total - 1.0) > tol.row_sum:
                raise InvalidDistribution(s, a, f"row sums to {total}")
        if cmp.terminal_mask[s]:
            for a in range(cmp.n_actions):
                if abs(t[s, a, s] - 1.0) > tol.row_sum:
                    raise InvalidDistribution(s, a, "terminal state must self-loop")


def validate_policy(cmp: Cmp, policy: Policy) -> None:
    if len(policy) != cmp.n_states:
        raise InvalidIndex(f"policy length {len(policy)} != n_states {cmp.n_states}")
    for s, a in enumerate(policy):
        if not (0 <= a < cmp.n_actions):
            raise InvalidIndex(f"policy action {a} at state {s} out of range")


# ---------------------------------------------------------------------------
# Fixture environments


def make_xor_cmp(gamma: float = 0.95) -> Cmp:
    """Two-state, two-action CMP where both actions alternate s0 <-> s1.

    Making both cross policies best entails the two uniform policies tie
    with them, so the XOR-like acceptable set {(0,1), (1,0)} is unrealizable.
    The same CMP separates the range and equal realization criteria for the
    acceptable set of all policies but (1,1).
    """
    t = np.zeros((2, 2, 2))
    t[0, :, 1] = 1.0
    t[1, :, 0] = 1.0
    return Cmp(2, 2, t, gamma, 0)


def make_steady_state_cmp(gamma: float = 0.95) -> Cmp:
    """Two-state, two-action CMP where s0 self-loops under both actions.

    s1 is unreachable from s0 under every policy, so no reward can separate
    two policies differing only at s1.
    """
    t = np.zeros((2, 2, 2))
    t[0, :, 0] = 1.0
    t[1, :, 1] = 1.0
    return Cmp(2, 2, t, gamma, 0)


def make_nonclosed_pair(gamma: float = 0.95) -> Tuple[Cmp, Cmp]:
    """Two 3-state, 2-action CMPs with opposite action effects.

    From s0 both actions split 0.5/0.5 between s1 and s2.  In the first CMP
    action 0 stays in place and action 1 flips s1 <-> s2; in the second the
    effects are inverted.  A task realizable in each alone need not be
    realizable in both at once.
    """
    tx = np.zeros((3, 2, 3))
    tx[0, :, 1] = 0.5
    tx[0, :, 2] = 0.5
    tx[1, 0, 1] = 1.0  # stay
    tx[1, 1, 2] = 1.0  # flip
    tx[2, 0, 2] = 1.0
    tx[2, 1, 1] = 1.0
    ty = tx.copy()
    ty[1:, :, :] = tx[1:, ::-1, :]  # swap action roles in s1, s2
    return Cmp(3, 2, tx, gamma, 0), Cmp(3, 2, ty, gamma, 0)


# Russell-Norvig 4x3 grid.  Cells are (row, col) with row 0 at the bottom.
GRID_ROWS = 3
GRID_COLS = 4
GRID_WALL = (1, 1)
GRID_GOAL = (2, 3)
GRID_FIRE = (1, 3)
GRID_START = (0, 0)
# action effects: 0=up, 1=right, 2=down, 3=left
ACTION_DELTAS = ((1, 0), (0, 1), (-1, 0), (0, -1))
ACTION_NAMES = ("up", "right", "down", "left")


@dataclass(frozen=True)
class GridWorld:
    """Grid CMP plus cell bookkeeping."""

    cmp: Cmp
    cell_to_state: dict
    state_to_cell: tuple
    goal_state: int
    fire_state: int

    def goal_reward(self) -> np.ndarray:
        """Entry-based +goal/-fire reward projected onto (s, a).

        R(s, a) = sum_s' T[s,a,s'] * (+1 if s' is the goal, -1 if s' is the
        fire); terminal rows are zero so the bonus is collected once.
        """
        cmp = self.cmp
        bonus = np.zeros(cmp.n_states)
        bonus[self.goal_state] = 1.0
        bonus[self.fire_state] = -1.0
        r = cmp.transition @ bonus
        r[cmp.terminal_mask, :] = 0.0
        return r


def make_russell_norvig_grid(slip: float = 0.35, gamma: float = 0.95) -> GridWorld:
    """4x3 grid with one wall, a terminal fire cell and a terminal goal cell.

    The intended move happens with probability 1 - slip; each of the two
    orthogonal moves happens with probability slip / 2.  Moves into the wall
    or off the grid leave the agent in place.
    """
    if not (0.0 <= slip < 1.0):
        raise InvalidProbability(f"slip must be in [0, 1), got {slip}")
    cells = [
        (r, c)
        for r in range(GRID_ROWS)
        for c in range(GRID_COLS)
        if (r, c) != GRID_WALL
    ]
    cell_to_state = {cell: i for i, cell in enumerate(cells)}
    n = len(cells)
    n_actions = 4
    goal = cell_to_state[GRID_GOAL]
    fire = cell_to_state[GRID_FIRE]
    terminal = np.zeros(n, dtype=bool)
    terminal[goal] = terminal[fire] = True

    def move(cell, action):
        dr, dc = ACTION_DELTAS[action]
        nr, nc = cell[0] + dr, cell[1] + dc
        if not (0 <= nr < GRID_ROWS and 0 <= nc < GRID_COLS) or (nr, nc) == GRID_WALL:
            return cell
        return (nr, nc)

    t = np.zeros((n, n_actions, n))
    for cell, s in cell_to_state.items():
        for a in range(n_actions):
            if terminal[s]:
                t[s, a, s] = 1.0
                continue
            effects = [(a, 1.0 - slip), ((a - 1) % 4, slip / 2), ((a + 1) % 4, slip / 2)]
            for eff, p in effects:
                t[s, a, cell_to_state[move(cell, eff)]] += p
    cmp = Cmp(n, n_actions, t, gamma, cell_to_state[GRID_START], terminal)
    return GridWorld(cmp, cell_to_state, tuple(cells), goal, fire)


# ---------------------------------------------------------------------------
# JSON environment format


def cmp_to_json(cmp: Cmp) -> str:
    doc = {
        "n_states": cmp.n_states,
        "n_actions": cmp.n_actions,
        "gamma": cmp.gamma,
        "start_state": cmp.start_state,
        "terminal": [bool(b) for b in cmp.terminal_mask],
        "transition": cmp.transition.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def cmp_from_json(text: str) -> Cmp:
    doc = json.loads(text)
    cmp = Cmp(
        n_states=int(doc["n_states"]),
        n_actions=int(doc["n_actions"]),
        transition=np.array(doc["transition"], dtype=float),
        gamma=float(doc["gamma"]),
        start_state=int(doc["start_state"]),
        terminal_mask=np.array(doc.get("terminal", [False] * int(doc["n_states"]))),
    )
    validate_cmp(cmp)
    return cmp


BUILTIN_ENVS = ("xor", "steady", "grid", "nonclosed-x", "nonclosed-y")


def builtin_cmp(name: str) -> Cmp:
    """Resolve a builtin:<name> environment."""
    if name == "xor":
        return make_xor_cmp()
    if name == "steady":
        return make_steady_state_cmp()
    if name == "grid":
        return make_russell_norvig_grid().cmp
    if name == "nonclosed-x":
        return make_nonclosed_pair()[0]
    if name == "nonclosed-y":
        return make_nonclosed_pair()[1]
    raise InvalidIndex(f"unknown builtin environment {name!r}; choose from {BUILTIN_ENVS}")
