"""Numeric tolerance stack.

Layered so each check sits safely above the noise of the layer below:
dense linear solve (~1e-10 residual) -> LP feasibility (1e-9) ->
realizability threshold (1e-7) -> task equality tolerance (1e-6).
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    row_sum: float = 1e-9          # transition row normalization
    lp_feasibility: float = 1e-9   # constraint satisfaction in LP solutions
    lp_pivot: float = 1e-10        # simplex pivot threshold
    realizable_margin: float = 1e-7  # minimum epsilon to declare a task realizable
    strict_margin: float = 1e-7    # required gap for strict relations in verifiers
    equal_tol: float = 1e-6        # allowed slack for equality relations in verifiers


DEFAULT = Tolerances()
