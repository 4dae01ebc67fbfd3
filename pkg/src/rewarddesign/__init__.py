"""Reward design for finite MDP tasks: construct a Markov reward function that
realizes a set of acceptable policies, a policy order, or a trajectory order,
or certify that none exists."""

__version__ = "0.1.0"

from .design import (
    DesignOutcome,
    FOUND,
    UNREALIZABLE,
    build_monotone_3sat_instance,
    decide_binary_po_bruteforce,
    decide_expressible,
    design,
    design_multi_env,
    design_po,
    design_soap,
    design_to,
)
from .mdp import (
    Cmp,
    GridWorld,
    Mdp,
    Policy,
    builtin_cmp,
    cmp_from_json,
    cmp_to_json,
    make_nonclosed_pair,
    make_russell_norvig_grid,
    make_steady_state_cmp,
    make_xor_cmp,
    validate_cmp,
)
from .policies import (
    compute_fringe,
    compute_visitation,
    enumerate_policies,
    start_value,
    trajectory_return,
)
from .qlearn import LearningConfig, q_learning_run, soap_policy_match
from .samplers import SamplerConfig, sample_cmp, sample_cmp_with_entropy, sample_soap, sample_soap_spread
from .simplex import LinearProgram, LpSolution, solve
from .tasks import (
    PolicyOrder,
    Soap,
    TrajectoryOrder,
    task_from_json,
    task_to_json,
    verify_po,
    verify_soap,
    verify_to,
)
from .tolerances import Tolerances

__all__ = [name for name in dir() if not name.startswith("_")]
