"""Reward design tests: LP designers against exhaustive verification oracles."""
import itertools

import numpy as np
import pytest

from rewarddesign.design import (
    binary_po_satisfying_assignments,
    build_monotone_3sat_instance,
    decide_binary_po_bruteforce,
    decide_expressible,
    design,
    design_multi_env,
    design_po,
    design_soap,
    design_to,
)
from rewarddesign.errors import InvalidIndex, StateActionMismatch
from rewarddesign.mdp import (
    make_nonclosed_pair,
    make_russell_norvig_grid,
    make_steady_state_cmp,
    make_xor_cmp,
)
from rewarddesign.policies import enumerate_policies
from rewarddesign.samplers import SamplerConfig, sample_cmp, sample_soap
from rewarddesign.tasks import (
    EQUAL,
    EQUALS,
    LESS_THAN,
    RANGE,
    PolicyOrder,
    Soap,
    TrajectoryOrder,
    verify_po,
    verify_soap,
    verify_to,
)


def test_xor_soap_unrealizable_both_modes():
    cmp = make_xor_cmp()
    good = ((0, 1), (1, 0))
    for mode in (EQUAL, RANGE):
        outcome = design_soap(cmp, Soap(good, mode))
        assert not outcome.found, mode


def test_steady_state_soap_unrealizable():
    cmp = make_steady_state_cmp()
    # the member differs from (0, 0) only at unreachable s1
    outcome = design_soap(cmp, Soap(((1, 0),), EQUAL))
    assert not outcome.found


def test_realizable_soap_round_trip():
    cmp = make_xor_cmp()
    soap = Soap(((0, 0),), EQUAL)
    outcome = design_soap(cmp, soap)
    assert outcome.found
    assert outcome.epsilon > 1e-4
    assert verify_soap(cmp, outcome.reward, soap).realized


def test_equal_vs_range_separation():
    """Tying three of four policies is impossible here, ranging them is not."""
    cmp = make_xor_cmp()
    good = ((0, 0), (1, 0), (0, 1))
    assert not design_soap(cmp, Soap(good, EQUAL)).found
    rg = design_soap(cmp, Soap(good, RANGE))
    assert rg.found
    assert rg.epsilon >= 1e-4
    assert verify_soap(cmp, rg.reward, Soap(good, RANGE)).realized


def test_po_design_and_unrealizable():
    cmp = make_xor_cmp()
    good = ((0, 1), (1, 0))
    bad = ((0, 0), (1, 1))
    rels = tuple((b, LESS_THAN, g) for g in good for b in bad)
    assert not design_po(cmp, PolicyOrder(rels)).found
    sat = PolicyOrder((((1, 1), LESS_THAN, (0, 0)),))
    outcome = design_po(cmp, sat)
    assert outcome.found
    assert verify_po(cmp, outcome.reward, sat).realized


def test_po_equality_relations_enforced():
    cmp = make_xor_cmp()
    po = PolicyOrder((
        ((0, 0), EQUALS, (1, 1)),
        ((1, 1), LESS_THAN, (0, 1)),
    ))
    outcome = design_po(cmp, po)
    assert outcome.found
    assert verify_po(cmp, outcome.reward, po).realized


def test_to_design_and_unrealizable():
    cmp = make_xor_cmp()
    to_good = (((0, 0), (1, 1)), ((0, 1), (1, 0)))
    to_bad = (((0, 0), (1, 0)), ((0, 1), (1, 1)))
    rels = tuple((b, LESS_THAN, g) for g in to_good for b in to_bad)
    assert not design_to(cmp, TrajectoryOrder(2, rels)).found
    sat = TrajectoryOrder(2, ((to_bad[0], LESS_THAN, to_good[0]),))
    outcome = design_to(cmp, sat)
    assert outcome.found
    assert verify_to(cmp, outcome.reward, sat).realized


def test_design_dispatch_matches_specialists():
    cmp = make_xor_cmp()
    soap = Soap(((0, 0),), EQUAL)
    assert design(cmp, soap).status == design_soap(cmp, soap).status
    with pytest.raises(InvalidIndex):
        design(cmp, "not a task")


def test_vacuous_tasks_found_with_zero_reward():
    cmp = make_xor_cmp()
    # every policy acceptable in range mode: the fringe is empty
    soap = Soap(tuple(enumerate_policies(cmp)), RANGE)
    outcome = design_soap(cmp, soap)
    assert outcome.found
    assert outcome.epsilon == 0.0
    assert (outcome.reward == 0.0).all()
    # equality-only order, no strict rows
    po = PolicyOrder((((0, 0), EQUALS, (1, 1)),))
    assert design_po(cmp, po).found


def test_rmax_scales_margin_linearly():
    cmp = make_xor_cmp()
    soap = Soap(((0, 0),), EQUAL)
    e1 = design_soap(cmp, soap, rmax=1.0).epsilon
    e5 = design_soap(cmp, soap, rmax=5.0).epsilon
    assert e5 == pytest.approx(5.0 * e1, rel=1e-9)
    with pytest.raises(InvalidIndex):
        design_soap(cmp, soap, rmax=0.0)


def test_state_only_is_more_restrictive():
    cmp, _ = make_nonclosed_pair()
    # prefer action 1 at s1 and action 0 at s2: impossible with a
    # state-only reward (both policies visit the same states), fine with
    # a full (s, a) reward
    soap = Soap(((0, 1, 0),), RANGE)
    assert design_soap(cmp, soap).found
    assert not design_soap(cmp, soap, state_only=True).found


def test_state_only_reward_constant_across_actions():
    cmp = make_xor_cmp()
    outcome = design_soap(cmp, Soap(((0, 0), (1, 1)), RANGE), state_only=True)
    if outcome.found:
        assert np.allclose(outcome.reward, outcome.reward[:, :1])


def test_multi_env_nonclosure_state_only():
    """Realizable in each environment alone, not in both at once."""
    cx, cy = make_nonclosed_pair()
    soap = Soap(((0, 0, 1), (1, 0, 1)), EQUAL)
    for env in (cx, cy):
        single = design_soap(env, soap, state_only=True)
        assert single.found
        assert verify_soap(env, single.reward, soap).realized
    joint = design_multi_env([cx, cy], soap, state_only=True)
    assert not joint.found


def test_multi_env_rejects_shape_mismatch():
    cx, _ = make_nonclosed_pair()
    with pytest.raises(StateActionMismatch):
        design_multi_env([cx, make_xor_cmp()], Soap(((0, 0, 0),), EQUAL))
    with pytest.raises(InvalidIndex):
        design_multi_env([], Soap(((0, 0),), EQUAL))


def test_found_reward_zero_at_terminals():
    grid = make_russell_norvig_grid()
    member = tuple(1 if not t else 0 for t in grid.cmp.terminal_mask)
    outcome = design_soap(grid.cmp, Soap((member,), RANGE))
    assert outcome.found
    assert (outcome.reward[grid.cmp.terminal_mask] == 0.0).all()


def test_design_soundness_random_round_trips():
    """Every Found outcome must survive exhaustive verification."""
    found = 0
    for seed in range(60):
        cfg = SamplerConfig(seed=seed, n_states=3, n_actions=3, soap_size=2,
                            soap_mode=RANGE if seed % 2 else EQUAL)
        cmp = sample_cmp(cfg)
        soap = sample_soap(cfg, cmp)
        outcome = design_soap(cmp, soap)
        if outcome.found:
            found += 1
            assert verify_soap(cmp, outcome.reward, soap).realized, seed
    assert found > 0  # the sweep exercised the positive branch


def test_equal_found_implies_range_found():
    for seed in range(40):
        cfg = SamplerConfig(seed=seed, n_states=3, n_actions=2, soap_size=2)
        cmp = sample_cmp(cfg)
        soap = sample_soap(cfg, cmp)
        eq = design_soap(cmp, Soap(soap.good_policies, EQUAL))
        if eq.found:
            assert design_soap(cmp, Soap(soap.good_policies, RANGE)).found, seed


def test_degenerate_soap_terminates_via_perturbation():
    """A large all-zero-rhs instance that once cycled must resolve cleanly."""
    cfg = SamplerConfig(
        seed=int(np.random.SeedSequence([0, 150]).generate_state(1)[0]),
        n_states=4, n_actions=3, soap_size=10)
    cmp = sample_cmp(cfg)
    soap = sample_soap(cfg, cmp)
    outcome = design_soap(cmp, Soap(soap.good_policies, RANGE))
    assert outcome.status in ("found", "unrealizable")
    if outcome.found:
        assert verify_soap(cmp, outcome.reward, Soap(soap.good_policies, RANGE)).realized


def test_diagnostics_present():
    cmp = make_xor_cmp()
    outcome = design_soap(cmp, Soap(((0, 0),), EQUAL))
    d = outcome.diagnostics
    assert d["n_strict"] >= d["n_strict_unique"] >= 1
    assert "lp_iterations" in d and "solve_seconds" in d


def test_lp_dump(tmp_path):
    cmp = make_xor_cmp()
    path = tmp_path / "lp.txt"
    design_soap(cmp, Soap(((0, 0),), EQUAL), dump_path=str(path))
    assert path.read_text().startswith("max ")


def test_decide_expressible_matches_design():
    cmp = make_xor_cmp()
    assert decide_expressible(cmp, Soap(((0, 0),), EQUAL))
    assert not decide_expressible(cmp, Soap(((0, 1), (1, 0)), EQUAL))


# ---------------------------------------------------------------------------
# Binary brute force and the monotone 3-SAT gadget


def test_binary_po_bruteforce_simple():
    cmp = make_xor_cmp()
    po = PolicyOrder((((1, 1), LESS_THAN, (0, 0)),))
    # both policies alternate through the same states, so no state-only
    # reward (binary or otherwise) separates them
    assert not decide_binary_po_bruteforce(cmp, po)


def test_sat_gadget_anchor_values_pinned():
    cmp, po = build_monotone_3sat_instance(2, [(True, (0, 1, 1))])
    sols = binary_po_satisfying_assignments(cmp, po)
    assert sols.shape[0] > 0
    # state 1 is the low anchor, state 2 the high anchor
    assert (sols[:, 1] == 0).all()
    assert (sols[:, 2] == 1).all()
    # literal pairs sum to 1: exactly one of x_v, not-x_v gets reward
    for v in range(2):
        assert (sols[:, 3 + 2 * v] + sols[:, 4 + 2 * v] == 1).all()


def _truth_table_sat(n_vars, clauses):
    for bits in itertools.product((0, 1), repeat=n_vars):
        ok = True
        for is_pos, lits in clauses:
            vals = [bits[v] for v in lits]
            if is_pos and not any(vals):
                ok = False
                break
            if not is_pos and all(vals):
                ok = False
                break
        if ok:
            return True
    return False


def test_sat_gadget_matches_truth_table():
    rng = np.random.default_rng(42)
    for _ in range(12):
        n_vars = int(rng.integers(2, 6))
        n_clauses = int(rng.integers(1, 6))
        clauses = [
            (bool(rng.integers(0, 2)), tuple(int(v) for v in rng.integers(0, n_vars, 3)))
            for _ in range(n_clauses)
        ]
        cmp, po = build_monotone_3sat_instance(n_vars, clauses)
        assert decide_binary_po_bruteforce(cmp, po) == _truth_table_sat(n_vars, clauses)


def test_sat_gadget_rejects_bad_clause():
    with pytest.raises(InvalidIndex):
        build_monotone_3sat_instance(2, [(True, (0, 1))])
    with pytest.raises(InvalidIndex):
        build_monotone_3sat_instance(2, [(True, (0, 1, 5))])
