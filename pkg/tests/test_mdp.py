"""CMP representation, validation, fixture environments, and JSON round trips."""
import numpy as np
import pytest

from rewarddesign.errors import (
    InvalidDiscount,
    InvalidDistribution,
    InvalidIndex,
    InvalidProbability,
)
from rewarddesign.mdp import (
    BUILTIN_ENVS,
    Cmp,
    Mdp,
    builtin_cmp,
    cmp_from_json,
    cmp_to_json,
    make_nonclosed_pair,
    make_russell_norvig_grid,
    make_steady_state_cmp,
    make_xor_cmp,
    validate_cmp,
    validate_policy,
)


def test_xor_cmp_alternates():
    cmp = make_xor_cmp()
    validate_cmp(cmp)
    assert cmp.transition[0, 0, 1] == 1.0
    assert cmp.transition[0, 1, 1] == 1.0
    assert cmp.transition[1, 0, 0] == 1.0
    assert cmp.transition[1, 1, 0] == 1.0


def test_steady_state_cmp_self_loops():
    cmp = make_steady_state_cmp()
    validate_cmp(cmp)
    assert cmp.transition[0, 0, 0] == 1.0
    assert cmp.transition[0, 1, 0] == 1.0
    # s1 unreachable from s0
    assert cmp.transition[0, :, 1].sum() == 0.0


def test_nonclosed_pair_mirrors_actions():
    cx, cy = make_nonclosed_pair()
    validate_cmp(cx)
    validate_cmp(cy)
    # same start fan-out, opposite action roles downstream
    assert np.allclose(cx.transition[0], cy.transition[0])
    assert np.allclose(cx.transition[1, 0], cy.transition[1, 1])
    assert np.allclose(cx.transition[2, 1], cy.transition[2, 0])


def test_grid_structure():
    grid = make_russell_norvig_grid(slip=0.35)
    cmp = grid.cmp
    validate_cmp(cmp)
    assert cmp.n_states == 11  # 3 x 4 minus the wall
    assert cmp.n_actions == 4
    assert cmp.terminal_mask.sum() == 2
    assert cmp.terminal_mask[grid.goal_state]
    assert cmp.terminal_mask[grid.fire_state]
    assert cmp.start_state == grid.cell_to_state[(0, 0)]
    # intended move mass 0.65, orthogonal slips 0.175 each: moving right
    # from (2, 0) lands in (2, 1) with 0.65 and slips down to (1, 0)
    s = grid.cell_to_state[(2, 0)]
    assert cmp.transition[s, 1, grid.cell_to_state[(2, 1)]] == pytest.approx(0.65)
    assert cmp.transition[s, 1, grid.cell_to_state[(1, 0)]] == pytest.approx(0.175)


def test_grid_goal_reward_entry_bonus():
    grid = make_russell_norvig_grid()
    r = grid.goal_reward()
    cmp = grid.cmp
    # acting toward the goal from (2, 2) pays the entry probability
    s = grid.cell_to_state[(2, 2)]
    assert r[s, 1] == pytest.approx(cmp.transition[s, 1, grid.goal_state])
    # terminal rows stay zero so the bonus is collected exactly once
    assert (r[cmp.terminal_mask] == 0.0).all()
    # stepping into fire costs its entry probability
    s = grid.cell_to_state[(0, 3)]
    assert r[s, 0] == pytest.approx(-cmp.transition[s, 0, grid.fire_state])


def test_grid_rejects_bad_slip():
    with pytest.raises(InvalidProbability):
        make_russell_norvig_grid(slip=1.0)


def test_validate_rejects_bad_gamma():
    cmp = Cmp(2, 2, make_xor_cmp().transition, gamma=1.0)
    with pytest.raises(InvalidDiscount):
        validate_cmp(cmp)


def test_validate_rejects_non_stochastic_row():
    t = np.zeros((2, 2, 2))
    t[0, 0, 0] = 0.5  # row sums to 0.5
    t[0, 1, 0] = 1.0
    t[1, :, 1] = 1.0
    with pytest.raises(InvalidDistribution):
        validate_cmp(Cmp(2, 2, t, 0.9))


def test_validate_rejects_non_absorbing_terminal():
    t = np.zeros((2, 2, 2))
    t[0, :, 1] = 1.0
    t[1, :, 0] = 1.0  # flagged terminal but escapes
    mask = np.array([False, True])
    with pytest.raises(InvalidDistribution):
        validate_cmp(Cmp(2, 2, t, 0.9, 0, mask))


def test_validate_policy_bounds():
    cmp = make_xor_cmp()
    validate_policy(cmp, (0, 1))
    with pytest.raises(InvalidIndex):
        validate_policy(cmp, (0, 2))
    with pytest.raises(InvalidIndex):
        validate_policy(cmp, (0,))


def test_mdp_reward_shape_checked():
    cmp = make_xor_cmp()
    Mdp(cmp, np.zeros((2, 2)))
    with pytest.raises(InvalidIndex):
        Mdp(cmp, np.zeros((2, 3)))


def test_transition_tensor_is_read_only():
    cmp = make_xor_cmp()
    with pytest.raises(ValueError):
        cmp.transition[0, 0, 0] = 0.5


def test_json_round_trip_all_builtins():
    for name in BUILTIN_ENVS:
        cmp = builtin_cmp(name)
        back = cmp_from_json(cmp_to_json(cmp))
        assert back.n_states == cmp.n_states
        assert back.n_actions == cmp.n_actions
        assert back.gamma == cmp.gamma
        assert back.start_state == cmp.start_state
        assert (back.terminal_mask == cmp.terminal_mask).all()
        assert np.array_equal(back.transition, cmp.transition)


def test_unknown_builtin_rejected():
    with pytest.raises(InvalidIndex):
        builtin_cmp("nope")
