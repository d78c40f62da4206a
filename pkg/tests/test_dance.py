import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choreo.dance import (
    Action,
    AgentConfig,
    DanceSequence,
    apply_actions,
    dance_matrix,
    upsample_nearest,
    upsample_values,
)

from conftest import random_actions

D, S, U = Action.DOWN, Action.STAY, Action.UP


@st.composite
def agents_with_actions(draw):
    k = draw(st.integers(2, 12))
    n = draw(st.integers(1, 30))
    actions = draw(st.lists(st.sampled_from(list(Action)), min_size=n, max_size=n))
    return AgentConfig(k_states=k, n_steps=n), actions


def test_agent_config_defaults_to_middle():
    assert AgentConfig(k_states=20, n_steps=5).start_state == 10
    assert AgentConfig(k_states=7, n_steps=5).start_state == 3
    assert AgentConfig(k_states=20, n_steps=5, start_state=0).start_state == 0


def test_agent_config_validation():
    with pytest.raises(ValueError):
        AgentConfig(k_states=1, n_steps=5)
    with pytest.raises(ValueError):
        AgentConfig(k_states=4, n_steps=0)
    with pytest.raises(ValueError):
        AgentConfig(k_states=4, n_steps=5, start_state=4)


def test_apply_actions_basic():
    seq = apply_actions(AgentConfig(20, 3, 10), [U, U, S])
    assert seq.states == (11, 12, 12)


def test_apply_actions_clamps_at_top():
    seq = apply_actions(AgentConfig(2, 2, 1), [U, U])
    assert seq.states == (1, 1)
    assert seq.actions == (U, U)  # the proposed action is preserved


def test_apply_actions_clamps_at_floor():
    seq = apply_actions(AgentConfig(20, 25, 10), [D] * 25)
    assert seq.states == tuple(list(range(9, -1, -1)) + [0] * 15)


def test_sequence_rejects_inconsistent_states():
    config = AgentConfig(5, 3, 2)
    with pytest.raises(ValueError, match=r"states\[1\]"):
        DanceSequence(actions=(U, U, U), states=(3, 3, 4), config=config)


@settings(max_examples=150, deadline=None)
@given(agents_with_actions())
def test_apply_actions_length_and_bounds(case):
    config, actions = case
    seq = apply_actions(config, actions)
    assert len(seq) == len(actions)
    assert all(0 <= s < config.k_states for s in seq.states)
    again = apply_actions(config, actions)
    assert again.states == seq.states


def test_dance_matrix_state_extremes():
    config = AgentConfig(4, 6, 0)
    seq = apply_actions(config, [U, U, U, D, D, D])  # states 1,2,3,2,1,0
    matrix = dance_matrix(seq, "state").values
    assert matrix[2, 5] == 0.0  # states 3 and 0: farthest apart
    assert matrix[0, 4] == 1.0  # both state 1


def test_dance_matrix_action_indicator():
    seq = apply_actions(AgentConfig(20, 3, 10), [U, U, D])
    matrix = dance_matrix(seq, "action").values
    expected = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=float)
    assert np.array_equal(matrix, expected)


def test_dance_matrix_combined_formula():
    # all-Up walk from 4: states 5..10; entry (0,5) pairs states 5 and 10
    seq = apply_actions(AgentConfig(20, 6, 4), [U] * 6)
    state_entry = 1 - 5 / 19
    assert dance_matrix(seq, "state").values[0, 5] == pytest.approx(state_entry, abs=1e-15)
    combined = dance_matrix(seq, "state_action").values
    assert combined[0, 5] == pytest.approx((state_entry + 1.0) / 2.0, abs=1e-15)


def test_dance_matrix_prefix():
    rng = np.random.default_rng(0)
    config = AgentConfig(10, 20)
    seq = apply_actions(config, random_actions(rng, 20))
    full = dance_matrix(seq, "state").values
    prefix = dance_matrix(seq, "state", prefix_len=7).values
    assert prefix.shape == (7, 7)
    assert np.array_equal(prefix, full[:7, :7])
    with pytest.raises(ValueError):
        dance_matrix(seq, "state", prefix_len=21)
    with pytest.raises(ValueError):
        dance_matrix(seq, "state", prefix_len=0)


def test_dance_matrix_unknown_representation():
    seq = apply_actions(AgentConfig(4, 2), [U, D])
    with pytest.raises(ValueError):
        dance_matrix(seq, "cosine")


@settings(max_examples=150, deadline=None)
@given(agents_with_actions(), st.sampled_from(["state", "action", "state_action"]))
def test_dance_matrix_invariants(case, representation):
    config, actions = case
    seq = apply_actions(config, actions)
    values = dance_matrix(seq, representation).values
    assert np.array_equal(values, values.T)
    assert np.all(np.diag(values) == 1.0)
    assert np.all(values >= 0.0) and np.all(values <= 1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 20), st.integers(1, 15), st.integers(0, 10))
def test_state_matrix_translation_invariance(k, n, shift):
    # same trajectory shape at two heights (no clamping) -> same matrix
    rng = np.random.default_rng(k * 1000 + n * 10 + shift)
    deltas = rng.integers(-1, 2, n)
    walk = np.cumsum(deltas)
    lo, hi = int(walk.min()), int(walk.max())
    base = max(0, -lo)
    k_states = base + shift + max(hi, 0) + 2  # room for both walks, no clamping
    config_a = AgentConfig(k_states, n, start_state=base)
    config_b = AgentConfig(k_states, n, start_state=base + shift)
    actions = [Action(int(d)) for d in deltas]
    a = dance_matrix(apply_actions(config_a, actions), "state").values
    b = dance_matrix(apply_actions(config_b, actions), "state").values
    assert np.array_equal(a, b)


def test_upsample_block_replication():
    a = 0.25
    matrix = dance_matrix(apply_actions(AgentConfig(5, 2, 2), [U, U]), "state")
    values = np.array([[1.0, a], [a, 1.0]])
    up = upsample_values(values, 4)
    expected = np.array(
        [[1, 1, a, a], [1, 1, a, a], [a, a, 1, 1], [a, a, 1, 1]], dtype=float
    )
    assert np.array_equal(up, expected)
    assert np.array_equal(upsample_nearest(matrix, 2), matrix.values)  # identity


def test_upsample_identity_when_sizes_match():
    rng = np.random.default_rng(1)
    seq = apply_actions(AgentConfig(8, 6), random_actions(rng, 6))
    matrix = dance_matrix(seq, "state_action")
    assert np.array_equal(upsample_nearest(matrix, 6), matrix.values)


def test_upsample_mapping_against_brute_force():
    l, target = 3, 431
    values = np.arange(9, dtype=float).reshape(3, 3)
    values = (values + values.T) / 10.0
    np.fill_diagonal(values, 1.0)
    up = upsample_values(values, target)
    mapping = [min(p * l // target, l - 1) for p in range(target)]
    assert mapping[143] == 0 and mapping[144] == 1  # first block boundary
    assert mapping[287] == 1 and mapping[288] == 2
    for p in range(0, target, 37):
        for q in range(0, target, 41):
            assert up[p, q] == values[mapping[p], mapping[q]]


def test_upsample_rejects_shrinking():
    with pytest.raises(ValueError):
        upsample_values(np.eye(4), 3)


@settings(max_examples=100, deadline=None)
@given(agents_with_actions(), st.sampled_from(["state", "action", "state_action"]),
       st.integers(0, 40))
def test_upsample_preserves_structure(case, representation, extra):
    config, actions = case
    seq = apply_actions(config, actions)
    values = dance_matrix(seq, representation).values
    target = len(actions) + extra
    up = upsample_values(values, target)
    assert up.shape == (target, target)
    assert np.array_equal(up, up.T)
    assert np.all(np.diag(up) == 1.0)
    assert set(np.unique(up)) <= set(np.unique(values))  # no invented values
