import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenarios import THREE_MIXING
from nuwalk.embedding import (
    ONE_HOT,
    Factor,
    controlled_block,
    controlled_reading_check,
    embed_factor,
    embed_matrix,
    embedded_product,
    restrict,
)
from nuwalk.neutrino import MixingSpec, pmns_matrix

angle = st.floats(-np.pi, np.pi, allow_nan=False)
mixings = st.builds(MixingSpec, angle, angle, angle, angle, angle, angle)
OUTSIDE = [i for i in range(8) if i not in ONE_HOT]


def test_one_hot_indices():
    assert ONE_HOT == (4, 2, 1)
    assert all(bin(i).count("1") == 1 for i in ONE_HOT)


def test_zero_angles_give_identity():
    m = MixingSpec(0, 0, 0)
    for f in Factor:
        assert np.array_equal(embed_factor(f, m).matrix, np.eye(8))
    assert np.array_equal(embedded_product(m), np.eye(8))


def test_u1_entries():
    m = MixingSpec(0.59437, 0, 0)
    u1 = embed_factor(Factor.U1, m).matrix
    c, s = np.cos(0.59437), np.sin(0.59437)
    assert [u1[2, 2], u1[2, 4], u1[4, 2], u1[4, 4]] == [c, -s, s, c]


def test_u2_phase_entries():
    u2 = embed_factor("u2", MixingSpec(0, 0.3, 0, 0.8)).matrix
    assert abs(u2[4, 1] - np.sin(0.3) * np.exp(-0.8j)) < 1e-16
    assert abs(u2[1, 4] + np.sin(0.3) * np.exp(0.8j)) < 1e-16
    assert np.all(embed_factor(Factor.U2, MixingSpec(0, 0.3, 0, 0.0)).matrix.imag == 0)


def test_u0_majorana_phases():
    u0 = embed_factor(Factor.U0, MixingSpec(0, 0, 0, 0, 0.4, 1.0)).matrix
    assert np.allclose(np.diag(u0)[[4, 2, 1]], np.exp([0.2j, 0.5j, 0.0]))


def test_reference_angle_restriction():
    assert np.max(np.abs(restrict(embedded_product(THREE_MIXING)) - pmns_matrix(THREE_MIXING))) < 1e-12


def test_fixed_points():
    m = MixingSpec(0.4, 1.1, -0.3, 0.9)
    u = embedded_product(m)
    for i in (0, 7):
        e = np.zeros(8)
        e[i] = 1
        assert np.array_equal(u @ e, e)


def test_embed_matrix_shape_check():
    with pytest.raises(ValueError):
        embed_matrix(np.eye(2))


@settings(max_examples=100, deadline=None)
@given(mixings)
def test_restriction_identity(m):
    assert np.max(np.abs(restrict(embedded_product(m)) - pmns_matrix(m))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(mixings)
def test_factors_unitary_and_identity_off_subspace(m):
    idx = np.array(ONE_HOT)
    out = np.array(OUTSIDE)
    for f in Factor:
        u = embed_factor(f, m).matrix
        assert np.allclose(u.conj().T @ u, np.eye(8), rtol=0, atol=1e-12)
        assert np.array_equal(u[np.ix_(out, out)], np.eye(5))
        # subspace closure: no leakage between the one-hot block and the rest
        assert np.all(u[np.ix_(idx, out)] == 0) and np.all(u[np.ix_(out, idx)] == 0)


@settings(max_examples=100, deadline=None)
@given(mixings)
def test_controlled_reading(m):
    assert controlled_reading_check(m)


def test_controlled_reading_negative_control():
    m = MixingSpec(0.7, 0.2, 0.3)
    p0 = np.diag([1.0, 0.0])
    wrong = np.kron(controlled_block(-0.7), p0) + np.kron(np.eye(4), np.diag([0.0, 1.0]))
    assert not np.allclose(embed_factor(Factor.U1, m).matrix, wrong)
    assert controlled_reading_check(MixingSpec(0, 0, 0))
