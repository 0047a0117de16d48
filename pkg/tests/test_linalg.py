import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpchannels.errors import NotHermitianError
from gpchannels.linalg import (
    dagger,
    hermitian_eigensystem,
    is_psd,
    kron,
    kron_all,
    unvec,
    vec,
)
from helpers import random_hermitian

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_kron_identity_cases():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(np.diag([1.0, 0.0]), np.eye(2)), np.diag([1.0, 1.0, 0.0, 0.0]))


def test_kron_sigma_z_pair_fixes_00():
    v00 = np.array([1, 0, 0, 0], dtype=complex)
    assert np.allclose(kron(SZ, SZ) @ v00, v00)


def test_kron_all_matches_canonical_left_fold_bitwise(rng):
    mats = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3)]
    manual = np.kron(np.kron(mats[0], mats[1]), mats[2])
    assert np.array_equal(kron_all(*mats), manual)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kron_associative_within_tolerance(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3))
    left = kron(kron(a, b), c)
    right = kron(a, kron(b, c))
    assert np.max(np.abs(left - right)) <= 1e-12 * max(1.0, np.max(np.abs(left)))


def test_eigensystem_diagonal_sorted_descending():
    w, v = hermitian_eigensystem(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [3.0, 2.0, 1.0])
    recon = v @ np.diag(w) @ dagger(v)
    assert np.max(np.abs(recon - np.diag([3.0, 1.0, 2.0]))) <= 1e-10


def test_eigensystem_sigma_x():
    w, v = hermitian_eigensystem(SX)
    assert np.allclose(w, [1.0, -1.0])
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(np.vdot(v[:, 0], plus)) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(v[:, 1], minus)) == pytest.approx(1.0, abs=1e-12)


def test_eigensystem_random_9x9_reconstruction(rng):
    h = random_hermitian(9, rng)
    w, v = hermitian_eigensystem(h)
    assert np.max(np.abs(dagger(v) @ v - np.eye(9))) <= 1e-10
    assert np.max(np.abs(v @ np.diag(w) @ dagger(v) - h)) <= 1e-10
    assert abs(np.sum(w) - np.trace(h).real) <= 1e-10
    assert np.all(np.diff(w) <= 0)


def test_eigensystem_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHermitianError):
        is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_is_psd_cases():
    assert is_psd(np.eye(4), tol=1e-10)
    assert not is_psd(np.diag([1.0, -0.5]), tol=1e-10)
    assert is_psd(np.diag([1.0, -5e-11]), tol=1e-10)


def test_unitary_gram_has_unit_eigenvalues(fam5):
    u = fam5.unitaries()[3, 2]
    w, _ = hermitian_eigensystem(dagger(u) @ u)
    assert np.max(np.abs(w - 1.0)) <= 1e-10


def test_vec_unvec_column_stacking():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(vec(a), [1.0, 3.0, 2.0, 4.0])
    assert np.array_equal(unvec(vec(a)), a)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_vec_intertwines_left_right_products(seed, d):
    rng = np.random.default_rng(seed)
    a, x, b = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(3))
    lhs = vec(a @ x @ b)
    rhs = kron(b.T, a) @ vec(x)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(lhs)))
