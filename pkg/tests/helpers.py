"""Shared sampling and construction helpers for the test suite."""

import numpy as np

from gpchannels import MubFamily, channel_from_probabilities


def random_cptp_channel(d, rng, fam=None, alpha=1.0):
    """Channel with probabilities drawn from a symmetric Dirichlet."""
    p = rng.dirichlet(np.full(d + 2, alpha))
    return channel_from_probabilities(d, p, fam)


def random_pure(d, rng):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(d, rng, rank=None):
    rank = rank or d
    a = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return a + a.conj().T


def rotated_family(fam, rng):
    """Conjugate every basis vector by one random unitary; stays a valid family."""
    z = rng.standard_normal((fam.d, fam.d)) + 1j * rng.standard_normal((fam.d, fam.d))
    w, _ = np.linalg.qr(z)
    return MubFamily(d=fam.d, bases=fam.bases @ w.T)


def two_qubit_mub_bases():
    """The five unbiased bases of C^4 from commuting two-qubit sign-operator triples.

    Each triple of commuting operators below shares an eigenbasis; taking a
    generic combination with distinct eigenvalue sums splits all degeneracy.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)

    def kk(a, b):
        return np.kron(a, b)

    triples = [
        (kk(sz, eye), kk(eye, sz), kk(sz, sz)),
        (kk(sx, eye), kk(eye, sx), kk(sx, sx)),
        (kk(sy, eye), kk(eye, sy), kk(sy, sy)),
        (kk(sx, sy), kk(sy, sz), kk(sz, sx)),
        (kk(sy, sx), kk(sz, sy), kk(sx, sz)),
    ]
    bases = []
    for a, b, c in triples:
        # eigenvalues of a+2b+4c are the distinct sums +-1 +-2 +-4
        _, v = np.linalg.eigh(a + 2 * b + 4 * c)
        bases.append(v.T.copy())  # rows are the eigenvector kets
    return np.array(bases)
