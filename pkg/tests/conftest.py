"""Shared fixture factories for the test suite.

Moment-sequence fixtures are generated from finitely atomic measures so
that every Hankel positivity property holds by construction and all
integral identities reduce to exact finite sums.
"""

import numpy as np
import pytest

from stieltjesmp import AtomicMeasure, MomentSequence, moments_of


def random_psd(rng, q, rank=None, scale=1.0):
    """Random PSD matrix of the given size and (optional) rank."""
    rank = q if rank is None else rank
    if rank == 0:
        return np.zeros((q, q), dtype=complex)
    A = rng.normal(size=(q, rank)) + 1j * rng.normal(size=(q, rank))
    return scale * (A @ A.conj().T) / rank


def random_hermitian(rng, q, scale=1.0):
    A = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
    return scale * 0.5 * (A + A.conj().T)


def random_hermitian_sequence(rng, q, m, alpha=0.0):
    """A sequence of random Hermitian moments (no positivity imposed)."""
    return MomentSequence(alpha, q, [random_hermitian(rng, q)
                                     for _ in range(m + 1)])


def atomic_fixture(rng, q, n, alpha=0.0, natoms=None, ranks=None,
                   include_endpoint=False):
    """An atomic measure with atoms on [alpha, oo) and its moments.

    With ``natoms >= n + 1`` atoms strictly above alpha and full-rank
    weights the Hankel matrices are positive definite (non-degenerate
    data); fewer atoms, endpoint atoms, or rank-deficient weights give
    degenerate members of the extendable class.
    """
    natoms = natoms if natoms is not None else n + 2
    positions = alpha + np.sort(rng.uniform(0.3, 4.0, size=natoms))
    atoms = []
    for j, t in enumerate(positions):
        rank = None if ranks is None else ranks[j % len(ranks)]
        atoms.append((float(t), random_psd(rng, q, rank)))
    if include_endpoint:
        atoms.append((alpha, random_psd(rng, q)))
    mu = AtomicMeasure(alpha, q, atoms)
    seq = moments_of(mu, 2 * n + 1)
    return mu, seq


def kge_fixtures(count, seed=7):
    """A mixed batch of extendable fixtures: (mu, seq, n) triples.

    Cycles through matrix sizes, levels, endpoints, and degeneracy
    patterns (full-rank, rank-deficient weights, endpoint atoms, too few
    atoms).
    """
    rng = np.random.default_rng(seed)
    out = []
    patterns = [
        dict(),
        dict(ranks=[1]),
        dict(include_endpoint=True),
        dict(natoms=1),
    ]
    sizes = [(1, 0), (1, 1), (2, 0), (2, 1), (3, 1), (2, 2)]
    k = 0
    while len(out) < count:
        q, n = sizes[k % len(sizes)]
        pat = dict(patterns[k % len(patterns)])
        if "ranks" in pat and q == 1:
            pat = dict()
        alpha = [0.0, 0.5, -1.0][k % 3]
        mu, seq = atomic_fixture(rng, q, n, alpha, **pat)
        out.append((mu, seq, n))
        k += 1
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
