"""Moment sequences on a half line and their block Hankel machinery.

A :class:`MomentSequence` stores Hermitian q x q moment matrices
s_0, ..., s_m together with the left endpoint alpha of the half line
[alpha, oo).  The module assembles block Hankel matrices, the shifted
Hankel matrices of the right-alpha-shifted sequence, the associated
stacked vectors, Schur-complement ladders, and membership tests for the
four solvability classes (Hankel-nonnegative, Hankel-nonnegative
extendable, Stieltjes-nonnegative, Stieltjes-nonnegative extendable).
"""

from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    DEFAULT_TOL,
    hermitize,
    is_psd,
    mrank,
    pseudo_inverse,
    range_included,
)


class MomentSequence:
    """A finite sequence of Hermitian q x q moment matrices.

    Parameters
    ----------
    alpha : float
        Left endpoint of the half line [alpha, oo).
    q : int
        Matrix size.
    moments : sequence of (q, q) arrays
        The moments s_0, ..., s_m; each must be Hermitian within
        ``tol.tol_herm`` and is symmetrized at load.
    """

    def __init__(self, alpha, q, moments, tol=DEFAULT_TOL):
        if q < 1:
            raise ValueError("q must be a positive integer")
        if len(moments) == 0:
            raise ValueError("at least one moment matrix is required")
        self.alpha = float(alpha)
        self.q = int(q)
        self.tol = tol
        ms = []
        for j, s in enumerate(moments):
            s = np.asarray(s, dtype=complex).reshape(q, q)
            ms.append(hermitize(s, tol, what=f"moment s_{j}"))
        self.moments = ms

    @property
    def m(self):
        """Largest available moment index."""
        return len(self.moments) - 1

    def s(self, j):
        """Moment s_j, with the convention s_{-1} = 0."""
        if j == -1:
            return np.zeros((self.q, self.q), dtype=complex)
        return self.moments[j]

    def __repr__(self):
        return (f"MomentSequence(alpha={self.alpha}, q={self.q}, "
                f"m={self.m})")


def shift_right(seq):
    """Right-alpha-shifted sequence: s_shift_j = -alpha s_j + s_{j+1}."""
    if seq.m < 1:
        raise ValueError("shift_right needs at least two moments")
    shifted = [-seq.alpha * seq.s(j) + seq.s(j + 1) for j in range(seq.m)]
    return MomentSequence(seq.alpha, seq.q, shifted, seq.tol)


def stack_y(seq, lo, hi):
    """Column stack col(s_j)_{j=lo}^{hi} (lo may be -1, giving a zero block)."""
    return np.vstack([seq.s(j) for j in range(lo, hi + 1)])


def stack_z(seq, lo, hi):
    """Row stack row(s_j)_{j=lo}^{hi}."""
    return np.hstack([seq.s(j) for j in range(lo, hi + 1)])


def block_hankel(seq, n, offset=0):
    """Block Hankel matrix [s_{j+k+offset}]_{j,k=0}^{n}."""
    q = seq.q
    H = np.zeros(((n + 1) * q, (n + 1) * q), dtype=complex)
    for j in range(n + 1):
        for k in range(n + 1):
            H[j * q:(j + 1) * q, k * q:(k + 1) * q] = seq.s(j + k + offset)
    return H


@dataclass
class HankelBundle:
    """All Hankel-structured data attached to a sequence at level n.

    Attributes follow the standard notation: H, K, G are the Hankel
    matrices with offsets 0, 1, 2; Hs are the Hankel matrices of the
    shifted sequence; u, w and their fraktur variants ug, wg are the
    stacked couplings of the Ljapunov identities; v and vg select the
    first and last block column; V and Vg are the tall block embeddings
    of size (n+1)q x nq.
    """

    n: int
    q: int
    alpha: float
    H: list = field(default_factory=list)
    K: list = field(default_factory=list)
    G: list = field(default_factory=list)
    Hs: list = field(default_factory=list)
    u: np.ndarray = None
    w: np.ndarray = None
    ug: np.ndarray = None
    wg: np.ndarray = None
    v: np.ndarray = None
    vg: np.ndarray = None
    V: np.ndarray = None
    Vg: np.ndarray = None
    T: np.ndarray = None
    y: object = None
    z: object = None


def shift_matrix(q, n):
    """Block shift T_{q,n} = [delta_{j,k+1} I_q], nilpotent of order n+1."""
    T = np.zeros(((n + 1) * q, (n + 1) * q), dtype=complex)
    for j in range(1, n + 1):
        T[j * q:(j + 1) * q, (j - 1) * q:j * q] = np.eye(q)
    return T


def first_column_embedding(q, n):
    """v_{q,n} = col(delta_{j,0} I_q), the first block column of I."""
    v = np.zeros(((n + 1) * q, q), dtype=complex)
    v[:q, :] = np.eye(q)
    return v


def last_column_embedding(q, n):
    """vg_{q,n} = col(delta_{n-j,0} I_q), the last block column of I."""
    v = np.zeros(((n + 1) * q, q), dtype=complex)
    v[n * q:, :] = np.eye(q)
    return v


def hankel_catalog(seq, n):
    """Assemble the :class:`HankelBundle` at level n.

    Requires 2n <= m; the entries that need moments beyond m (K_n, G_n,
    shifted Hankel Hs_n, fraktur stacks) are produced only when the
    moments are available.
    """
    if 2 * n > seq.m:
        raise ValueError(f"H_{n} needs 2n = {2 * n} <= m = {seq.m}")
    q = seq.q
    b = HankelBundle(n=n, q=q, alpha=seq.alpha)
    kmax_H = seq.m // 2
    kmax_K = (seq.m - 1) // 2
    kmax_G = (seq.m - 2) // 2
    b.H = [block_hankel(seq, k, 0) for k in range(min(n, kmax_H) + 1)]
    b.K = [block_hankel(seq, k, 1) for k in range(min(n, kmax_K) + 1)]
    b.G = [block_hankel(seq, k, 2) for k in range(min(n, kmax_G) + 1)]
    b.Hs = [-seq.alpha * b.H[k] + b.K[k] for k in range(len(b.K))]
    b.u = -stack_y(seq, -1, n - 1)
    b.w = stack_z(seq, -1, n - 1)
    if 2 * n + 1 <= seq.m:
        zero = np.zeros((q, q), dtype=complex)
        b.ug = np.vstack([-stack_y(seq, n + 1, 2 * n), zero]) if n >= 1 \
            else zero.copy()
        b.wg = np.hstack([stack_z(seq, n + 1, 2 * n), zero]) if n >= 1 \
            else zero.copy()
    b.v = first_column_embedding(q, n)
    b.vg = last_column_embedding(q, n)
    eye = np.eye((n + 1) * q, dtype=complex)
    b.V = eye[:, :n * q]
    b.Vg = eye[:, q:]
    b.T = shift_matrix(q, n)
    b.y = lambda lo, hi: stack_y(seq, lo, hi)
    b.z = lambda lo, hi: stack_z(seq, lo, hi)
    return b


@dataclass
class SchurLadder:
    """Schur complement ladders of the plain and shifted Hankel matrices."""

    L: list
    Ls: list


def _ladder(seq, count):
    out = []
    for k in range(count):
        if k == 0:
            out.append(seq.s(0).copy())
        else:
            y = stack_y(seq, k, 2 * k - 1)
            z = stack_z(seq, k, 2 * k - 1)
            H = block_hankel(seq, k - 1, 0)
            out.append(seq.s(2 * k) - z @ pseudo_inverse(H, seq.tol) @ y)
    return out


def schur_ladder(seq):
    """Ladders L_0..L_n and shifted L_s0..L_sn' for all available levels."""
    L = _ladder(seq, seq.m // 2 + 1)
    Ls = _ladder(shift_right(seq), (seq.m - 1) // 2 + 1) if seq.m >= 1 else []
    return SchurLadder(L=L, Ls=Ls)


@dataclass
class ClassReport:
    """Membership of a sequence in the four solvability classes."""

    in_Hgeq: bool
    in_Hgeq_e: bool
    in_Kgeq: bool
    in_Kgeq_e: bool
    witness_extension: np.ndarray = None

    def to_dict(self):
        from .cli import matrix_to_json
        d = {
            "in_Hgeq": bool(self.in_Hgeq),
            "in_Hgeq_e": bool(self.in_Hgeq_e),
            "in_Kgeq": bool(self.in_Kgeq),
            "in_Kgeq_e": bool(self.in_Kgeq_e),
        }
        if self.witness_extension is not None:
            d["witness_extension"] = matrix_to_json(self.witness_extension)
        return d


def _in_Hgeq(seq):
    return all(is_psd(block_hankel(seq, k, 0), seq.tol)
               for k in range(seq.m // 2 + 1))


def _in_Hgeq_e(seq):
    m = seq.m
    if m % 2 == 0:
        n = m // 2
        H = block_hankel(seq, n, 0)
        if not is_psd(H, seq.tol):
            return False
        if n == 0:
            # Both completing moments are free; s_1 = 0 always works.
            return True
        # Extending needs some Hermitian s_{2n+1} with
        # col(s_{n+1}, ..., s_{2n+1}) in the range of H_n.  Splitting the
        # free last block out of the projector equation (I - H H^+) Y = 0
        # leaves an affine solvability condition in s_{2n+1}.
        q = seq.q
        P = np.eye((n + 1) * q, dtype=complex) - \
            block_hankel(seq, n, 0) @ pseudo_inverse(H, seq.tol)
        c = np.vstack([stack_y(seq, n + 1, 2 * n),
                       np.zeros((q, q), dtype=complex)])
        P_last = P[:, n * q:]
        return range_included(P_last, P @ c, seq.tol)
    n = (m - 1) // 2
    H = block_hankel(seq, n, 0)
    if not is_psd(H, seq.tol):
        return False
    y = stack_y(seq, n + 1, 2 * n + 1)
    return range_included(H, y, seq.tol)


def _in_Kgeq(seq):
    m = seq.m
    if not _in_Hgeq(seq):
        return False
    if m == 0:
        return True
    shifted = shift_right(seq)
    if m % 2 == 1:
        n = (m - 1) // 2
        return is_psd(block_hankel(shifted, n, 0), seq.tol)
    n = m // 2
    if n == 0:
        return True
    return is_psd(block_hankel(shifted, n - 1, 0), seq.tol)


def _in_Kgeq_e(seq):
    m = seq.m
    if m == 0:
        return is_psd(seq.s(0), seq.tol)
    shifted = shift_right(seq)
    if m % 2 == 1:
        return _in_Hgeq_e(seq) and _in_Hgeq(shifted)
    return _in_Hgeq(seq) and _in_Hgeq_e(shifted)


def class_membership(seq):
    """Evaluate membership in all four classes and a canonical witness.

    The witness extension is the Schur-complement-zero Hankel extension
    s_{m+1}; it is attached whenever the sequence is Stieltjes-extendable.
    """
    in_H = _in_Hgeq(seq)
    in_He = _in_Hgeq_e(seq)
    in_K = _in_Kgeq(seq)
    in_Ke = _in_Kgeq_e(seq)
    witness = canonical_extension(seq) if (in_Ke and in_He) else None
    return ClassReport(in_Hgeq=in_H, in_Hgeq_e=in_He, in_Kgeq=in_K,
                       in_Kgeq_e=in_Ke, witness_extension=witness)


def canonical_extension(seq):
    """Minimal Hermitian extension s_{m+1} with zero Schur complement.

    Returns s_{m+1} = z_{floor(m/2)+1, m} H^+ y_{floor(m/2)+1, m} with
    H the Hankel matrix of level ceil(m/2) - 1; for m = 0 the empty
    product gives the zero matrix.
    """
    if not _in_Hgeq_e(seq):
        raise ValueError("sequence is not Hankel-extendable")
    m = seq.m
    if m == 0:
        return np.zeros((seq.q, seq.q), dtype=complex)
    lo = m // 2 + 1
    lvl = (m + 1) // 2 - 1
    y = stack_y(seq, lo, m)
    z = stack_z(seq, lo, m)
    H = block_hankel(seq, lvl, 0)
    s_next = z @ pseudo_inverse(H, seq.tol) @ y
    return 0.5 * (s_next + s_next.conj().T)


def extended(seq):
    """New sequence with the canonical extension appended."""
    return MomentSequence(seq.alpha, seq.q,
                         seq.moments + [canonical_extension(seq)], seq.tol)


def dubovoj_candidates(seq, n):
    """Canonical block-diagonal range subspaces at level n.

    Returns the pair (D_n, D_shift_n) built from the Schur ladders of
    the sequence and of its right-alpha-shifted sequence via
    :func:`stieltjesmp.matcore.dubovoj_subspace`.
    """
    from .matcore import dubovoj_subspace
    if 2 * n + 1 > seq.m:
        raise ValueError("dubovoj_candidates needs 2n+1 <= m")
    lad = schur_ladder(seq)
    D = dubovoj_subspace(lad.L[:n + 1], seq.tol)
    Ds = dubovoj_subspace(lad.Ls[:n + 1], seq.tol)
    return D, Ds


def rank_profile(seq):
    """Ranks of the ladder blocks and of the top Hankel matrix."""
    lad = schur_ladder(seq)
    n = seq.m // 2
    H = block_hankel(seq, n, 0)
    return {
        "rank_H": mrank(H, seq.tol),
        "rank_L": [mrank(L, seq.tol) for L in lad.L],
        "rank_Ls": [mrank(L, seq.tol) for L in lad.Ls],
    }
