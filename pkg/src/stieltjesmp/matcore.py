"""Dense complex matrix utilities.

Hermitian/PSD tests, numerical rank, Moore-Penrose and (1,2)-generalized
inverses with prescribed range and null space, orthonormal subspaces with
projectors, and the invariant-subspace machinery used by the Hankel solver
(block-diagonal range subspaces and their compatibility with a nilpotent
shift).

All functions are pure: inputs are never mutated and no module state is
kept, so concurrent use is safe.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used by all numerical predicates.

    Attributes
    ----------
    tol_herm : float
        Hermitian-deviation gate, relative to 1 + norm.
    tol_psd : float
        Allowed negative part of the smallest eigenvalue, relative.
    tol_rank : float
        Singular values below ``tol_rank * sigma_max`` count as zero.
    tol_identity : float
        Residual gate for algebraic identities, relative.
    """

    tol_herm: float = 1e-10
    tol_psd: float = 1e-9
    tol_rank: float = 1e-10
    tol_identity: float = 1e-10

    def __post_init__(self):
        for name in ("tol_herm", "tol_psd", "tol_rank", "tol_identity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(A):
    """Return ``A`` as a 2-d complex ndarray, checking finiteness."""
    M = np.atleast_2d(np.asarray(A, dtype=complex))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def is_hermitian(A, tol=DEFAULT_TOL):
    """True iff ``A`` is square and Hermitian within ``tol.tol_herm``."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        return False
    scale = 1.0 + np.linalg.norm(A)
    return np.linalg.norm(A - A.conj().T) <= tol.tol_herm * scale


def hermitize(A, tol=DEFAULT_TOL, what="matrix"):
    """Symmetrize ``A`` to (A + A*)/2 after passing the Hermitian gate.

    Raises ``ValueError`` when the deviation from Hermitian symmetry
    exceeds ``tol.tol_herm`` relative to the norm.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{what} must be square, got {A.shape}")
    scale = 1.0 + np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > tol.tol_herm * scale:
        raise ValueError(f"{what} is not Hermitian within tolerance")
    return 0.5 * (A + A.conj().T)


def is_psd(A, tol=DEFAULT_TOL):
    """True iff ``A`` is Hermitian and positive semidefinite within tol.

    The test is ``|A - A*| <= tol_herm * (1 + |A|)`` together with
    ``lambda_min((A + A*)/2) >= -tol_psd * (1 + |A|)``.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("is_psd needs a square matrix")
    if A.shape[0] == 0:
        return True
    scale = 1.0 + np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > tol.tol_herm * scale:
        return False
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    return w.min() >= -tol.tol_psd * scale


def mrank(A, tol=DEFAULT_TOL):
    """Numerical rank: number of singular values above tol_rank * sigma_max."""
    A = as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.tol_rank * s[0]))


def pseudo_inverse(A, tol=DEFAULT_TOL):
    """Moore-Penrose inverse with singular values cut at tol_rank * sigma_max."""
    A = as_matrix(A)
    if A.size == 0:
        return A.conj().T.copy()
    return np.linalg.pinv(A, rcond=tol.tol_rank)


def range_included(B, A, tol=DEFAULT_TOL):
    """True iff the column space of ``A`` is contained in that of ``B``.

    Implemented as ``|A - B B^+ A| <= tol_identity * (1 + |A|)``.
    """
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError("range_included needs matching row counts")
    resid = A - B @ (pseudo_inverse(B, tol) @ A)
    return np.linalg.norm(resid) <= tol.tol_identity * (1.0 + np.linalg.norm(A))


class Subspace:
    """A subspace of C^p represented by an orthonormal basis matrix.

    Parameters
    ----------
    ambient_dim : int
        Dimension p of the ambient space.
    basis : array, shape (p, d)
        Matrix with orthonormal columns spanning the subspace; d may be 0.
    """

    def __init__(self, ambient_dim, basis):
        basis = np.asarray(basis, dtype=complex).reshape(ambient_dim, -1)
        if basis.shape[1] > ambient_dim:
            raise ValueError("subspace dimension exceeds ambient dimension")
        gram = basis.conj().T @ basis
        if basis.shape[1] and np.linalg.norm(gram - np.eye(basis.shape[1])) > 1e-8:
            raise ValueError("basis columns are not orthonormal")
        self.ambient_dim = int(ambient_dim)
        self.basis = basis

    @property
    def dim(self):
        return self.basis.shape[1]

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def subspace_from_columns(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the column space of ``M`` via pivoted QR."""
    M = as_matrix(M)
    p = M.shape[0]
    r = mrank(M, tol)
    if r == 0:
        return Subspace(p, np.zeros((p, 0)))
    Q, R, _ = scipy.linalg.qr(M, mode="economic", pivoting=True)
    return Subspace(p, Q[:, :r])


def null_space(A, tol=DEFAULT_TOL):
    """Orthonormal basis of the null space of ``A`` as a Subspace."""
    A = as_matrix(A)
    p = A.shape[1]
    if A.size == 0:
        return Subspace(p, np.eye(p))
    u, s, vh = np.linalg.svd(A)
    r = 0
    if s.size and s[0] > 0.0:
        r = int(np.count_nonzero(s > tol.tol_rank * s[0]))
    return Subspace(p, vh[r:].conj().T)


def projector(U):
    """Orthogonal projector B_U B_U* onto the subspace ``U``."""
    B = U.basis
    if B.shape[1] == 0:
        return np.zeros((U.ambient_dim, U.ambient_dim), dtype=complex)
    return B @ B.conj().T


def one_two_inverse(A, U, tol=DEFAULT_TOL):
    """Reflexive generalized inverse of Hermitian ``A`` with range and
    null space prescribed by the subspace ``U`` and its orthocomplement.

    Returns the unique X with A X A = A, X A X = X, range(X) = U and
    null(X) = U-perp, computed as ``B_U (B_U* A B_U)^{-1} B_U*``.  Valid
    when ``null(A) (+) U = C^p``; this is checked through
    ``dim U == rank A`` and invertibility of the compression.
    """
    A = hermitize(A, tol)
    p = A.shape[0]
    if U.ambient_dim != p:
        raise ValueError("subspace ambient dimension does not match matrix")
    r = mrank(A, tol)
    if U.dim != r:
        raise ValueError(f"dim U = {U.dim} differs from rank A = {r}")
    if r == 0:
        return np.zeros((p, p), dtype=complex)
    B = U.basis
    C = B.conj().T @ A @ B
    s = np.linalg.svd(C, compute_uv=False)
    if s[-1] <= tol.tol_rank * max(s[0], 1.0):
        raise ValueError("direct-sum condition violated: compression singular")
    X = B @ np.linalg.inv(C) @ B.conj().T
    return 0.5 * (X + X.conj().T)


def dubovoj_subspace(L, tol=DEFAULT_TOL):
    """Orthonormal basis of range(diag(L_0, ..., L_n)), built blockwise.

    Each block contributes an orthonormal basis of its own column space,
    embedded into the matching block of C^{(n+1)q}.  The rank cutoff is
    shared across blocks (relative to the largest singular value of the
    whole family), so a block that vanishes up to roundoff relative to
    its siblings contributes nothing.
    """
    blocks = [as_matrix(Lj) for Lj in L]
    q = blocks[0].shape[0]
    for Lj in blocks:
        if Lj.shape != (q, q):
            raise ValueError("all ladder blocks must be square of equal size")
    n1 = len(blocks)
    svds = [np.linalg.svd(Lj) for Lj in blocks]
    smax = max((s[0] for _, s, _ in svds if s.size), default=0.0)
    cutoff = tol.tol_rank * smax
    cols = []
    for j, (U, s, _) in enumerate(svds):
        rj = int(np.count_nonzero(s > cutoff)) if smax > 0.0 else 0
        Bj = U[:, :rj]
        if Bj.shape[1]:
            E = np.zeros((n1 * q, Bj.shape[1]), dtype=complex)
            E[j * q:(j + 1) * q, :] = Bj
            cols.append(E)
    if not cols:
        return Subspace(n1 * q, np.zeros((n1 * q, 0)))
    return Subspace(n1 * q, np.hstack(cols))


def is_dubovoj(D, H, T, tol=DEFAULT_TOL):
    """Check the two defining conditions of an invariant complement.

    True iff T*(D) is contained in D and null(H) (+) D = C^p, checked as
    ``|(I - P_D) T* P_D| <= tol_identity * (1 + |T|)`` plus a dimension
    and full-rank test on the stacked bases.
    """
    H = as_matrix(H)
    T = as_matrix(T)
    p = D.ambient_dim
    if H.shape != (p, p) or T.shape != (p, p):
        raise ValueError("H and T must be square of the ambient dimension")
    P = projector(D)
    invariant = np.linalg.norm((np.eye(p) - P) @ T.conj().T @ P) \
        <= tol.tol_identity * (1.0 + np.linalg.norm(T))
    N = null_space(H, tol)
    if N.dim + D.dim != p:
        return False
    stacked = np.hstack([N.basis, D.basis]) if (N.dim + D.dim) else \
        np.zeros((p, 0))
    direct = (mrank(stacked, tol) == p) if p else True
    return bool(invariant and direct)
