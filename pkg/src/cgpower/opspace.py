"""Operator-space primitives: Hilbert-Schmidt geometry, basis projectors and
the dephasing superoperator.

Matrices are plain numpy arrays. Complex ``(d, d)`` arrays carry states,
unitaries and Kraus operators; real arrays carry the Gram, coherence,
transfer and simplex correlation matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Absolute tolerance for unitarity / hermiticity / PSD checks.
ATOL = 1e-10


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def as_square(M, name="matrix", dtype=complex) -> np.ndarray:
    M = np.asarray(M, dtype=dtype)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    return M


def _same_dim(X: np.ndarray, Y: np.ndarray) -> None:
    if X.shape != Y.shape:
        raise DimensionError(f"dimension mismatch: {X.shape} vs {Y.shape}")


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def hs_inner(X, Y) -> complex:
    """Hilbert-Schmidt scalar product ``Tr(X^dagger Y)``."""
    X = as_square(X, "X")
    Y = as_square(Y, "Y")
    _same_dim(X, Y)
    return complex(np.vdot(X, Y))


def hs_norm(X) -> float:
    X = np.asarray(X)
    return float(np.sqrt(np.sum(np.abs(X) ** 2)))


def is_hermitian(M, tol: float = ATOL) -> bool:
    M = as_square(M)
    return hs_norm(M - dagger(M)) <= tol


def is_unitary(M, tol: float = ATOL) -> bool:
    M = as_square(M)
    return hs_norm(dagger(M) @ M - np.eye(M.shape[0])) <= tol


@dataclass(frozen=True)
class BasisProjectorSet:
    """Orthonormal basis ``B`` given by the columns of ``basis_unitary``.

    ``projector(i)`` is ``V |i><i| V^dagger``; the identity unitary gives the
    computational basis.
    """

    basis_unitary: np.ndarray
    tol: float = field(default=ATOL, compare=False)

    def __post_init__(self):
        V = as_square(self.basis_unitary, "basis_unitary")
        if not is_unitary(V, self.tol):
            raise ValueError("basis_unitary is not unitary to tolerance")
        V.setflags(write=False)
        object.__setattr__(self, "basis_unitary", V)

    @classmethod
    def computational(cls, d: int) -> "BasisProjectorSet":
        if d < 1:
            raise ValueError("dimension must be >= 1")
        return cls(np.eye(d, dtype=complex))

    @property
    def dim(self) -> int:
        return self.basis_unitary.shape[0]

    @property
    def is_computational(self) -> bool:
        return bool(np.array_equal(self.basis_unitary, np.eye(self.dim)))

    def vector(self, i: int) -> np.ndarray:
        return self.basis_unitary[:, i]

    def projector(self, i: int) -> np.ndarray:
        v = self.vector(i)
        return np.outer(v, v.conj())

    def projectors(self) -> np.ndarray:
        """All projectors stacked into a ``(d, d, d)`` array."""
        V = self.basis_unitary
        return np.einsum("ai,bi->iab", V, V.conj())

    def to_frame(self, X) -> np.ndarray:
        """Express ``X`` in the frame where ``B`` is the computational basis."""
        V = self.basis_unitary
        return dagger(V) @ np.asarray(X) @ V


def _check_basis(X: np.ndarray, B: BasisProjectorSet) -> None:
    if X.shape[-1] != B.dim:
        raise DimensionError(f"operator of dim {X.shape[-1]} vs basis of dim {B.dim}")


def dephase(X, B: BasisProjectorSet) -> np.ndarray:
    """``D_B(X) = sum_i P_i X P_i``.

    Accepts a single ``(d, d)`` operator or a stack ``(..., d, d)``.
    """
    X = np.asarray(X, dtype=complex)
    _check_basis(X, B)
    if B.is_computational:
        out = np.zeros_like(X)
        idx = np.arange(B.dim)
        out[..., idx, idx] = X[..., idx, idx]
        return out
    V = B.basis_unitary
    Y = dagger(V) @ X @ V
    diag = np.einsum("...ii->...i", Y)
    return np.einsum("ai,...i,bi->...ab", V, diag, V.conj())


def q_part(X, B: BasisProjectorSet) -> np.ndarray:
    """``Q_B(X) = X - D_B(X)``, the coherent (off-diagonal) part of ``X``."""
    X = np.asarray(X, dtype=complex)
    return X - dephase(X, B)


class NotSymmetricError(ValueError):
    pass


def symmetric_eigs(M, tol: float = ATOL, max_sweeps: int = 100):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as the columns of an orthogonal matrix,
    so that ``M = V @ diag(w) @ V.T``.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if np.max(np.abs(A - A.T)) > tol:
        raise NotSymmetricError("matrix is not symmetric to tolerance")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.sqrt(np.sum(A * A))
    if n == 1 or scale == 0.0:
        return np.diag(A).copy(), V

    threshold = (np.finfo(float).eps * scale) ** 2
    upper = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = np.sum(A[upper] ** 2)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                # Rutishauser's stable rotation angle
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def max_eigenvalue(M, tol: float = ATOL) -> float:
    return float(symmetric_eigs(M, tol)[0][0])


def min_eigenvalue(M, tol: float = ATOL) -> float:
    return float(symmetric_eigs(M, tol)[0][-1])


def is_psd(M, tol: float = ATOL) -> bool:
    return min_eigenvalue(M, tol=max(tol, ATOL)) >= -tol


def permutation_matrix(perm) -> np.ndarray:
    """``P_sigma = sum_l |sigma(l)><l|`` for ``perm[l] = sigma(l)``."""
    perm = np.asarray(perm, dtype=int)
    d = perm.size
    P = np.zeros((d, d))
    P[perm, np.arange(d)] = 1.0
    return P


def is_permutation(perm, d: int | None = None) -> bool:
    perm = list(perm)
    n = len(perm) if d is None else d
    return len(perm) == n and sorted(int(p) for p in perm) == list(range(n))


def phi_plus(d: int) -> np.ndarray:
    return np.full(d, 1.0 / np.sqrt(d))


def is_bistochastic(X, tol: float = 1e-8) -> bool:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        return False
    return bool(
        np.all(X >= -tol)
        and np.allclose(X.sum(axis=0), 1.0, rtol=0, atol=tol)
        and np.allclose(X.sum(axis=1), 1.0, rtol=0, atol=tol)
    )
