"""Coherence matrix of a unital channel and the CGP measures built on it.

For a channel ``E`` and basis projectors ``P_i``:

* ``gram_matrix``        A_ij = <E(P_i), E(P_j)>
* ``coherence_matrix``   C_ij = <Q_B E(P_i), Q_B E(P_j)> = A(E) - A(D_B E)
* ``transfer_matrix``    X_ij = |<i|U|j>|^2 for a unitary U, with C(U) = I - X^T X

Measures on ``C``: trace norm, operator norm, or any monotone ``p`` via
:func:`cgp_measure`. Measures on ``X``: the permutation distance
``min_sigma ||X - P_sigma||_F^2``. Haar-averaged geometric measures are
given exactly (``cgp_g``, ``cgp_geometric_min``) or by Monte Carlo
(``cgp_geometric_f``).

All functions take the basis ``B`` as an optional argument; when omitted,
the channel's own basis is used, then the computational one.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .assignment import max_assignment
from .channels import Channel, NotUnitaryError, apply, compose, dephasing_channel, tensor
from .opspace import (
    ATOL,
    BasisProjectorSet,
    DimensionError,
    as_square,
    dagger,
    is_bistochastic,
    is_unitary,
    max_eigenvalue,
    permutation_matrix,
    q_part,
)
from .rng import MonteCarloEstimate, haar_states, mc_mean

#: Largest dimension for the two-copy swap protocol (it works on d^2 x d^2 operators).
SWAP_PROTOCOL_MAX_DIM = 16


class CoherenceConsistencyError(RuntimeError):
    """The two independent formulas for the coherence matrix disagree."""


class NotBistochasticError(ValueError):
    pass


def _basis(ch_or_dim, B: BasisProjectorSet | None) -> BasisProjectorSet:
    if B is not None:
        return B
    if isinstance(ch_or_dim, Channel):
        return ch_or_dim.basis or BasisProjectorSet.computational(ch_or_dim.dim)
    return BasisProjectorSet.computational(int(ch_or_dim))


def _frame_kraus(ch: Channel, B: BasisProjectorSet) -> np.ndarray:
    """Kraus operators of ``V^dagger o E o V``, in which ``B`` is computational."""
    if B.dim != ch.dim:
        raise DimensionError(f"basis dim {B.dim} vs channel dim {ch.dim}")
    if B.is_computational:
        return ch.kraus
    V = B.basis_unitary
    return dagger(V)[None] @ ch.kraus @ V[None]


def _images(kraus: np.ndarray) -> np.ndarray:
    """``E(|i><i|)`` for every computational basis index, shape ``(d, d, d)``."""
    return np.einsum("kai,kbi->iab", kraus, kraus.conj())


def _gram(ops: np.ndarray) -> np.ndarray:
    G = np.einsum("iab,jab->ij", ops.conj(), ops)
    imag = np.max(np.abs(G.imag))
    if imag > ATOL:
        raise CoherenceConsistencyError(f"Gram matrix has imaginary part {imag:.3g}; images are not Hermitian")
    G = G.real
    return 0.5 * (G + G.T)


def gram_matrix(ch: Channel, B: BasisProjectorSet | None = None) -> np.ndarray:
    """``A_ij = <E(P_i), E(P_j)>``; symmetric PSD, bi-stochastic for unital ``E``."""
    B = _basis(ch, B)
    return _gram(_images(_frame_kraus(ch, B)))


def swap_operator(d: int) -> np.ndarray:
    """``S|ij> = |ji>`` on C^d (x) C^d with product index ``i*d + j``."""
    S = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    S[(j * d + i).ravel(), (i * d + j).ravel()] = 1.0
    return S


def gram_matrix_swap_protocol(ch: Channel, B: BasisProjectorSet | None = None) -> np.ndarray:
    """Gram matrix via the two-copy protocol ``A_ij = Tr(S (E (x) E)(P_i (x) P_j))``.

    Independent of :func:`gram_matrix`: it never forms ``E(P_i)`` on its own,
    and uses the basis projectors directly rather than a rotated frame.
    """
    B = _basis(ch, B)
    d = ch.dim
    if d > SWAP_PROTOCOL_MAX_DIM:
        raise ValueError(f"swap protocol limited to d <= {SWAP_PROTOCOL_MAX_DIM}, got {d}")
    if B.dim != d:
        raise DimensionError(f"basis dim {B.dim} vs channel dim {d}")
    two_copy = tensor(ch.with_label(""), ch.with_label(""))
    S = swap_operator(d)
    P = B.projectors()
    A = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            out = apply(two_copy, np.kron(P[i], P[j]))
            val = np.trace(S @ out)
            if abs(val.imag) > ATOL:
                raise CoherenceConsistencyError(f"swap expectation has imaginary part {val.imag:.3g}")
            A[i, j] = A[j, i] = val.real
    return A


def coherence_matrix(ch: Channel, B: BasisProjectorSet | None = None, tol: float = 1e-9) -> np.ndarray:
    """Coherence matrix ``C(E) = A(Q_B E) = A(E) - A(D_B E)``.

    Both forms are evaluated; a disagreement beyond ``tol`` raises
    :class:`CoherenceConsistencyError`. The Gram form is returned.
    """
    B = _basis(ch, B)
    kraus = _frame_kraus(ch, B)
    frame = BasisProjectorSet.computational(ch.dim)
    C = _gram(q_part(_images(kraus), frame))

    dephased = compose(dephasing_channel(B), ch)
    C_diff = gram_matrix(ch, B) - gram_matrix(dephased, B)
    err = np.max(np.abs(C - C_diff))
    if err > tol:
        raise CoherenceConsistencyError(f"Gram and difference forms differ by {err:.3g}")
    return C


def transfer_matrix(U, B: BasisProjectorSet | None = None) -> np.ndarray:
    """``X_ij = |<i|U|j>|^2`` in basis ``B``; bi-stochastic."""
    U = as_square(U, "U")
    if not is_unitary(U, ATOL):
        raise NotUnitaryError("transfer matrix needs a unitary")
    B = _basis(U.shape[0], B)
    if not B.is_computational:
        V = B.basis_unitary
        U = dagger(V) @ U @ V
    return np.abs(U) ** 2


def _check_bistochastic(X, tol: float = 1e-8) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if not is_bistochastic(X, tol):
        raise NotBistochasticError("input is not a bi-stochastic matrix")
    return X


def coherence_matrix_unitary(X) -> np.ndarray:
    """``C(U) = I - X^T X`` from the transfer matrix ``X = X(U)``."""
    X = _check_bistochastic(X)
    return np.eye(X.shape[0]) - X.T @ X


def cgp_measure(C, p: Callable[[np.ndarray], float]) -> float:
    """Generic CGP ``p(C)`` for a monotone ``p`` with ``p(0) = 0``.

    If ``p`` is also invariant under permutation similarity the result is
    invariant under pre-processing by incoherent unitaries.
    """
    return float(p(np.asarray(C, dtype=float)))


def cgp_trace_norm(C) -> float:
    """``||C||_1 = Tr C`` (C is PSD); lies in ``[0, d-1]``."""
    return float(np.trace(np.asarray(C, dtype=float)))


def cgp_operator_norm(C) -> float:
    """Largest eigenvalue of ``C``; lies in ``[0, 1]``."""
    return max_eigenvalue(C)


def cgp_permutation_distance(X):
    """``min_sigma ||X - P_sigma||_F^2`` and the minimising ``sigma``.

    Uses ``||X - P_sigma||^2 = ||X||^2 + d - 2 sum_l X[sigma(l), l]``, so the
    minimiser is the maximum-weight assignment on ``X``.
    """
    X = _check_bistochastic(X)
    res = max_assignment(X)
    value = float(np.sum((X - permutation_matrix(res.permutation)) ** 2))
    return value, res.permutation


def cgp_g(ch: Channel, B: BasisProjectorSet | None = None) -> float:
    """Haar-ensemble CGP ``E_psi ||Q_B E D_B(|psi><psi|)||_2^2 = Tr C / (d(d+1))``."""
    C = coherence_matrix(ch, B)
    d = ch.dim
    return cgp_trace_norm(C) / (d * (d + 1))


def cgp_geometric_f(ch: Channel, n_samples: int, seed: int, B: BasisProjectorSet | None = None,
                    workers: int = 1) -> MonteCarloEstimate:
    """Monte-Carlo estimate of ``E_psi ||Q_B U D_B(|psi><psi|)||_2`` over Haar ``psi``.

    The norm is not squared; by concavity the value is at most ``sqrt(cgp_g)``.
    """
    if not ch.is_unitary:
        raise NotUnitaryError("cgp_geometric_f is defined for unitary channels")
    B = _basis(ch, B)
    U = _frame_kraus(ch, B)[0]
    d = ch.dim

    def sample(rng, size):
        p = np.abs(haar_states(rng, size, d)) ** 2
        out = np.einsum("ai,ni,bi->nab", U, p, U.conj())
        idx = np.arange(d)
        out[:, idx, idx] = 0.0
        return np.sqrt(np.sum(np.abs(out) ** 2, axis=(1, 2)))

    return mc_mean(sample, n_samples, seed, workers)


def cgp_geometric_min(U, B: BasisProjectorSet | None = None):
    """Haar-averaged squared distance of ``U D_B`` from the incoherent unitaries.

    ``min_W E_psi ||(W - U) D_B(|psi><psi|)||_2^2`` over ``W = sum eta_i
    |sigma(i)><i|``. On B-diagonal inputs ``W`` acts only through ``sigma``
    (phases cancel), and the Haar average evaluates to
    ``2 (d - sum_l X[sigma(l), l]) / (d (d+1))``, so the minimum is a
    maximum-weight assignment on ``X = X(U)``. Returns ``(value, sigma)``.

    The minimum is taken over unitaries only; it satisfies
    ``cgp_g <= value <= 2 cgp_g``.
    """
    X = transfer_matrix(U, B)
    d = X.shape[0]
    res = max_assignment(X)
    value = max(0.0, 2.0 * (d - res.total_weight) / (d * (d + 1)))
    return value, res.permutation


def geometric_distance_direct(U, W, B: BasisProjectorSet | None = None) -> float:
    """``E_psi ||(W - U) D_B(|psi><psi|)||_2^2`` for given unitaries, by explicit
    operator arithmetic: Gram matrix of ``W P_i W^dagger - U P_i U^dagger``
    contracted with the Haar simplex correlation matrix."""
    U = as_square(U, "U")
    W = as_square(W, "W")
    d = U.shape[0]
    B = _basis(d, B)
    P = B.projectors()
    diffs = np.stack([W @ P[i] @ dagger(W) - U @ P[i] @ dagger(U) for i in range(d)])
    G = np.einsum("iab,jab->ij", diffs.conj(), diffs).real
    S = (np.eye(d) + np.ones((d, d))) / (d * (d + 1))
    return float(np.sum(G * S))


def unitary_channel_measures(U, B: BasisProjectorSet | None = None) -> dict:
    """Deterministic unitary measures in one pass (used by reports)."""
    X = transfer_matrix(U, B)
    C = coherence_matrix_unitary(X)
    tilde, perm = cgp_permutation_distance(X)
    return {"trace": cgp_trace_norm(C), "opnorm": cgp_operator_norm(C), "tilde": tilde, "witness": perm}
