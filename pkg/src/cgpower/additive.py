"""Additive CGP measures of unitaries, functions of the transfer matrix ``X(U)``.

Since ``X(U_A (x) U_B) = X(U_A) (x) X(U_B)``, each measure here satisfies
``phi(U_A (x) U_B) = phi(U_A) + phi(U_B)``. All vanish on permutation
matrices and reach their maximum on ``X = J/d``.
"""
from __future__ import annotations

import numpy as np

from .coherence import _check_bistochastic

#: ``|det X|`` below this is reported as zero (phi_g = +inf).
DET_FLOOR = 1e-300
#: Entries at or below this count as outside the support for alpha = 0.
SUPPORT_THRESHOLD = 1e-12
#: Orders closer than this to 1 use the Shannon formula.
SHANNON_BAND = 1e-9


def column_distributions(X) -> np.ndarray:
    """Columns ``p_i = X e_i`` as rows of the result, noise-level negatives clamped."""
    X = _check_bistochastic(X)
    P = X.T.copy()
    if np.any(P < -1e-12):
        raise ValueError("transfer matrix has negative entries")
    P[P < 0] = 0.0
    return P


def phi_p(X) -> float:
    """``-log(||X||_F^2 / d)``, in ``[0, log d]``."""
    X = _check_bistochastic(X)
    d = X.shape[0]
    return max(0.0, -float(np.log(np.sum(X * X) / d)))


def log_abs_det(X) -> tuple[float, bool]:
    """``(log|det X|, singular)`` from an LU factorisation.

    ``singular`` is set when ``|det X| < DET_FLOOR`` or when the smallest
    singular value is at rounding level (``d * eps * ||X||_2``), where the
    computed determinant is noise.
    """
    X = np.asarray(X, dtype=float)
    sign, logdet = np.linalg.slogdet(X)
    if sign == 0 or logdet < np.log(DET_FLOOR):
        return -np.inf, True
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= X.shape[0] * np.finfo(float).eps * s[0]:
        return -np.inf, True
    return float(logdet), False


def phi_g(X) -> float:
    """``-(1/d) log|det X|`` in ``[0, inf]``; ``inf`` for a singular ``X``."""
    X = _check_bistochastic(X)
    logdet, singular = log_abs_det(X)
    if singular:
        return np.inf
    return max(0.0, -logdet / X.shape[0])


def _plogp_sum(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log(p), 0.0)
    return t.sum(axis=-1)


def phi_g_tilde(X) -> float:
    """Mean Shannon entropy of the columns, ``-(1/d) sum_ij X_ij log X_ij``."""
    P = column_distributions(X)
    return max(0.0, -float(np.mean(_plogp_sum(P))))


def renyi_entropy(p, alpha: float) -> float:
    """``S_alpha(p) = log(sum p^alpha) / (1 - alpha)`` (natural log).

    ``alpha = 0`` is the log of the support size, ``alpha -> 1`` the
    Shannon entropy.
    """
    p = np.asarray(p, dtype=float)
    return float(_renyi_rows(p[None, :], alpha)[0])


def _renyi_rows(P: np.ndarray, alpha: float) -> np.ndarray:
    if abs(alpha - 1.0) < SHANNON_BAND:
        return -_plogp_sum(P)
    if alpha == 0.0:
        return np.log(np.sum(P > SUPPORT_THRESHOLD, axis=-1))
    with np.errstate(divide="ignore"):
        powered = np.where(P > 0, P ** alpha, 0.0)
    return np.log(powered.sum(axis=-1)) / (1.0 - alpha)


def phi_alpha(X, alpha: float) -> float:
    """Mean Renyi-``alpha`` entropy of the columns of ``X``, ``alpha`` in ``[0, 2]``."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must lie in [0, 2], got {alpha}")
    P = column_distributions(X)
    return max(0.0, float(np.mean(_renyi_rows(P, alpha))))


def phi_2(X) -> float:
    return phi_alpha(X, 2.0)
