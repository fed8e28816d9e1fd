"""Exact maximum-weight linear assignment.

``max_assignment(W)`` finds ``sigma`` maximising ``sum_l W[sigma(l), l]``,
i.e. the permutation matrix ``P_sigma`` with the largest overlap
``<P_sigma, W>``. The optimum is found with the shortest-augmenting-path
Hungarian method on the cost ``max(W) - W``; among all optimal
permutations the lexicographically smallest tuple ``(sigma(0), sigma(1), ...)``
is returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AssignmentResult:
    permutation: tuple  # permutation[l] = sigma(l), a row index
    total_weight: float

    def matrix(self) -> np.ndarray:
        d = len(self.permutation)
        P = np.zeros((d, d))
        P[list(self.permutation), np.arange(d)] = 1.0
        return P


def _hungarian(cost: np.ndarray):
    """Min-cost perfect matching of columns to rows.

    Returns ``(row_of_col, u, v)`` where ``u``/``v`` are row/column dual
    potentials with ``cost[r, c] - u[r] - v[c] >= 0`` and equality on the
    matching.
    """
    n = cost.shape[0]
    INF = np.inf
    # 1-based arrays with a virtual 0 column, as in the classical formulation
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=int)  # match[col] = row
    way = np.zeros(n + 1, dtype=int)
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = cost
    for r in range(1, n + 1):
        match[0] = r
        j0 = 0
        minv = np.full(n + 1, INF)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            cols = np.nonzero(free)[0] + 1
            cur = a[i0, cols] - u[i0] - v[cols]
            better = cur < minv[cols]
            minv[cols[better]] = cur[better]
            way[cols[better]] = j0
            k = np.argmin(minv[cols])
            delta = minv[cols][k]
            j1 = cols[k]
            used_idx = np.nonzero(used)[0]
            u[match[used_idx]] += delta
            v[used_idx] -= delta
            minv[cols] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
            if j0 == 0:
                break
    row_of_col = match[1:] - 1
    # Potentials in the convention cost[r, c] >= u[r] + v[c]
    return row_of_col, u[1:], v[1:]


def _has_perfect_matching(adj: np.ndarray, fixed_rows, fixed_cols) -> bool:
    """Kuhn's augmenting paths on the tight graph with some pairs already fixed."""
    n = adj.shape[0]
    free_rows = [r for r in range(n) if r not in fixed_rows]
    free_cols = [c for c in range(n) if c not in fixed_cols]
    row_set = set(free_rows)
    match_row = {}  # row -> col

    def augment(c, seen):
        for r in np.nonzero(adj[:, c])[0]:
            r = int(r)
            if r not in row_set or r in seen:
                continue
            seen.add(r)
            if r not in match_row or augment(match_row[r], seen):
                match_row[r] = c
                return True
        return False

    for c in free_cols:
        if not augment(c, set()):
            return False
    return True


def _lexicographic_optimum(cost, u, v, row_of_col, tol):
    n = cost.shape[0]
    reduced = cost - u[:, None] - v[None, :]
    tight = reduced <= tol
    # the Hungarian matching is tight by construction; guard against rounding
    tight[row_of_col, np.arange(n)] = True
    perm = []
    fixed_rows = set()
    for c in range(n):
        for r in np.nonzero(tight[:, c])[0]:
            r = int(r)
            if r in fixed_rows:
                continue
            if _has_perfect_matching(tight, fixed_rows | {r}, set(range(c + 1))):
                perm.append(r)
                fixed_rows.add(r)
                break
        else:  # pragma: no cover - the Hungarian matching is always feasible
            return tuple(int(r) for r in row_of_col)
    return tuple(perm)


def total_weight(W, perm) -> float:
    W = np.asarray(W, dtype=float)
    return float(sum(W[perm[l], l] for l in range(len(perm))))


def max_assignment(W) -> AssignmentResult:
    """Permutation ``sigma`` maximising ``sum_l W[sigma(l), l]``.

    Exact, ``O(d^3)`` for the optimum; ties resolve to the lexicographically
    smallest ``sigma``.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 1:
        raise ValueError(f"weight matrix must be square and non-empty, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise ValueError("weight matrix has non-finite entries")
    n = W.shape[0]
    cost = W.max() - W
    row_of_col, u, v = _hungarian(cost)
    scale = max(1.0, float(np.abs(W).max()))
    tol = 64 * n * np.finfo(float).eps * scale
    perm = _lexicographic_optimum(cost, u, v, row_of_col, tol)
    # the canonical pick must not lose weight against the raw Hungarian optimum
    if total_weight(W, perm) < total_weight(W, row_of_col) - tol:  # pragma: no cover
        perm = tuple(int(r) for r in row_of_col)
    return AssignmentResult(perm, total_weight(W, perm))


def brute_force_assignment(W) -> AssignmentResult:
    """Exhaustive search over all ``d!`` permutations in lexicographic order;
    strict improvement keeps the first (smallest) optimum."""
    from itertools import permutations

    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    best = None
    best_w = -np.inf
    cols = np.arange(n)
    for perm in permutations(range(n)):
        w = W[list(perm), cols].sum()
        if w > best_w:
            best, best_w = perm, w
    return AssignmentResult(tuple(best), total_weight(W, best))
