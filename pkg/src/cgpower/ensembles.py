"""Simplex correlation matrices and ensemble-averaged CGP.

An input ensemble ``mu`` of incoherent states ``rho = sum_i p_i P_i`` enters
the CGP only through its second moments ``S_ij = E_mu[p_i p_j]``; the
ensemble CGP of a channel is ``<C(E), S(mu)>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import Channel, SchemaError, apply
from .coherence import _basis
from .opspace import BasisProjectorSet, DimensionError, dephase, min_eigenvalue, max_eigenvalue, q_part, symmetric_eigs
from .rng import MonteCarloEstimate, haar_states, make_rng, mc_mean, chunks

SCM_KINDS = ("haar", "vertex", "perm_invariant", "dirichlet", "empirical")


@dataclass(frozen=True, eq=False)
class SimplexCorrelationMatrix:
    """Second-moment matrix ``E_mu[p_i p_j]`` of a measure on the simplex.

    ``kind`` records how it was built; empirical ones carry ``n_samples`` and
    the entrywise standard errors ``std_error``.
    """

    entries: np.ndarray
    kind: str = "empirical"
    alpha: float | None = None
    params: tuple | None = None
    n_samples: int | None = None
    seed: int | None = None
    std_error: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        S = np.array(self.entries, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] < 1:
            raise DimensionError(f"SCM must be square, got shape {S.shape}")
        if self.kind not in SCM_KINDS:
            raise ValueError(f"unknown SCM kind {self.kind!r}")
        S.setflags(write=False)
        object.__setattr__(self, "entries", S)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def provenance(self) -> str:
        if self.kind == "perm_invariant":
            return f"perm_invariant({self.alpha!r})"
        if self.kind == "dirichlet":
            return f"dirichlet({list(self.params)!r}, n={self.n_samples}, seed={self.seed})"
        if self.kind == "empirical" and self.n_samples is not None:
            return f"empirical(n={self.n_samples})"
        return self.kind

    def eigenvalues(self) -> np.ndarray:
        return symmetric_eigs(self.entries, tol=1e-9)[0]

    @property
    def s_max(self) -> float:
        return max_eigenvalue(self.entries, tol=1e-9)

    @property
    def s_min(self) -> float:
        return min_eigenvalue(self.entries, tol=1e-9)

    def violations(self) -> dict:
        """Deviation from symmetry, positivity and unit entry sum."""
        S = self.entries
        return {
            "symmetry": float(np.max(np.abs(S - S.T))),
            "psd": max(0.0, -float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])),
            "sum": abs(float(S.sum()) - 1.0),
        }

    def is_valid(self, sym_tol: float = 1e-9, psd_tol: float = 1e-9, sum_tol: float = 1e-8) -> bool:
        v = self.violations()
        return v["symmetry"] <= sym_tol and v["psd"] <= psd_tol and v["sum"] <= sum_tol


def scm_haar(d: int) -> SimplexCorrelationMatrix:
    """Uniform measure on the simplex: ``S_ij = (1 + delta_ij) / (d(d+1))``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    S = (np.eye(d) + np.ones((d, d))) / (d * (d + 1))
    return SimplexCorrelationMatrix(S, "haar")


def scm_vertex(d: int) -> SimplexCorrelationMatrix:
    """Measure spread evenly on the vertices ``e_i``: ``S = I / d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return SimplexCorrelationMatrix(np.eye(d) / d, "vertex")


def scm_perm_invariant(d: int, alpha: float) -> SimplexCorrelationMatrix:
    """Permutation-invariant SCM ``alpha I + (1/d - alpha) |phi+><phi+|``, ``0 <= alpha <= 1/d``.

    ``alpha = 1/(d(d+1))`` is the Haar case, ``alpha = 1/d`` the vertex
    measure and ``alpha = 0`` the measure concentrated on ``I/d``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    alpha = float(alpha)
    if not (0.0 <= alpha <= 1.0 / d + 1e-15):
        raise ValueError(f"alpha must lie in [0, 1/d] = [0, {1.0 / d}], got {alpha}")
    beta = 1.0 / d - alpha
    S = alpha * np.eye(d) + beta * np.ones((d, d)) / d
    return SimplexCorrelationMatrix(S, "perm_invariant", alpha=alpha)


def _empirical_moments(samples_fn, d, n_samples, seed):
    """Streaming mean and entrywise standard error of ``p p^T``."""
    total = np.zeros((d, d))
    total_sq = np.zeros((d, d))
    for stream, size in chunks(n_samples):
        p = samples_fn(make_rng(seed, stream), size)
        outer = p[:, :, None] * p[:, None, :]
        total += outer.sum(axis=0)
        total_sq += (outer ** 2).sum(axis=0)
    mean = total / n_samples
    if n_samples > 1:
        var = np.maximum(total_sq / n_samples - mean ** 2, 0.0) * n_samples / (n_samples - 1)
        se = np.sqrt(var / n_samples)
    else:
        se = np.zeros((d, d))
    return 0.5 * (mean + mean.T), se


def sample_dirichlet(rng: np.random.Generator, size: int, params) -> np.ndarray:
    """Dirichlet draws; zero parameters pin their coordinate to 0, and a
    single positive parameter degenerates to the matching vertex."""
    params = np.asarray(params, dtype=float)
    support = np.nonzero(params > 0)[0]
    p = np.zeros((size, params.size))
    if support.size == 1:
        p[:, support[0]] = 1.0
    else:
        p[:, support] = rng.dirichlet(params[support], size)
    return p


def sample_vertices(rng: np.random.Generator, size: int, d: int) -> np.ndarray:
    """Uniformly chosen vertices ``e_i`` of the simplex."""
    p = np.zeros((size, d))
    p[np.arange(size), rng.integers(0, d, size)] = 1.0
    return p


def scm_dirichlet_mc(d: int, params, n_samples: int, seed: int) -> SimplexCorrelationMatrix:
    """Empirical SCM from ``n_samples`` Dirichlet(``params``) draws.

    Flat parameters give the uniform (Haar-induced) measure on the simplex.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (d,):
        raise ValueError(f"need {d} Dirichlet parameters, got {params.size}")
    if np.any(params < 0) or not np.any(params > 0) or not np.all(np.isfinite(params)):
        raise ValueError("Dirichlet parameters must be non-negative and not all zero")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    S, se = _empirical_moments(lambda rng, size: sample_dirichlet(rng, size, params), d, n_samples, seed)
    return SimplexCorrelationMatrix(S, "dirichlet", params=tuple(float(x) for x in params),
                                    n_samples=int(n_samples), seed=int(seed), std_error=se)


def scm_empirical(samples) -> SimplexCorrelationMatrix:
    """SCM of explicit simplex points, one per row."""
    p = np.asarray(samples, dtype=float)
    if p.ndim != 2:
        raise ValueError("samples must be a 2-d array of probability vectors")
    if np.any(p < -1e-12) or not np.allclose(p.sum(axis=1), 1.0, atol=1e-10):
        raise ValueError("every sample must be a probability vector")
    n, d = p.shape
    outer = p[:, :, None] * p[:, None, :]
    mean = outer.mean(axis=0)
    se = outer.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros((d, d))
    return SimplexCorrelationMatrix(0.5 * (mean + mean.T), "empirical", n_samples=n, std_error=se)


def cgp_ensemble(C, S: SimplexCorrelationMatrix) -> float:
    """``C_{B,mu}(E) = <C(E), S(mu)> = sum_ij C_ij S_ij``."""
    C = np.asarray(C, dtype=float)
    if C.shape != S.entries.shape:
        raise DimensionError(f"coherence matrix {C.shape} vs SCM {S.entries.shape}")
    return float(np.sum(C * S.entries))


def scm_conjugate(S: SimplexCorrelationMatrix, sigma) -> SimplexCorrelationMatrix:
    """``P_sigma S P_sigma^T``, the SCM of the pushed-forward measure."""
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != S.dim or sorted(sigma) != list(range(S.dim)):
        raise DimensionError(f"{sigma!r} is not a permutation of 0..{S.dim - 1}")
    inv = np.argsort(sigma)
    # (P S P^T)_{ij} = S_{sigma^-1(i), sigma^-1(j)}
    out = S.entries[np.ix_(inv, inv)]
    se = None if S.std_error is None else S.std_error[np.ix_(inv, inv)]
    return SimplexCorrelationMatrix(out, S.kind, S.alpha, S.params, S.n_samples, S.seed, se)


def commutes_with_permutations(S: SimplexCorrelationMatrix, tol: float = 1e-9) -> bool:
    """``[S, P_sigma] = 0`` for all sigma, checked on the generators
    (adjacent transpositions and the d-cycle)."""
    d = S.dim
    gens = [tuple(range(k)) + (k + 1, k) + tuple(range(k + 2, d)) for k in range(d - 1)]
    gens.append(tuple((i + 1) % d for i in range(d)))
    return all(np.max(np.abs(scm_conjugate(S, g).entries - S.entries)) <= tol for g in gens)


def perm_invariant_decomposition(S: SimplexCorrelationMatrix):
    """Project ``S`` onto ``span{I, |phi+><phi+|}``.

    Returns ``(alpha, beta, residual)`` with ``S ~ alpha I + beta |phi+><phi+|``
    and ``residual`` the max-abs reconstruction error.
    """
    d = S.dim
    M = S.entries
    J = np.ones((d, d)) / d
    if d == 1:
        return 0.0, float(M[0, 0]), 0.0
    # Orthogonal basis: I - J and J (HS-orthogonal since J is a projector)
    alpha = float(np.sum(M * (np.eye(d) - J)) / (d - 1))
    beta = float(np.sum(M * J)) - alpha
    residual = float(np.max(np.abs(M - alpha * np.eye(d) - beta * J)))
    return alpha, beta, residual


# -- qubit case ---------------------------------------------------------------

def qubit_alpha_to_perm_invariant(alpha_qubit: float) -> float:
    """The qubit closed form writes ``S = alpha I + beta sigma_x`` with
    ``alpha = E[p^2]``; the permutation-invariant family uses
    ``alpha' = E[p_i^2] - E[p_1 p_2] = 2 alpha - 1/2``."""
    return 2.0 * alpha_qubit - 0.5


def scm_qubit(alpha_qubit: float) -> SimplexCorrelationMatrix:
    """Qubit SCM ``alpha I + (1/2 - alpha) sigma_x`` for ``1/4 <= alpha <= 1/2``."""
    if not (0.25 - 1e-15 <= alpha_qubit <= 0.5 + 1e-15):
        raise ValueError(f"qubit alpha must lie in [1/4, 1/2], got {alpha_qubit}")
    beta = 0.5 - alpha_qubit
    S = np.array([[alpha_qubit, beta], [beta, alpha_qubit]])
    return SimplexCorrelationMatrix(S, "perm_invariant", alpha=qubit_alpha_to_perm_invariant(alpha_qubit))


def cgp_qubit_symmetric(a: complex, b: complex, alpha: float) -> float:
    """Closed-form qubit ensemble CGP ``(2 alpha - 1/2) (2 |a| |b|)^2``.

    ``alpha = E[p^2]`` in ``[1/4, 1/2]``: 1/3 is Haar, 1/4 gives zero for
    every unitary, 1/2 is the vertex measure.
    """
    a = complex(a)
    b = complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-10:
        raise ValueError("|a|^2 + |b|^2 must equal 1")
    if not (0.25 - 1e-15 <= alpha <= 0.5 + 1e-15):
        raise ValueError(f"alpha must lie in [1/4, 1/2], got {alpha}")
    return (2.0 * alpha - 0.5) * (2.0 * abs(a) * abs(b)) ** 2


# -- Monte-Carlo oracle -------------------------------------------------------

def haar_state_mc_oracle(ch: Channel, B: BasisProjectorSet | None = None, n_samples: int = 100_000,
                         seed: int = 0, workers: int = 1) -> MonteCarloEstimate:
    """Estimate ``E_psi ||Q_B E D_B(|psi><psi|)||_2^2`` by sampling Haar states.

    Each sample is pushed through the full operator pipeline (dephase,
    channel, coherent part, squared HS norm); no coherence matrix is formed.
    """
    B = _basis(ch, B)
    d = ch.dim

    def sample(rng, size):
        psi = haar_states(rng, size, d)
        rho = psi[:, :, None] * psi.conj()[:, None, :]
        out = q_part(apply(ch, dephase(rho, B)), B)
        return np.sum(np.abs(out) ** 2, axis=(1, 2))

    return mc_mean(sample, n_samples, seed, workers)


def haar_simplex_samples(rng: np.random.Generator, size: int, d: int) -> np.ndarray:
    """``p_i = |<i|psi>|^2`` for Haar ``psi``: uniform points on the simplex."""
    return np.abs(haar_states(rng, size, d)) ** 2


# -- JSON ---------------------------------------------------------------------

def scm_to_dict(S: SimplexCorrelationMatrix) -> dict:
    doc = {"dim": S.dim, "kind": S.kind}
    if S.alpha is not None:
        doc["alpha"] = S.alpha
    if S.params is not None:
        doc["params"] = list(S.params)
    if S.n_samples is not None:
        doc["n_samples"] = S.n_samples
    if S.seed is not None:
        doc["seed"] = S.seed
    doc["entries"] = [[float(x) for x in row] for row in S.entries]
    if S.std_error is not None:
        doc["std_error"] = [[float(x) for x in row] for row in S.std_error]
    return doc


def scm_from_dict(doc: dict, seed: int = 0, n_samples: int = 100_000) -> SimplexCorrelationMatrix:
    """Parse SCM JSON ``{"dim", "kind", "alpha"?, "params"?, "entries"?}``.

    Explicit ``entries`` always win. Otherwise the matrix is rebuilt from
    ``kind``; a ``dirichlet`` spec without entries is sampled with
    ``n_samples``/``seed`` unless the document carries its own.
    """
    if not isinstance(doc, dict):
        raise SchemaError("SCM document must be a JSON object")
    try:
        d = int(doc["dim"])
        kind = doc["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("SCM document needs integer 'dim' and 'kind'") from exc
    if kind not in SCM_KINDS:
        raise SchemaError(f"unknown SCM kind {kind!r}")
    try:
        if doc.get("entries") is not None:
            entries = np.asarray(doc["entries"], dtype=float)
            if entries.shape != (d, d):
                raise SchemaError(f"entries do not match dim={d}")
            se = doc.get("std_error")
            return SimplexCorrelationMatrix(
                entries, kind, doc.get("alpha"),
                tuple(doc["params"]) if doc.get("params") is not None else None,
                doc.get("n_samples"), doc.get("seed"),
                None if se is None else np.asarray(se, dtype=float))
        if kind == "haar":
            return scm_haar(d)
        if kind == "vertex":
            return scm_vertex(d)
        if kind == "perm_invariant":
            if doc.get("alpha") is None:
                raise SchemaError("perm_invariant SCM needs 'alpha'")
            return scm_perm_invariant(d, float(doc["alpha"]))
        if kind == "dirichlet":
            params = doc.get("params") or [1.0] * d
            return scm_dirichlet_mc(d, params, int(doc.get("n_samples", n_samples)), int(doc.get("seed", seed)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc
    raise SchemaError("empirical SCM needs 'entries'")
