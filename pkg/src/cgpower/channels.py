"""Unital trace-preserving CP maps in Kraus form.

A :class:`Channel` is immutable and validated on construction: both
``sum K^dagger K = I`` (trace preservation) and ``sum K K^dagger = I``
(unitality) must hold. Non-unital maps are rejected with
:class:`NonUnitalChannelError`; every coherence-matrix result downstream
relies on unitality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .opspace import ATOL, BasisProjectorSet, DimensionError, as_square, dagger, is_permutation, is_unitary
from .rng import make_rng

#: Tolerance for the trace-preservation and unitality checks.
CHANNEL_TOL = 1e-8


class ChannelError(ValueError):
    pass


class NotTracePreservingError(ChannelError):
    pass


class NonUnitalChannelError(ChannelError):
    """Raised for maps with ``sum K K^dagger != I``.

    Coherence matrices are only monotone under post-processing for unital
    maps, so such channels are out of scope.
    """


class NotUnitaryError(ChannelError):
    pass


class SchemaError(ValueError):
    """Malformed channel or SCM JSON document."""


@dataclass(frozen=True, eq=False)
class Channel:
    kraus_ops: tuple
    label: str = ""
    basis: BasisProjectorSet | None = None
    tol: float = field(default=CHANNEL_TOL, repr=False)

    def __post_init__(self):
        ops = [as_square(K, "Kraus operator") for K in self.kraus_ops]
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(K.shape != (d, d) for K in ops):
            raise DimensionError("Kraus operators must share one dimension")
        if self.basis is not None and self.basis.dim != d:
            raise DimensionError("basis dimension differs from channel dimension")
        K = np.stack(ops)
        K.setflags(write=False)
        eye = np.eye(d)
        tp = np.einsum("kba,kbc->ac", K.conj(), K)
        if np.linalg.norm(tp - eye) > self.tol:
            raise NotTracePreservingError(
                f"sum K^dagger K deviates from I by {np.linalg.norm(tp - eye):.3g}")
        un = np.einsum("kab,kcb->ac", K, K.conj())
        if np.linalg.norm(un - eye) > self.tol:
            raise NonUnitalChannelError(
                "channel is not unital (sum K K^dagger != I, deviation "
                f"{np.linalg.norm(un - eye):.3g}); coherence matrices require unital maps")
        object.__setattr__(self, "kraus_ops", tuple(K))
        object.__setattr__(self, "_stack", K)

    @property
    def dim(self) -> int:
        return self._stack.shape[1]

    @property
    def kraus(self) -> np.ndarray:
        """Kraus operators as one read-only ``(n, d, d)`` array."""
        return self._stack

    @property
    def n_kraus(self) -> int:
        return self._stack.shape[0]

    @property
    def is_unitary(self) -> bool:
        return self.n_kraus == 1 and is_unitary(self._stack[0], ATOL)

    def unitary(self) -> np.ndarray:
        """The single Kraus operator of a unitary channel."""
        if not self.is_unitary:
            raise NotUnitaryError(f"channel {self.label!r} is not a unitary channel")
        return self._stack[0]

    def with_label(self, label: str) -> "Channel":
        return Channel(self.kraus_ops, label, self.basis, self.tol)

    def __call__(self, rho):
        return apply(self, rho)


def apply(ch: Channel, rho) -> np.ndarray:
    """``sum_k K_k rho K_k^dagger``; ``rho`` may be a stack ``(..., d, d)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (ch.dim, ch.dim):
        raise DimensionError(f"input of shape {rho.shape} vs channel dim {ch.dim}")
    K = ch.kraus
    return np.einsum("kab,...bc,kdc->...ad", K, rho, K.conj())


def from_unitary(U, label: str = "unitary", basis: BasisProjectorSet | None = None) -> Channel:
    U = as_square(U, "U")
    if not is_unitary(U, ATOL):
        raise NotUnitaryError("matrix is not unitary to tolerance")
    return Channel((U,), label, basis)


def from_kraus(ops: Sequence, label: str = "kraus", basis: BasisProjectorSet | None = None) -> Channel:
    return Channel(tuple(ops), label, basis)


def identity_channel(d: int) -> Channel:
    return from_unitary(np.eye(d), "identity")


def dephasing_channel(B: BasisProjectorSet) -> Channel:
    """The fully dephasing map ``D_B`` as a channel with Kraus set ``{P_i}``."""
    return Channel(tuple(B.projectors()), "dephasing", B)


@dataclass(frozen=True)
class IncoherentUnitarySpec:
    """``W = sum_i eta_i |sigma(i)><i|``.

    ``permutation[i]`` is ``sigma(i)`` (0-based); ``phases`` are unit-modulus
    complex numbers, all ones when omitted.
    """

    permutation: tuple
    phases: tuple | None = None

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if not is_permutation(perm):
            raise ValueError(f"{self.permutation!r} is not a permutation of 0..d-1")
        phases = (1.0 + 0j,) * len(perm) if self.phases is None else tuple(complex(z) for z in self.phases)
        if len(phases) != len(perm):
            raise ValueError("need one phase per basis element")
        if any(abs(abs(z) - 1.0) > ATOL for z in phases):
            raise ValueError("phases must have unit modulus")
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "phases", phases)

    @property
    def dim(self) -> int:
        return len(self.permutation)

    def matrix(self) -> np.ndarray:
        d = self.dim
        W = np.zeros((d, d), dtype=complex)
        W[list(self.permutation), np.arange(d)] = self.phases
        return W


def incoherent_unitary(spec: IncoherentUnitarySpec, basis: BasisProjectorSet | None = None) -> Channel:
    """Incoherent unitary channel; for a non-computational basis ``W`` is
    written in that basis (``V W V^dagger``)."""
    W = spec.matrix()
    if basis is not None:
        V = basis.basis_unitary
        W = V @ W @ dagger(V)
    return from_unitary(W, f"incoherent{spec.permutation}", basis)


def compose(a: Channel, b: Channel) -> Channel:
    """``a after b``: Kraus set ``{A_i B_j}``."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot compose dims {a.dim} and {b.dim}")
    ops = np.einsum("iab,jbc->ijac", a.kraus, b.kraus).reshape(-1, a.dim, a.dim)
    return Channel(tuple(ops), f"{a.label}*{b.label}", a.basis or b.basis, max(a.tol, b.tol))


def tensor(a: Channel, b: Channel) -> Channel:
    """``a (x) b`` with product index ``i_a * d_b + i_b``."""
    ops = [np.kron(A, Bk) for A in a.kraus for Bk in b.kraus]
    basis = None
    if a.basis is not None or b.basis is not None:
        Va = a.basis.basis_unitary if a.basis is not None else np.eye(a.dim)
        Vb = b.basis.basis_unitary if b.basis is not None else np.eye(b.dim)
        basis = BasisProjectorSet(np.kron(Va, Vb))
    return Channel(tuple(ops), f"{a.label}(x){b.label}", basis, max(a.tol, b.tol))


def mixture(channels: Sequence[Channel], weights) -> Channel:
    """Convex combination ``sum_k w_k E_k``."""
    w = np.asarray(weights, dtype=float)
    if len(channels) != w.size or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector matching the channels")
    d = channels[0].dim
    ops = []
    for ch, wk in zip(channels, w):
        if ch.dim != d:
            raise DimensionError("all channels must share a dimension")
        if wk > 0:
            ops.extend(np.sqrt(wk) * ch.kraus)
    return Channel(tuple(ops), "mixture", channels[0].basis, max(ch.tol for ch in channels))


def random_haar_unitary(d: int, seed: int, stream: int = 0) -> np.ndarray:
    """Haar unitary: complex Ginibre matrix, QR, then phases fixed so that
    ``R_ii > 0``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = make_rng(seed, stream)
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_unital_channel(d: int, n_kraus: int, seed: int) -> Channel:
    """Mixed-unitary channel ``sum_k w_k U_k . U_k^dagger`` with Haar ``U_k``
    and flat-Dirichlet weights. Mixed-unitary maps are unital by construction."""
    if n_kraus < 1:
        raise ValueError("n_kraus must be >= 1")
    if n_kraus == 1:
        return from_unitary(random_haar_unitary(d, seed, 0), f"haar(d={d},seed={seed})")
    w = make_rng(seed, 0).dirichlet(np.ones(n_kraus))
    ops = [np.sqrt(w[k]) * random_haar_unitary(d, seed, k + 1) for k in range(n_kraus)]
    return Channel(tuple(ops), f"mixed_unitary(d={d},k={n_kraus},seed={seed})")


def random_incoherent_spec(d: int, seed: int, stream: int = 0) -> IncoherentUnitarySpec:
    rng = make_rng(seed, stream)
    perm = tuple(int(p) for p in rng.permutation(d))
    phases = tuple(np.exp(2j * np.pi * rng.random(d)))
    return IncoherentUnitarySpec(perm, phases)


def random_incoherent_mixture(d: int, n_terms: int, seed: int) -> Channel:
    """Unital incoherent channel: convex mixture of incoherent unitaries."""
    w = make_rng(seed, 0).dirichlet(np.ones(n_terms))
    chans = [incoherent_unitary(random_incoherent_spec(d, seed, k + 1)) for k in range(n_terms)]
    return mixture(chans, w).with_label(f"incoherent_mixture(d={d},seed={seed})")


def fourier_unitary(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def hadamard() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


def qubit_unitary(a: complex, b: complex, tol: float = ATOL) -> np.ndarray:
    """``U = a|0><0| + a*|1><1| - b*|0><1| + b|1><0|`` with ``|a|^2+|b|^2 = 1``.

    Its transfer matrix is ``|a|^2 I + |b|^2 sigma_x``.
    """
    a = complex(a)
    b = complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > tol:
        raise ValueError("|a|^2 + |b|^2 must equal 1")
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]], dtype=complex)


# -- JSON -------------------------------------------------------------------

def _complex_matrix_from_json(rows, name: str) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{name}: entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise SchemaError(f"{name}: expected a d x d array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def channel_from_dict(doc: dict, tol: float = CHANNEL_TOL) -> Channel:
    """Build a channel from the JSON schema
    ``{"dim", "type": "unitary"|"kraus", "matrix"|"kraus_ops", "basis"?, "label"?}``."""
    if not isinstance(doc, dict):
        raise SchemaError("channel document must be a JSON object")
    try:
        d = int(doc["dim"])
        kind = doc["type"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("channel document needs integer 'dim' and 'type'") from exc
    if kind == "unitary":
        if "matrix" not in doc:
            raise SchemaError("unitary channel needs 'matrix'")
        ops = [_complex_matrix_from_json(doc["matrix"], "matrix")]
    elif kind == "kraus":
        if not doc.get("kraus_ops"):
            raise SchemaError("kraus channel needs a non-empty 'kraus_ops' list")
        ops = [_complex_matrix_from_json(K, f"kraus_ops[{k}]") for k, K in enumerate(doc["kraus_ops"])]
    else:
        raise SchemaError(f"unknown channel type {kind!r}")
    if any(K.shape != (d, d) for K in ops):
        raise SchemaError(f"matrices do not match dim={d}")
    basis = None
    if doc.get("basis") is not None:
        V = _complex_matrix_from_json(doc["basis"], "basis")
        if V.shape != (d, d):
            raise SchemaError(f"basis does not match dim={d}")
        try:
            basis = BasisProjectorSet(V)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    label = str(doc.get("label", kind))
    if kind == "unitary" and not is_unitary(ops[0], max(tol, ATOL)):
        raise NotUnitaryError("'matrix' of a unitary channel is not unitary")
    return Channel(tuple(ops), label, basis, tol)


def channel_to_dict(ch: Channel) -> dict:
    doc = {"dim": ch.dim, "label": ch.label}
    if ch.is_unitary:
        doc["type"] = "unitary"
        doc["matrix"] = _complex_matrix_to_json(ch.unitary())
    else:
        doc["type"] = "kraus"
        doc["kraus_ops"] = [_complex_matrix_to_json(K) for K in ch.kraus]
    if ch.basis is not None:
        doc["basis"] = _complex_matrix_to_json(ch.basis.basis_unitary)
    return doc
