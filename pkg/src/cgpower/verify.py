"""Cross-oracle invariant suite behind ``cgpower verify``.

Each check draws seeded random instances, measures the worst violation of
one property and compares it with that property's tolerance. The report is
a plain dict with no timing or host data, so equal arguments give equal
reports.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import additive
from .assignment import brute_force_assignment, max_assignment
from .channels import (
    apply,
    compose,
    from_unitary,
    incoherent_unitary,
    mixture,
    random_haar_unitary,
    random_incoherent_mixture,
    random_incoherent_spec,
    random_unital_channel,
)
from .coherence import (
    cgp_g,
    cgp_operator_norm,
    cgp_permutation_distance,
    cgp_trace_norm,
    coherence_matrix,
    coherence_matrix_unitary,
    gram_matrix,
    gram_matrix_swap_protocol,
    transfer_matrix,
)
from .ensembles import (
    cgp_ensemble,
    haar_state_mc_oracle,
    scm_conjugate,
    scm_dirichlet_mc,
    scm_empirical,
    scm_haar,
    scm_perm_invariant,
    scm_vertex,
)
from .opspace import BasisProjectorSet, dephase, hs_norm, q_part, symmetric_eigs
from .rng import make_rng

DEFAULT_DIMS = (2, 3, 4)


@dataclass
class CheckResult:
    name: str
    instances: int
    max_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_violation <= self.tolerance)

    def as_dict(self) -> dict:
        return {"name": self.name, "instances": self.instances,
                "max_violation": float(self.max_violation), "tolerance": self.tolerance,
                "passed": self.passed}


def _min_eig(M) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


class _Suite:
    def __init__(self, dims, seed, n_channels, n_samples):
        self.dims = tuple(dims)
        self.seed = int(seed)
        self.n = int(n_channels)
        self.n_samples = int(n_samples)
        self.results: list[CheckResult] = []

    def record(self, name, tol, violations):
        v = [float(x) for x in violations]
        self.results.append(CheckResult(name, len(v), max(v) if v else 0.0, tol))

    def channel(self, d, k, tag=0):
        n_kraus = 1 + (k % 4)
        return random_unital_channel(d, n_kraus, self.seed * 1_000_003 + 7919 * tag + 31 * d + k)

    def unitary(self, d, k, tag=0):
        return random_haar_unitary(d, self.seed, 1_000_000 * (tag + 1) + 1000 * d + k)

    def rng(self, tag, d=0):
        return make_rng(self.seed, 10_000_000 + 1000 * tag + d)

    # -- opspace ----------------------------------------------------------
    def opspace(self):
        pyth, herm, eig, gram_psd = [], [], [], []
        for d in self.dims:
            rng = self.rng(1, d)
            B = BasisProjectorSet(random_haar_unitary(d, self.seed, 77 + d))
            for _ in range(self.n):
                Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                X = Z + Z.conj().T
                D = dephase(X, B)
                Q = q_part(X, B)
                pyth.append(abs(hs_norm(X) ** 2 - hs_norm(D) ** 2 - hs_norm(Q) ** 2))
                herm.append(max(hs_norm(D - D.conj().T), abs(np.trace(D) - np.trace(X))))
                G = rng.standard_normal((d, d + 1))
                M = G @ G.T
                w, V = symmetric_eigs(M)
                eig.append(np.max(np.abs(V @ np.diag(w) @ V.T - M)) / max(1.0, np.abs(M).max()))
                gram_psd.append(max(0.0, -w[-1]))
        self.record("opspace.dephase_pythagoras", 1e-10, pyth)
        self.record("opspace.dephase_hermitian_trace", 1e-10, herm)
        self.record("opspace.jacobi_reconstruction", 1e-10, eig)
        self.record("opspace.jacobi_gram_psd", 1e-10, gram_psd)

    # -- channels ---------------------------------------------------------
    def channels(self):
        tp, trace, psd, comm = [], [], [], []
        for d in self.dims:
            rng = self.rng(2, d)
            for k in range(self.n):
                ch = self.channel(d, k)
                K = ch.kraus
                eye = np.eye(d)
                tp.append(max(np.linalg.norm(np.einsum("kba,kbc->ac", K.conj(), K) - eye),
                              np.linalg.norm(np.einsum("kab,kcb->ac", K, K.conj()) - eye)))
                z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                rho = z @ z.conj().T
                rho /= np.trace(rho)
                out = apply(ch, rho)
                trace.append(abs(np.trace(out) - 1.0))
                psd.append(max(0.0, -np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0]))
                W = incoherent_unitary(random_incoherent_spec(d, self.seed, 500 + 100 * d + k))
                X = z + z.conj().T
                B = BasisProjectorSet.computational(d)
                comm.append(np.max(np.abs(apply(W, dephase(X, B)) - dephase(apply(W, X), B))))
        self.record("channels.unital_trace_preserving", 1e-8, tp)
        self.record("channels.apply_preserves_trace", 1e-10, trace)
        self.record("channels.apply_preserves_positivity", 1e-9, psd)
        self.record("channels.incoherent_commutes_with_dephasing", 1e-10, comm)

    # -- coherence --------------------------------------------------------
    def coherence(self):
        psd, kern, bounds, swap, convex, mono, post_inv, pre_conj = ([] for _ in range(8))
        for d in self.dims:
            rng = self.rng(3, d)
            for k in range(self.n):
                ch = self.channel(d, k)
                A = gram_matrix(ch)
                C = coherence_matrix(ch)
                psd.append(max(np.max(np.abs(A - A.T)), np.max(np.abs(C - C.T)),
                               max(0.0, -_min_eig(A)), max(0.0, -_min_eig(C))))
                kern.append(np.linalg.norm(C @ np.ones(d)) / np.sqrt(d))
                bounds.append(max(0.0, np.linalg.eigvalsh(C)[-1] - 1.0,
                                  np.trace(C) - (d - 1), np.max(np.abs(A.sum(axis=0) - 1.0))))
                if k < 20 and d <= 4:
                    swap.append(np.max(np.abs(gram_matrix_swap_protocol(ch) - A)))
                ch2 = self.channel(d, k, tag=1)
                p = rng.random()
                mix = mixture([ch, ch2], [p, 1 - p])
                convex.append(max(0.0, -_min_eig(p * C + (1 - p) * coherence_matrix(ch2) - coherence_matrix(mix)),
                                  -_min_eig(p * A + (1 - p) * gram_matrix(ch2) - gram_matrix(mix))))
                Wmix = random_incoherent_mixture(d, 3, self.seed * 7 + 1000 * d + k)
                mono.append(max(0.0, -_min_eig(C - coherence_matrix(compose(Wmix, ch)))))
                spec = random_incoherent_spec(d, self.seed, 9000 + 100 * d + k)
                W = incoherent_unitary(spec)
                post_inv.append(np.max(np.abs(coherence_matrix(compose(W, ch)) - C)))
                U = self.unitary(d, k)
                CU = coherence_matrix(from_unitary(U))
                P = np.zeros((d, d))
                P[list(spec.permutation), np.arange(d)] = 1.0
                CUW = coherence_matrix(compose(from_unitary(U), W))
                pre_conj.append(max(np.max(np.abs(CUW - P.T @ CU @ P)),
                                    abs(cgp_trace_norm(CUW) - cgp_trace_norm(CU)),
                                    abs(cgp_operator_norm(CUW) - cgp_operator_norm(CU))))
        self.record("coherence.symmetric_psd", 1e-9, psd)
        self.record("coherence.phi_plus_kernel", 1e-8, kern)
        self.record("coherence.bounds_and_bistochastic", 1e-8, bounds)
        self.record("coherence.swap_protocol_agreement", 1e-8, swap)
        self.record("coherence.convexity", 1e-9, convex)
        self.record("coherence.postprocessing_monotone", 1e-9, mono)
        self.record("coherence.incoherent_postprocessing_invariance", 1e-9, post_inv)
        self.record("coherence.preprocessing_conjugation", 1e-9, pre_conj)

    def unitaries(self):
        formula, sandwich, opnorm, faithful = [], [], [], []
        for d in self.dims:
            for k in range(self.n):
                U = self.unitary(d, k, tag=2)
                X = transfer_matrix(U)
                CU = coherence_matrix_unitary(X)
                formula.append(np.max(np.abs(coherence_matrix(from_unitary(U)) - CU)))
                tr = cgp_trace_norm(CU)
                tilde, _ = cgp_permutation_distance(X)
                sandwich.append(max(0.0, tilde - tr, tr - (d - 1), abs(tr - (d - np.sum(X * X)))))
                smin = np.linalg.svd(X, compute_uv=False)[-1]
                opnorm.append(abs(cgp_operator_norm(CU) - (1 - smin ** 2)))
                is_perm = np.all(X.max(axis=0) > 1 - 1e-9)
                faithful.append(0.0 if (tr < 1e-9) == bool(is_perm) else 1.0)
        self.record("coherence.unitary_formula", 1e-9, formula)
        self.record("coherence.permutation_distance_sandwich", 1e-9, sandwich)
        self.record("coherence.opnorm_singular_value", 1e-9, opnorm)
        self.record("coherence.faithfulness_unitaries", 0.0, faithful)

    # -- assignment -------------------------------------------------------
    def assignment(self):
        disc, shift = [], []
        for d in self.dims:
            if factorial(d) > 5040:
                continue
            rng = self.rng(4, d)
            for _ in range(self.n):
                W = rng.standard_normal((d, d))
                res = max_assignment(W)
                ref = brute_force_assignment(W)
                disc.append(abs(res.total_weight - ref.total_weight))
                c = rng.standard_normal()
                W2 = W.copy()
                W2[rng.integers(d), :] += c
                res2 = max_assignment(W2)
                shift.append(abs(res2.total_weight - res.total_weight - c))
        self.record("assignment.brute_force_optimality", 1e-12, disc)
        self.record("assignment.row_shift_covariance", 1e-12, shift)

    # -- ensembles --------------------------------------------------------
    def ensembles(self):
        valid, norm, sandwich, conj, lower, mc_miss = [], [], [], [], [], []
        for d in self.dims:
            rng = self.rng(5, d)
            scms = [scm_haar(d), scm_vertex(d), scm_perm_invariant(d, 0.0), scm_perm_invariant(d, 0.5 / d),
                    scm_dirichlet_mc(d, np.full(d, 0.5), 2000, self.seed)]
            for S in scms:
                v = S.violations()
                valid.append(max(v["symmetry"], v["psd"]))
                norm.append(v["sum"])
            hits = 0
            for k in range(self.n):
                ch = self.channel(d, k)
                C = coherence_matrix(ch)
                params = rng.uniform(0.2, 3.0, d)
                S = scm_dirichlet_mc(d, params, 500, self.seed + k)
                w = np.linalg.eigvalsh(S.entries)
                val = cgp_ensemble(C, S)
                tr = np.trace(C)
                sandwich.append(max(0.0, w[0] * tr - val, val - w[-1] * tr))
                U = self.unitary(d, k, tag=3)
                spec = random_incoherent_spec(d, self.seed, 20_000 + 100 * d + k)
                pts = rng.dirichlet(np.ones(d) * 0.7, 40)
                Se = scm_empirical(pts)
                lhs = cgp_ensemble(coherence_matrix(compose(from_unitary(U), incoherent_unitary(spec))), Se)
                rhs = cgp_ensemble(coherence_matrix(from_unitary(U)), scm_conjugate(Se, spec.permutation))
                conj.append(abs(lhs - rhs))
                tilde, _ = cgp_permutation_distance(transfer_matrix(U))
                smin = np.linalg.eigvalsh(S.entries)[0]
                lower.append(max(0.0, smin * tilde - cgp_ensemble(coherence_matrix(from_unitary(U)), S)))
                est = haar_state_mc_oracle(ch, n_samples=self.n_samples, seed=self.seed + 100 * d + k)
                hits += est.within(cgp_g(ch), 3.0)
            mc_miss.append(max(0.0, 0.9 - hits / self.n))
        self.record("ensembles.scm_symmetric_psd", 1e-9, valid)
        self.record("ensembles.scm_unit_sum", 1e-8, norm)
        self.record("ensembles.eigenvalue_sandwich", 1e-9, sandwich)
        self.record("ensembles.preprocessing_pushforward", 1e-9, conj)
        self.record("ensembles.permutation_distance_lower_bound", 1e-9, lower)
        self.record("ensembles.haar_mc_within_3se_fraction", 0.0, mc_miss)

    # -- additive ---------------------------------------------------------
    def additive(self):
        add, inv, chain, rng_v, mono = [], [], [], [], []
        alphas = np.arange(0.0, 2.0001, 0.25)
        fns = {
            "p": additive.phi_p,
            "g": additive.phi_g,
            "gtilde": additive.phi_g_tilde,
            "a0.5": lambda X: additive.phi_alpha(X, 0.5),
            "a1.5": lambda X: additive.phi_alpha(X, 1.5),
            "a2": lambda X: additive.phi_alpha(X, 2.0),
        }
        for k in range(self.n):
            da, db = 2 + k % 2, 2 + (k // 2) % 2
            UA, UB = self.unitary(da, k, tag=4), self.unitary(db, k, tag=5)
            XA, XB = transfer_matrix(UA), transfer_matrix(UB)
            XAB = transfer_matrix(np.kron(UA, UB))
            for f in fns.values():
                a, b, ab = f(XA), f(XB), f(XAB)
                if np.isinf(a) or np.isinf(b):
                    add.append(0.0 if np.isinf(ab) else 1.0)
                else:
                    add.append(abs(ab - a - b))
        for d in self.dims:
            for k in range(self.n):
                U = self.unitary(d, k, tag=6)
                X = transfer_matrix(U)
                spec = random_incoherent_spec(d, self.seed, 30_000 + 100 * d + k)
                W = spec.matrix()
                for f in fns.values():
                    base = f(X)
                    for Y in (transfer_matrix(W @ U), transfer_matrix(U @ W)):
                        other = f(Y)
                        inv.append(0.0 if np.isinf(base) and np.isinf(other) else abs(other - base))
                g_t, p2, pp = additive.phi_g_tilde(X), additive.phi_alpha(X, 2.0), additive.phi_p(X)
                chain.append(max(0.0, p2 - g_t, pp - p2))
                vals = [pp, g_t] + [additive.phi_alpha(X, a) for a in alphas]
                rng_v.append(max(max(0.0, -v - 1e-12, v - np.log(d) - 1e-9) for v in vals))
                series = [additive.phi_alpha(X, a) for a in alphas]
                mono.append(max(0.0, max(series[i + 1] - series[i] for i in range(len(series) - 1))))
        self.record("additive.kronecker_additivity", 1e-9, add)
        self.record("additive.incoherent_invariance", 1e-9, inv)
        self.record("additive.renyi_chain", 1e-9, chain)
        self.record("additive.range", 0.0, rng_v)
        self.record("additive.renyi_monotone_in_alpha", 1e-9, mono)


def run_verify(dims=DEFAULT_DIMS, seed: int = 0, n_channels: int = 50, n_samples: int = 20_000) -> dict:
    """Run every invariant suite and return the report dict."""
    suite = _Suite(dims, seed, n_channels, n_samples)
    for part in (suite.opspace, suite.channels, suite.coherence, suite.unitaries,
                 suite.assignment, suite.ensembles, suite.additive):
        part()
    checks = [r.as_dict() for r in suite.results]
    return {
        "dims": list(suite.dims),
        "seed": suite.seed,
        "n_channels": suite.n,
        "n_samples": suite.n_samples,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
