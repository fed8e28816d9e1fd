import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cgpower.additive import (
    column_distributions,
    log_abs_det,
    phi_2,
    phi_alpha,
    phi_g,
    phi_g_tilde,
    phi_p,
    renyi_entropy,
)
from cgpower.channels import IncoherentUnitarySpec, fourier_unitary, random_haar_unitary
from cgpower.coherence import NotBistochasticError, transfer_matrix
from cgpower.opspace import permutation_matrix

ALPHAS = (0.0, 0.5, 1.0, 1.5, 2.0)
sx = np.array([[0.0, 1.0], [1.0, 0.0]])


def families():
    out = {"phi_p": phi_p, "phi_g": phi_g, "phi_gtilde": phi_g_tilde}
    out.update({f"phi_{a}": (lambda X, a=a: phi_alpha(X, a)) for a in ALPHAS})
    return out


@pytest.mark.parametrize("name,f", families().items())
def test_vanish_on_permutations(name, f):
    for sigma in ((0, 1, 2), (2, 0, 1), (1, 0, 3, 2)):
        assert f(permutation_matrix(sigma)) == 0


def test_phi_p_examples(H):
    X = transfer_matrix(H)
    assert phi_p(X) == pytest.approx(np.log(2), abs=1e-15)
    assert phi_p(np.kron(X, X)) == pytest.approx(2 * np.log(2), abs=1e-14)


def test_phi_g_examples(H):
    assert phi_g(transfer_matrix(H)) == np.inf
    X = 0.9 * np.eye(2) + 0.1 * sx
    assert phi_g(X) == pytest.approx(-0.5 * np.log(0.8), abs=1e-15)
    for d in range(2, 7):
        assert phi_g(transfer_matrix(fourier_unitary(d))) == np.inf


def test_log_abs_det():
    assert log_abs_det(np.eye(3)) == (0.0, False)
    assert log_abs_det(np.ones((3, 3)) / 3)[1]
    value, singular = log_abs_det(0.9 * np.eye(2) + 0.1 * sx)
    assert not singular and value == pytest.approx(np.log(0.8))


def test_phi_g_tilde_examples(H, F3):
    assert phi_g_tilde(transfer_matrix(H)) == pytest.approx(np.log(2), abs=1e-15)
    assert phi_g_tilde(transfer_matrix(F3)) == pytest.approx(np.log(3), abs=1e-14)


def test_phi_alpha_examples(H):
    for d in (2, 3, 5):
        for a in ALPHAS + (0.25, 1.75):
            assert phi_alpha(np.ones((d, d)) / d, a) == pytest.approx(np.log(d), abs=1e-12)
    X = transfer_matrix(H)
    assert phi_2(X) == pytest.approx(np.log(2), abs=1e-15)
    assert phi_2(X) >= phi_p(X) - 1e-15


def test_phi_alpha_range():
    for a in (-0.1, 2.1):
        with pytest.raises(ValueError):
            phi_alpha(np.eye(2), a)


def test_renyi_branches():
    p = np.array([0.5, 0.25, 0.25, 0.0])
    shannon = -np.sum(p[:3] * np.log(p[:3]))
    assert renyi_entropy(p, 1.0) == pytest.approx(shannon)
    assert renyi_entropy(p, 1.0 + 1e-6) == pytest.approx(shannon, abs=1e-5)
    assert renyi_entropy(p, 0.0) == pytest.approx(np.log(3))
    assert renyi_entropy(p, 2.0) == pytest.approx(-np.log(0.375))
    # entries at or below the support threshold do not count for alpha = 0
    assert renyi_entropy(np.array([1 - 1e-13, 1e-13]), 0.0) == 0.0


def test_rejects_non_bistochastic():
    with pytest.raises(NotBistochasticError):
        phi_p(np.array([[0.5, 0.5], [0.2, 0.8]]))
    assert column_distributions(np.eye(2)).shape == (2, 2)


@settings(max_examples=25, deadline=None)
@given(da=st.integers(2, 3), db=st.integers(2, 3), seed=st.integers(0, 10**6))
def test_kronecker_additivity(da, db, seed):
    XA = transfer_matrix(random_haar_unitary(da, seed))
    XB = transfer_matrix(random_haar_unitary(db, seed + 1))
    XAB = transfer_matrix(np.kron(random_haar_unitary(da, seed), random_haar_unitary(db, seed + 1)))
    for f in families().values():
        a, b, ab = f(XA), f(XB), f(XAB)
        if np.isfinite(a) and np.isfinite(b):
            assert ab == pytest.approx(a + b, abs=1e-9)
        else:
            assert ab == np.inf


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 6), seed=st.integers(0, 10**6))
def test_range_chain_and_alpha_monotone(d, seed):
    X = transfer_matrix(random_haar_unitary(d, seed))
    g_t, p2, pp = phi_g_tilde(X), phi_2(X), phi_p(X)
    assert g_t >= p2 - 1e-9 and p2 >= pp - 1e-9
    series = [phi_alpha(X, a) for a in np.linspace(0, 2, 9)]
    assert np.all(np.diff(series) <= 1e-9)
    for v in series + [g_t, pp]:
        assert -1e-12 <= v <= np.log(d) + 1e-9
    assert phi_g(X) >= 0


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 5), seed=st.integers(0, 10**6))
def test_invariant_under_incoherent_unitaries(d, seed):
    rng = np.random.default_rng(seed)
    U = random_haar_unitary(d, seed)
    W = IncoherentUnitarySpec(tuple(rng.permutation(d)), tuple(np.exp(2j * np.pi * rng.random(d)))).matrix()
    X = transfer_matrix(U)
    for f in families().values():
        base = f(X)
        for Y in (transfer_matrix(W @ U), transfer_matrix(U @ W)):
            other = f(Y)
            assert (np.isinf(base) and np.isinf(other)) or other == pytest.approx(base, abs=1e-9)


def test_fourier_maximum_all_families():
    for d in range(2, 7):
        X = transfer_matrix(fourier_unitary(d))
        for name, f in families().items():
            expected = np.inf if name == "phi_g" else np.log(d)
            assert f(X) == pytest.approx(expected, abs=1e-10), name
