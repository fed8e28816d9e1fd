import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cgpower.channels import random_haar_unitary
from cgpower.opspace import (
    BasisProjectorSet,
    DimensionError,
    NotSymmetricError,
    dephase,
    hs_inner,
    hs_norm,
    is_bistochastic,
    is_permutation,
    is_psd,
    permutation_matrix,
    q_part,
    symmetric_eigs,
)

plus = np.full((2, 2), 0.5, dtype=complex)


def random_complex(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def test_hs_inner_examples(H):
    B = BasisProjectorSet.computational(2)
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(B.projector(0), B.projector(1)) == 0
    # direct entrywise sum of |H_ij|^2
    assert hs_inner(H, H) == pytest.approx(float(np.sum(np.abs(H) ** 2)), abs=1e-14)
    assert hs_inner(H, H) == pytest.approx(2.0, abs=1e-14)


def test_hs_inner_shape_mismatch():
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


def test_dephase_examples():
    B = BasisProjectorSet.computational(2)
    rho = np.diag([0.3, 0.7]).astype(complex)
    np.testing.assert_allclose(dephase(rho, B), rho)
    np.testing.assert_allclose(dephase(plus, B), np.eye(2) / 2)
    np.testing.assert_allclose(q_part(np.eye(2), B), 0)
    np.testing.assert_allclose(q_part(plus, B), np.array([[0, 1], [1, 0]]) / 2)


def test_dephase_noncomputational_basis_matches_projector_sum():
    rng = np.random.default_rng(3)
    V = random_haar_unitary(4, 11)
    B = BasisProjectorSet(V)
    X = random_complex(rng, 4)
    P = B.projectors()
    expected = sum(P[i] @ X @ P[i] for i in range(4))
    np.testing.assert_allclose(dephase(X, B), expected, atol=1e-12)


def test_dephase_stacks():
    rng = np.random.default_rng(0)
    B = BasisProjectorSet(random_haar_unitary(3, 5))
    Xs = np.stack([random_complex(rng, 3) for _ in range(4)])
    out = dephase(Xs, B)
    for k in range(4):
        np.testing.assert_allclose(out[k], dephase(Xs[k], B), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_dephase_is_orthogonal_projection(d, seed):
    rng = np.random.default_rng(seed)
    B = BasisProjectorSet(random_haar_unitary(d, seed % 1000))
    X, Y = random_complex(rng, d), random_complex(rng, d)
    DX = dephase(X, B)
    np.testing.assert_allclose(dephase(DX, B), DX, atol=1e-10)
    # self-adjoint in the HS inner product
    assert abs(hs_inner(dephase(X, B), Y) - hs_inner(X, dephase(Y, B))) < 1e-9
    # D and Q split X into HS-orthogonal pieces
    assert abs(hs_inner(DX, q_part(X, B))) < 1e-9
    assert abs(hs_norm(X) ** 2 - hs_norm(DX) ** 2 - hs_norm(q_part(X, B)) ** 2) < 1e-9


def test_basis_rejects_non_unitary():
    with pytest.raises(ValueError):
        BasisProjectorSet(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_projectors_resolve_identity():
    B = BasisProjectorSet(random_haar_unitary(4, 2))
    P = B.projectors()
    np.testing.assert_allclose(P.sum(axis=0), np.eye(4), atol=1e-12)
    for i in range(4):
        np.testing.assert_allclose(P[i] @ P[i], P[i], atol=1e-12)


def test_jacobi_examples():
    w, _ = symmetric_eigs(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [3, 2, 1])
    w, _ = symmetric_eigs([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(w, [1, -1], atol=1e-14)
    w, _ = symmetric_eigs([[0.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(w, [1, 0], atol=1e-14)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        symmetric_eigs([[0.0, 1.0], [0.0, 0.0]])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_jacobi_matches_eigh(A):
    n = min(A.shape)
    M = A[:n, :n] + A[:n, :n].T
    w, V = symmetric_eigs(M)
    ref = np.sort(np.linalg.eigvalsh(M))[::-1]
    scale = max(1.0, np.abs(M).max())
    np.testing.assert_allclose(w, ref, atol=1e-11 * scale * n)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-11 * n)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, M, atol=1e-11 * scale * n)


def test_jacobi_dim_64_gram():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((64, 64))
    M = A @ A.T
    w, _ = symmetric_eigs(M)
    np.testing.assert_allclose(w, np.sort(np.linalg.eigvalsh(M))[::-1], atol=1e-9)
    assert is_psd(M, tol=1e-9)


def test_permutation_helpers():
    P = permutation_matrix([2, 0, 1])
    # P |l> = |sigma(l)>
    assert P[2, 0] == 1 and P[0, 1] == 1 and P[1, 2] == 1
    assert is_bistochastic(P)
    assert is_permutation([2, 0, 1]) and not is_permutation([0, 0, 1])
    assert not is_bistochastic(np.array([[0.5, 0.5], [0.6, 0.4]]))
