import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cgpower.channels import (
    SchemaError,
    compose,
    from_unitary,
    hadamard,
    incoherent_unitary,
    random_haar_unitary,
    random_incoherent_spec,
    random_unital_channel,
)
from cgpower.coherence import cgp_g, coherence_matrix
from cgpower.ensembles import (
    SimplexCorrelationMatrix,
    cgp_ensemble,
    cgp_qubit_symmetric,
    commutes_with_permutations,
    haar_simplex_samples,
    haar_state_mc_oracle,
    perm_invariant_decomposition,
    qubit_alpha_to_perm_invariant,
    scm_conjugate,
    scm_dirichlet_mc,
    scm_empirical,
    scm_from_dict,
    scm_haar,
    scm_perm_invariant,
    scm_qubit,
    scm_to_dict,
    scm_vertex,
)
from cgpower.rng import make_rng

C_H = np.array([[0.5, -0.5], [-0.5, 0.5]])


def test_haar_examples():
    np.testing.assert_allclose(scm_haar(2).entries, [[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
    S3 = scm_haar(3).entries
    np.testing.assert_allclose(np.diag(S3), 1 / 6)
    np.testing.assert_allclose(S3[~np.eye(3, dtype=bool)], 1 / 12)


def test_vertex_and_perm_invariant_examples():
    np.testing.assert_allclose(scm_vertex(2).entries, np.eye(2) / 2)
    np.testing.assert_allclose(scm_vertex(4).entries, np.eye(4) / 4)
    np.testing.assert_allclose(scm_perm_invariant(2, 1 / 6).entries, scm_haar(2).entries, atol=1e-16)
    for d in (2, 3, 5):
        np.testing.assert_allclose(scm_perm_invariant(d, 1 / (d * (d + 1))).entries, scm_haar(d).entries,
                                   atol=1e-16)
        np.testing.assert_allclose(scm_perm_invariant(d, 1 / d).entries, np.eye(d) / d, atol=1e-16)
        np.testing.assert_allclose(scm_perm_invariant(d, 0).entries, np.ones((d, d)) / d ** 2, atol=1e-16)


@pytest.mark.parametrize("alpha", [-0.01, 0.6])
def test_perm_invariant_range(alpha):
    with pytest.raises(ValueError):
        scm_perm_invariant(2, alpha)


def test_dirichlet_flat_matches_haar():
    S = scm_dirichlet_mc(2, [1, 1], 1_000_000, 0)
    assert np.all(np.abs(S.entries - scm_haar(2).entries) <= 3 * S.std_error)
    assert S.n_samples == 1_000_000 and S.seed == 0


def test_dirichlet_concentrated_and_degenerate():
    S = scm_dirichlet_mc(3, [1e5] * 3, 20_000, 1)
    np.testing.assert_allclose(S.entries, np.ones((3, 3)) / 9, atol=1e-4)
    S = scm_dirichlet_mc(3, [0, 2.0, 0], 10, 1)
    np.testing.assert_array_equal(S.entries, np.diag([0.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        scm_dirichlet_mc(3, [1, 1], 10, 0)
    with pytest.raises(ValueError):
        scm_dirichlet_mc(2, [0, 0], 10, 0)


def test_dirichlet_deterministic():
    a = scm_dirichlet_mc(3, [1, 2, 3], 20_000, 7)
    b = scm_dirichlet_mc(3, [1, 2, 3], 20_000, 7)
    np.testing.assert_array_equal(a.entries, b.entries)


def test_haar_states_give_flat_simplex():
    p = haar_simplex_samples(make_rng(0), 200_000, 3)
    S = scm_empirical(p)
    assert np.all(np.abs(S.entries - scm_haar(3).entries) <= 4 * S.std_error)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 6), n=st.integers(1, 50), seed=st.integers(0, 10**6))
def test_constructed_scms_valid(d, n, seed):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0, 1 / d)
    p = rng.dirichlet(np.ones(d), n)
    for S in (scm_haar(d), scm_vertex(d), scm_perm_invariant(d, alpha), scm_empirical(p),
              scm_dirichlet_mc(d, rng.uniform(0.1, 3, d), 500, seed)):
        assert S.is_valid(), S.violations()


def test_violations_detected():
    S = SimplexCorrelationMatrix(np.array([[0.6, 0.0], [0.1, 0.6]]))
    v = S.violations()
    assert v["symmetry"] > 0 and v["sum"] > 0 and not S.is_valid()
    assert SimplexCorrelationMatrix(np.array([[0.0, 0.5], [0.5, 0.0]])).violations()["psd"] > 0


def test_ensemble_examples():
    for d, seed in ((2, 0), (3, 1), (4, 2)):
        ch = random_unital_channel(d, 2, seed)
        C = coherence_matrix(ch)
        assert cgp_ensemble(C, scm_haar(d)) == pytest.approx(cgp_g(ch), abs=1e-14)
        assert cgp_ensemble(C, scm_haar(d)) == pytest.approx(np.trace(C) / (d * (d + 1)), abs=1e-14)
        assert cgp_ensemble(np.zeros((d, d)), scm_dirichlet_mc(d, np.ones(d), 100, 0)) == 0
    assert cgp_ensemble(C_H, scm_vertex(2)) == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(2, 4), seed=st.integers(0, 10**6))
def test_eigenvalue_sandwich(d, seed):
    C = coherence_matrix(random_unital_channel(d, 1 + seed % 3, seed))
    p = np.random.default_rng(seed).dirichlet(np.ones(d) * 0.5, 7)
    S = scm_empirical(p)
    value = cgp_ensemble(C, S)
    assert S.s_min * np.trace(C) - 1e-9 <= value <= S.s_max * np.trace(C) + 1e-9
    assert value >= -1e-12


def test_qubit_examples():
    r = 1 / np.sqrt(2)
    assert cgp_qubit_symmetric(r, r, 1 / 3) == pytest.approx(1 / 6)
    assert cgp_qubit_symmetric(r, r, 0.5) == pytest.approx(0.5)
    for t in np.linspace(0, 1, 7):
        assert cgp_qubit_symmetric(np.sqrt(t), np.sqrt(1 - t), 0.25) == 0
    with pytest.raises(ValueError):
        cgp_qubit_symmetric(r, r, 0.6)
    with pytest.raises(ValueError):
        cgp_qubit_symmetric(1, 1, 0.3)


def test_qubit_alpha_conversion():
    assert qubit_alpha_to_perm_invariant(1 / 3) == pytest.approx(1 / 6)
    np.testing.assert_allclose(scm_qubit(1 / 3).entries, scm_haar(2).entries, atol=1e-16)
    np.testing.assert_allclose(scm_qubit(0.5).entries, scm_vertex(2).entries)
    for a in np.linspace(0.25, 0.5, 6):
        np.testing.assert_allclose(scm_qubit(a).entries,
                                   scm_perm_invariant(2, qubit_alpha_to_perm_invariant(a)).entries, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0, 1), phase=st.floats(0, 6.3), alpha=st.floats(0.25, 0.5))
def test_qubit_closed_form_matches_pipeline(t, phase, alpha):
    from cgpower.channels import qubit_unitary
    a, b = np.sqrt(t) * np.exp(1j * phase), np.sqrt(1 - t)
    C = coherence_matrix(from_unitary(qubit_unitary(a, b)))
    assert cgp_qubit_symmetric(a, b, alpha) == pytest.approx(cgp_ensemble(C, scm_qubit(alpha)), abs=1e-12)


def test_monotone_in_alpha():
    C = coherence_matrix(random_unital_channel(3, 2, 0))
    vals = [cgp_ensemble(C, scm_perm_invariant(3, a)) for a in np.linspace(0, 1 / 3, 9)]
    assert np.all(np.diff(vals) > 0)
    assert vals[0] == pytest.approx(0, abs=1e-15)


def test_mc_oracle_examples():
    W = incoherent_unitary(random_incoherent_spec(3, 1))
    est = haar_state_mc_oracle(W, n_samples=5000, seed=0)
    assert est.value == pytest.approx(0, abs=1e-14) and est.std_error == pytest.approx(0, abs=1e-14)
    est = haar_state_mc_oracle(from_unitary(hadamard()), n_samples=100_000, seed=0)
    assert est.within(1 / 6)


def test_mc_oracle_random_channels():
    hits = 0
    for k in range(10):
        ch = random_unital_channel(3, 2, 50 + k)
        est = haar_state_mc_oracle(ch, n_samples=20_000, seed=k)
        hits += est.within(cgp_g(ch))
    assert hits >= 9


def test_conjugate_examples():
    for sigma in ((1, 2, 0), (2, 1, 0)):
        np.testing.assert_allclose(scm_conjugate(scm_haar(3), sigma).entries, scm_haar(3).entries)
        S = scm_perm_invariant(3, 0.2)
        np.testing.assert_allclose(scm_conjugate(S, sigma).entries, S.entries)
    M = np.array([[0.3, 0.05, 0.0], [0.05, 0.2, 0.1], [0.0, 0.1, 0.2]])
    S = SimplexCorrelationMatrix(M)
    # transposition of 0 and 1 swaps the first two rows and columns
    expected = M[[1, 0, 2]][:, [1, 0, 2]]
    np.testing.assert_allclose(scm_conjugate(S, (1, 0, 2)).entries, expected)
    # three-cycle: (P S P^T)[sigma(i), sigma(j)] = S[i, j]
    sigma = (1, 2, 0)
    out = scm_conjugate(S, sigma).entries
    for i in range(3):
        for j in range(3):
            assert out[sigma[i], sigma[j]] == M[i, j]


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 4), seed=st.integers(0, 10**6))
def test_preprocessing_pushforward(d, seed):
    U = random_haar_unitary(d, seed)
    spec = random_incoherent_spec(d, seed, 2)
    W = incoherent_unitary(spec)
    S = scm_empirical(np.random.default_rng(seed).dirichlet(np.ones(d), 5))
    lhs = cgp_ensemble(coherence_matrix(compose(from_unitary(U), W)), S)
    rhs = cgp_ensemble(coherence_matrix(from_unitary(U)), scm_conjugate(S, spec.permutation))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_commutation_and_decomposition():
    for d in (2, 3, 5):
        assert commutes_with_permutations(scm_haar(d))
        assert commutes_with_permutations(scm_perm_invariant(d, 0.5 / d))
        a, b, res = perm_invariant_decomposition(scm_perm_invariant(d, 0.5 / d))
        assert a == pytest.approx(0.5 / d) and b == pytest.approx(0.5 / d) and res < 1e-15
    S = scm_empirical(np.random.default_rng(0).dirichlet([1, 2, 3], 10))
    assert not commutes_with_permutations(S)
    assert perm_invariant_decomposition(S)[2] > 1e-6


def test_invariant_scm_makes_ensemble_cgp_invariant():
    U = random_haar_unitary(3, 9)
    S = scm_perm_invariant(3, 0.25)
    base = cgp_ensemble(coherence_matrix(from_unitary(U)), S)
    for k in range(5):
        W = incoherent_unitary(random_incoherent_spec(3, k))
        assert cgp_ensemble(coherence_matrix(compose(from_unitary(U), W)), S) == pytest.approx(base, abs=1e-12)


def test_json_round_trip():
    import json
    for S in (scm_haar(3), scm_perm_invariant(3, 0.1), scm_dirichlet_mc(2, [1, 2], 500, 3)):
        doc = json.loads(json.dumps(scm_to_dict(S)))
        back = scm_from_dict(doc)
        np.testing.assert_array_equal(back.entries, S.entries)
        assert back.kind == S.kind


def test_json_from_kind():
    np.testing.assert_allclose(scm_from_dict({"dim": 3, "kind": "haar"}).entries, scm_haar(3).entries)
    S = scm_from_dict({"dim": 2, "kind": "dirichlet"}, seed=1, n_samples=100)
    assert S.n_samples == 100 and S.seed == 1


@pytest.mark.parametrize("doc", [
    None,
    {"kind": "haar"},
    {"dim": 2, "kind": "bogus"},
    {"dim": 2, "kind": "perm_invariant"},
    {"dim": 2, "kind": "perm_invariant", "alpha": 0.9},
    {"dim": 2, "kind": "empirical"},
    {"dim": 3, "kind": "haar", "entries": [[1, 0], [0, 1]]},
])
def test_json_errors(doc):
    with pytest.raises(SchemaError):
        scm_from_dict(doc)
