"""Input ensembles: which incoherent states are fed to the channel matters.

The ensemble CGP contracts the coherence matrix with the second moments of
the input distribution on the simplex. Uniform (Haar) inputs, vertex inputs
and the permutation-invariant family between them give different numbers
for the same gate. A direct Monte-Carlo over Haar states reproduces the
Haar value without ever forming the coherence matrix.
"""
import numpy as np

from cgpower import (
    cgp_ensemble,
    coherence_matrix,
    haar_state_mc_oracle,
    random_unital_channel,
    scm_dirichlet_mc,
    scm_haar,
    scm_perm_invariant,
    scm_vertex,
)

d = 3
ch = random_unital_channel(d, n_kraus=2, seed=7)
C = coherence_matrix(ch)

print("Haar      :", cgp_ensemble(C, scm_haar(d)))
print("vertex    :", cgp_ensemble(C, scm_vertex(d)))
for alpha in np.linspace(0, 1 / d, 5):
    print(f"alpha={alpha:.3f}:", cgp_ensemble(C, scm_perm_invariant(d, alpha)))

S = scm_dirichlet_mc(d, [1, 1, 1], n_samples=200_000, seed=0)
print("flat Dirichlet MC SCM:", cgp_ensemble(C, S))

est = haar_state_mc_oracle(ch, n_samples=200_000, seed=0)
print(f"Haar-state MC: {est.value:.6f} +/- {est.std_error:.6f}")
print("closed form Tr C / (d(d+1)):", np.trace(C) / (d * (d + 1)))
