"""How much coherence does a single-qubit gate generate?

A qubit unitary with |<0|U|0>|^2 = t has transfer matrix t I + (1 - t) sigma_x.
We sweep t and compare the trace-norm, permutation-distance and Haar-ensemble
measures. All three vanish at the incoherent endpoints (identity and NOT) and
peak at the Hadamard point t = 1/2.
"""
import numpy as np

from cgpower import (
    cgp_ensemble,
    cgp_permutation_distance,
    cgp_trace_norm,
    coherence_matrix,
    from_unitary,
    qubit_unitary,
    scm_haar,
    transfer_matrix,
)

print(f"{'|a|^2':>6} {'trace':>8} {'tilde':>8} {'haar':>8}")
for t in np.linspace(0, 1, 11):
    U = qubit_unitary(np.sqrt(t), np.sqrt(1 - t))
    C = coherence_matrix(from_unitary(U))
    tilde, _ = cgp_permutation_distance(transfer_matrix(U))
    print(f"{t:6.2f} {cgp_trace_norm(C):8.4f} {tilde:8.4f} {cgp_ensemble(C, scm_haar(2)):8.4f}")

# The permutation distance is the smaller one away from t = 1/2:
# 4 min(t^2, (1-t)^2) <= 4 t (1 - t).
