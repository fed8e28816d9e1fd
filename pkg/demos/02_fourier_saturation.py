"""The discrete Fourier transform is maximally coherence-generating.

Its transfer matrix is the flat matrix J/d, as far from every permutation
as a bistochastic matrix can be. Both the trace-norm measure and the
permutation distance reach their upper bound d - 1, and every additive
measure reaches log d (phi_g diverges, since J/d is singular).
"""
import numpy as np

from cgpower import (
    cgp_permutation_distance,
    cgp_trace_norm,
    coherence_matrix,
    fourier_unitary,
    from_unitary,
    phi_alpha,
    phi_g,
    phi_g_tilde,
    phi_p,
    random_haar_unitary,
    transfer_matrix,
)

for d in range(2, 7):
    F = fourier_unitary(d)
    X = transfer_matrix(F)
    trace = cgp_trace_norm(coherence_matrix(from_unitary(F)))
    tilde, _ = cgp_permutation_distance(X)
    print(f"d={d}: trace={trace:.6f} tilde={tilde:.6f} (bound {d - 1}); "
          f"phi_p={phi_p(X):.4f} phi_gtilde={phi_g_tilde(X):.4f} phi_0.5={phi_alpha(X, 0.5):.4f} "
          f"phi_g={phi_g(X)} (log d = {np.log(d):.4f})")

# A typical Haar-random unitary sits well inside the bounds.
U = random_haar_unitary(5, seed=1)
print("random d=5 unitary: trace =", round(cgp_trace_norm(coherence_matrix(from_unitary(U))), 4))
