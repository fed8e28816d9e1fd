"""Measuring the Gram matrix with two copies and a swap.

For basis projectors P_i, P_j the overlap <E(P_i), E(P_j)> equals the
expectation of the swap operator on (E (x) E)(P_i (x) P_j). This is a
physically realisable estimate of the Gram matrix, and it agrees with the
direct computation. The coherence matrix then follows by subtracting the
Gram matrix of the dephased channel.
"""
import numpy as np

from cgpower import (
    BasisProjectorSet,
    coherence_matrix,
    compose,
    dephasing_channel,
    gram_matrix,
    gram_matrix_swap_protocol,
    random_unital_channel,
)

ch = random_unital_channel(3, n_kraus=3, seed=11)
A_direct = gram_matrix(ch)
A_swap = gram_matrix_swap_protocol(ch)
print("Gram (direct):\n", np.round(A_direct, 6))
print("max |swap - direct| =", np.max(np.abs(A_swap - A_direct)))

B = BasisProjectorSet.computational(3)
A_deph = gram_matrix_swap_protocol(compose(dephasing_channel(B), ch))
print("C from two swap estimates:\n", np.round(A_swap - A_deph, 6))
print("max deviation from coherence_matrix:", np.max(np.abs(A_swap - A_deph - coherence_matrix(ch))))
