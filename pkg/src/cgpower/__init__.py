"""Coherence-generating power of unital quantum channels.

The coherence matrix ``C(E)`` of a unital channel with respect to a basis,
the transfer matrix ``X(U)`` of a unitary, simplex correlation matrices of
incoherent input ensembles, and the CGP measures built from them.
"""
from .additive import phi_alpha, phi_g, phi_g_tilde, phi_p, renyi_entropy
from .assignment import AssignmentResult, brute_force_assignment, max_assignment
from .channels import (
    Channel,
    IncoherentUnitarySpec,
    NonUnitalChannelError,
    NotUnitaryError,
    apply,
    compose,
    dephasing_channel,
    fourier_unitary,
    from_kraus,
    from_unitary,
    hadamard,
    identity_channel,
    incoherent_unitary,
    mixture,
    qubit_unitary,
    random_haar_unitary,
    random_unital_channel,
    tensor,
)
from .coherence import (
    cgp_g,
    cgp_geometric_f,
    cgp_geometric_min,
    cgp_measure,
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
    SimplexCorrelationMatrix,
    cgp_ensemble,
    cgp_qubit_symmetric,
    haar_state_mc_oracle,
    scm_conjugate,
    scm_dirichlet_mc,
    scm_empirical,
    scm_haar,
    scm_perm_invariant,
    scm_vertex,
)
from .opspace import BasisProjectorSet, dephase, hs_inner, q_part, symmetric_eigs

__version__ = "0.1.0"
