"""Additive measures on tensor products.

The transfer matrix of U_A (x) U_B is the Kronecker product of the factors,
so the entropic measures add up. Here we check it for two random gates and
show the Renyi ordering phi_gtilde >= phi_2 >= phi_p.
"""
import numpy as np

from cgpower import phi_alpha, phi_g, phi_g_tilde, phi_p, random_haar_unitary, transfer_matrix

UA, UB = random_haar_unitary(2, seed=3), random_haar_unitary(3, seed=4)
XA, XB, XAB = transfer_matrix(UA), transfer_matrix(UB), transfer_matrix(np.kron(UA, UB))

for name, f in [("phi_p", phi_p), ("phi_g", phi_g), ("phi_gtilde", phi_g_tilde),
                ("phi_0.5", lambda X: phi_alpha(X, 0.5)), ("phi_2", lambda X: phi_alpha(X, 2.0))]:
    a, b, ab = f(XA), f(XB), f(XAB)
    print(f"{name:10s} A={a:.6f} B={b:.6f} A+B={a + b:.6f} AB={ab:.6f}")

X = XAB
print("chain:", phi_g_tilde(X), ">=", phi_alpha(X, 2.0), ">=", phi_p(X))
