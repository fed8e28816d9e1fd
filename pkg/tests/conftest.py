import numpy as np
import pytest

from cgpower.channels import fourier_unitary, hadamard, random_haar_unitary


def encode(M):
    """Matrix as the JSON ``[re, im]`` nested list."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def unitary_doc(U, label="u"):
    U = np.asarray(U, dtype=complex)
    return {"dim": U.shape[0], "type": "unitary", "matrix": encode(U), "label": label}


@pytest.fixture
def H():
    return hadamard()


@pytest.fixture
def F3():
    return fourier_unitary(3)


@pytest.fixture
def haar():
    return lambda d, seed: random_haar_unitary(d, seed)
