"""
Fidelity kernels from Pfaffians
===============================

The kernel between two encoded points is |<0|U(x')^dag U(x)|0>|^2. For a
matchgate circuit the overlap circuit has transfer matrix R(x) R(x')^T, and
the vacuum return probability is the Pfaffian of a skew-symmetric
contraction matrix built from it.
"""

import numpy as np

from matchkernel import statevector
from matchkernel.circuits import build_ansatz, encode_angles
from matchkernel.contraction import (Annih, Creat, build_M, gram_matrix, kernel_value,
                                     marginal_probability)
from matchkernel.pfaffian import pfaffian
from matchkernel.transfer import compile_transfer, contraction_basis, transition_matrix

rng = np.random.default_rng(7)

# Pfaffian basics: Pf^2 = det, and the sign is definite
A = rng.normal(size=(6, 6))
A = A - A.T
print(pfaffian(A), pfaffian(A) ** 2, np.linalg.det(A))

# contraction matrix for the identity circuit on one qubit: <0|a a^dag|0> = 1
print(build_M(transition_matrix(np.eye(2)), contraction_basis(1), [Annih(1), Creat(1)]).real)

# kernel values against the dense simulator
spec, params = build_ansatz(6, 10, "hfPQC", seed=3)
x, y = rng.random(10), rng.random(10)
print(kernel_value(spec, params, x, y), statevector.oracle_kernel(spec, params, x, y))

# marginals: qubits 1 and 3 after the circuit acts on |010000>
R = compile_transfer(spec, encode_angles(x, params, spec))
for bits in ((0, 0), (0, 1), (1, 0), (1, 1)):
    print(bits, round(marginal_probability(R, [2], [1, 3], bits), 4))

# a Gram matrix: symmetric, unit diagonal, positive semidefinite
X = rng.random((40, 10))
K = gram_matrix(spec, params, X)
print(K.shape, np.allclose(K, K.T), np.linalg.eigvalsh(K).min())

# the same machinery at 30 qubits, far beyond dense simulation
big, big_params = build_ansatz(30, 10, "fPQC", seed=3)
print(gram_matrix(big, big_params, X[:5]).round(3))
