"""
Matchgates, Majoranas and transfer matrices
===========================================

A two-qubit matchgate acts on the even-parity pair {|00>, |11>} with one
2x2 unitary and on the odd-parity pair {|01>, |10>} with another, with equal
determinants. Conjugating a Majorana operator by such a gate gives a real
rotation of the Majoranas, so a whole circuit compresses to one orthogonal
2N x 2N matrix.

    python3 notebooks/01_matchgates_and_transfer.py
"""

import numpy as np

from matchkernel import gates, statevector
from matchkernel.circuits import build_ansatz, encode_angles
from matchkernel.transfer import compile_transfer

np.set_printoptions(precision=3, suppress=True)

# U(Z, X): Z on the even pair, X on the odd pair. det Z = det X = -1.
g = gates.make_matchgate(gates.PAULI["Z"], gates.PAULI["X"])
print(gates.matchgate_unitary(g).real)

# its 4x4 transfer block: a signed permutation of c1..c4
print(gates.single_gate_transfer(g))

# U(Z, I) breaks the determinant rule
try:
    gates.make_matchgate(gates.PAULI["Z"], np.eye(2))
except gates.MatchgateError as exc:
    print("rejected:", exc)

# Jordan-Wigner: c_{2k-1} = Z..Z X, c_{2k} = Z..Z Y
print(gates.majorana_pauli_string(4, 2))

# a random ansatz on 4 qubits, one data point
spec, params = build_ansatz(4, 6, "fPQC", seed=0)
x = np.random.default_rng(0).random(6)
angles = encode_angles(x, params, spec)
R = compile_transfer(spec, angles)

# R is real orthogonal
print(np.abs(R @ R.T - np.eye(8)).max())

# and it agrees with the definition R_mn = 2^-N Tr[(U c_m U^dag) c_n]
print(np.abs(R - statevector.brute_force_transfer(spec, angles)).max())

# the same compile costs O(gates * N) at 64 qubits, where a state vector would need 2^64 entries
big, big_params = build_ansatz(64, 64, "fPQC", seed=0)
R64 = compile_transfer(big, encode_angles(np.random.default_rng(1).random(64), big_params, big))
print(R64.shape, np.abs(R64 @ R64.T - np.eye(128)).max())
