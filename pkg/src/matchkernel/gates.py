r"""Matchgates, their Majorana/Pauli correspondences and per-gate transfer blocks.

A two-qubit matchgate is parameterised by an even-parity block ``A`` acting on
``{|00>, |11>}`` and an odd-parity block ``W`` acting on ``{|01>, |10>}``:

.. math::
    U(A, W) = \begin{pmatrix}
        a & 0 & 0 & b \\
        0 & w & x & 0 \\
        0 & y & z & 0 \\
        c & 0 & 0 & d
    \end{pmatrix}, \qquad \det A = \det W.

Majorana operators follow the Jordan-Wigner layout ``c_{2k-1} = Z..Z X I..I``
and ``c_{2k} = Z..Z Y I..I``; indices are 1-based in the public API.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

GATE_ATOL = 1e-12
TRANSFER_ATOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# even block sits on rows/cols {0, 3}, odd block on {1, 2}
_EVEN = np.array([0, 3])
_ODD = np.array([1, 2])

# local Majoranas on the two-qubit space: X⊗I, Y⊗I, Z⊗X, Z⊗Y
LOCAL_MAJORANAS = np.stack([
    np.kron(PAULI["X"], PAULI["I"]),
    np.kron(PAULI["Y"], PAULI["I"]),
    np.kron(PAULI["Z"], PAULI["X"]),
    np.kron(PAULI["Z"], PAULI["Y"]),
])


class MatchgateError(ValueError):
    """Raised for blocks that do not form a valid matchgate."""


@dataclass(frozen=True, eq=False)
class Matchgate:
    """A validated ``U(A, W)`` acting on wires ``(wire, wire + 1)`` (1-based)."""

    A: np.ndarray
    W: np.ndarray
    wire: int = 1

    def unitary(self) -> np.ndarray:
        return matchgate_unitary(self)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with a global phase in {±1, ±i}."""

    labels: str
    phase: complex = 1

    def __post_init__(self):
        if not self.labels or set(self.labels) - set("IXYZ"):
            raise ValueError(f"invalid Pauli labels {self.labels!r}")
        if self.phase not in (1, -1, 1j, -1j):
            raise ValueError(f"phase must be one of ±1, ±i, got {self.phase}")

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def to_matrix(self) -> np.ndarray:
        return self.phase * reduce(np.kron, (PAULI[p] for p in self.labels))


def _is_unitary(m: np.ndarray, atol: float = GATE_ATOL) -> bool:
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0.0, atol=atol)


def make_matchgate(A, W, wire: int = 1) -> Matchgate:
    """Validate ``A`` and ``W`` and bundle them into a :class:`Matchgate`.

    Raises :class:`MatchgateError` if either block is not a 2x2 unitary or if
    ``|det A - det W| > 1e-12``.
    """
    A = np.array(A, dtype=complex)
    W = np.array(W, dtype=complex)
    if A.shape != (2, 2) or W.shape != (2, 2):
        raise MatchgateError(f"blocks must be 2x2, got {A.shape} and {W.shape}")
    if wire < 1:
        raise MatchgateError(f"wire index is 1-based, got {wire}")
    if not _is_unitary(A):
        raise MatchgateError("even-parity block A is not unitary")
    if not _is_unitary(W):
        raise MatchgateError("odd-parity block W is not unitary")
    det_a, det_w = np.linalg.det(A), np.linalg.det(W)
    if abs(det_a - det_w) > GATE_ATOL:
        raise MatchgateError(f"det A = {det_a:.6g} differs from det W = {det_w:.6g}")
    A.setflags(write=False)
    W.setflags(write=False)
    return Matchgate(A, W, wire)


def embed_blocks(A: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Place ``A`` and ``W`` into the 4x4 matchgate layout without validation.

    Works on stacks: ``A`` and ``W`` may have shape ``(..., 2, 2)``.
    """
    A = np.asarray(A, dtype=complex)
    W = np.asarray(W, dtype=complex)
    U = np.zeros(np.broadcast_shapes(A.shape, W.shape)[:-2] + (4, 4), dtype=complex)
    U[..., _EVEN[:, None], _EVEN] = A
    U[..., _ODD[:, None], _ODD] = W
    return U


def matchgate_unitary(g: Matchgate) -> np.ndarray:
    return embed_blocks(g.A, g.W)


def ry(theta):
    """``exp(-i theta Y / 2)``; vectorised over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1] = c, -s
    out[..., 1, 0], out[..., 1, 1] = s, c
    return out


def rz(theta):
    """``exp(-i theta Z / 2)``; vectorised over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * theta)
    out[..., 1, 1] = np.exp(0.5j * theta)
    return out


_FIXED_BLOCKS = {"H": HADAMARD, "X": PAULI["X"], "Z": PAULI["Z"], "I": PAULI["I"]}
_ROTATIONS = {"Ry": ry, "Rz": rz}


def rotation_block(kind: str, angle: float | None = None) -> np.ndarray:
    """Single-qubit block by name: ``Ry``/``Rz`` take an angle, ``H``/``X``/``Z``/``I`` do not."""
    if kind in _ROTATIONS:
        if angle is None:
            raise ValueError(f"{kind} requires an angle")
        return _ROTATIONS[kind](angle)
    if kind in _FIXED_BLOCKS:
        if angle is not None:
            raise ValueError(f"{kind} takes no angle, got {angle}")
        return _FIXED_BLOCKS[kind].copy()
    raise ValueError(f"unknown block kind {kind!r}")


def majorana_pauli_string(mu: int, n_qubits: int) -> PauliString:
    """Jordan-Wigner Pauli string of the Majorana operator ``c_mu`` (1-based)."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if not 1 <= mu <= 2 * n_qubits:
        raise ValueError(f"Majorana index {mu} out of range 1..{2 * n_qubits}")
    k = (mu + 1) // 2
    local = "X" if mu % 2 else "Y"
    return PauliString("Z" * (k - 1) + local + "I" * (n_qubits - k))


def majorana_matrices(n_qubits: int) -> np.ndarray:
    """Dense ``(2N, 2^N, 2^N)`` stack of Majorana matrices ``c_1 .. c_2N``."""
    return np.stack([majorana_pauli_string(mu, n_qubits).to_matrix()
                     for mu in range(1, 2 * n_qubits + 1)])


def transfer_blocks(unitaries: np.ndarray, atol: float = TRANSFER_ATOL) -> np.ndarray:
    """Vectorised ``R_{mu nu} = Tr[(U c_mu U^dag) c_nu] / 4`` for a stack of 4x4 unitaries.

    The entries are always real, being traces of products of two Hermitian
    matrices, so the imaginary part is rounding noise and is dropped. A
    unitary that is not a matchgate sends part of ``c_mu`` outside the
    Majorana span, which shows up as a block that is not orthogonal.
    """
    U = np.asarray(unitaries, dtype=complex)
    C = LOCAL_MAJORANAS
    conj = np.einsum("...ij,mjk,...lk->...mil", U, C, U.conj(), optimize=True)
    R = np.ascontiguousarray(np.einsum("...mij,nji->...mn", conj, C, optimize=True).real / 4)
    ortho = np.abs(R @ np.swapaxes(R, -1, -2) - np.eye(4)).max(initial=0.0)
    if ortho > atol:
        raise MatchgateError(f"transfer block is not orthogonal (deviation {ortho:.3g}); "
                             "input is not a matchgate")
    return R


def single_gate_transfer(g: Matchgate) -> np.ndarray:
    """4x4 real orthogonal block of ``R`` on Majorana indices ``2k-1 .. 2k+2``."""
    return transfer_blocks(matchgate_unitary(g))
