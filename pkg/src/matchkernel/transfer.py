"""Compilation of matchgate circuits into Majorana transfer matrices.

A circuit ``U = U_L ... U_1`` (gate 1 applied first) acts on Majoranas as
``U c_mu U^dag = sum_nu R_{mu nu} c_nu`` with ``R = R_1 R_2 ... R_L``, where
each ``R_g`` is the identity outside the 4x4 block of its two wires.
"""
from __future__ import annotations

import numpy as np

from . import gates
from .circuits import CircuitSpec, matchgate_unitaries

ORTHO_ATOL = 1e-9

_B_BLOCK = np.array([[1, 1j], [-1j, 1]])


def _block_offsets(spec: CircuitSpec) -> np.ndarray:
    # 0-based column of c_{2k-1} for a gate on wires (k, k+1)
    return np.array([2 * (p.wire - 1) for p in spec.layout], dtype=int)


def compile_transfer(spec: CircuitSpec, angles, initial: np.ndarray | None = None) -> np.ndarray:
    """Real orthogonal ``2N x 2N`` transfer matrix of a fermionic circuit.

    ``angles`` may carry leading batch dimensions, in which case a stack of
    transfer matrices is returned. ``initial`` continues the product from an
    already compiled prefix circuit.
    """
    if not spec.fermionic:
        raise ValueError(f"{spec.kind} circuits have no transfer matrix; use the statevector oracle")
    angles = np.asarray(angles, dtype=float)
    if angles.shape[-1] != spec.num_params:
        raise ValueError(f"expected {spec.num_params} angles, got {angles.shape[-1]}")
    batch = angles.shape[:-1]
    n2 = 2 * spec.n_qubits
    if initial is None:
        R = np.broadcast_to(np.eye(n2), batch + (n2, n2)).copy()
    else:
        R = np.array(np.broadcast_to(initial, batch + (n2, n2)), dtype=float)
    if not spec.layout:
        return R
    blocks = gates.transfer_blocks(matchgate_unitaries(spec, angles))
    for g, o in enumerate(_block_offsets(spec)):
        R[..., :, o:o + 4] = R[..., :, o:o + 4] @ blocks[..., g, :, :]
    return R


def compose(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Transfer matrix of ``second`` applied after ``first``."""
    return np.matmul(first, second)


def adjoint_transfer(R: np.ndarray) -> np.ndarray:
    """Transfer matrix of ``U^dag``: the transpose (= inverse) of ``R``."""
    return np.swapaxes(R, -1, -2)


def check_orthogonal(R: np.ndarray, atol: float = ORTHO_ATOL) -> None:
    R = np.asarray(R)
    eye = np.eye(R.shape[-1])
    err = np.abs(R @ adjoint_transfer(R) - eye).max(initial=0.0)
    if err > atol:
        raise ValueError(f"transfer matrix is not orthogonal (max |R R^T - I| = {err:.3g})")


def transition_matrix(R: np.ndarray) -> np.ndarray:
    """``T_{j,nu} = (R^T_{2j-1,nu} + i R^T_{2j,nu}) / 2``, shape ``(..., N, 2N)``.

    Row ``j`` expands ``U^dag a_j U`` in the Majorana basis.
    """
    Rt = adjoint_transfer(np.asarray(R, dtype=float))
    return 0.5 * (Rt[..., 0::2, :] + 1j * Rt[..., 1::2, :])


def contraction_basis(n_qubits: int) -> np.ndarray:
    """Vacuum two-point function ``B_{mu nu} = <0|c_mu c_nu|0>``: ``N`` copies of ``[[1, i], [-i, 1]]``."""
    if n_qubits < 0:
        raise ValueError("negative qubit count")
    return np.kron(np.eye(n_qubits), _B_BLOCK)
