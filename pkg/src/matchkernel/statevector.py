"""Dense statevector reference simulator.

Ground truth for the fermionic machinery at small ``N`` and the execution
backend for the unrestricted ``PQC`` baselines. Qubit 1 is the most
significant bit of the basis index, matching the ``{|00>, |01>, |10>, |11>}``
ordering of two-qubit gates.
"""
from __future__ import annotations

import numpy as np

from . import gates
from .circuits import (CircuitSpec, EncodingParams, Entangler, batched_gates, circuit_gates,
                       encode_angles)

MAX_STATE_QUBITS = 12
MAX_TRANSFER_QUBITS = 6


class ResourceError(ValueError):
    """Requested dense simulation exceeds the configured qubit cap."""


def _guard(n_qubits: int, cap: int = MAX_STATE_QUBITS) -> None:
    if n_qubits > cap:
        raise ResourceError(f"dense simulation limited to {cap} qubits, got {n_qubits}")


def basis_state(bits) -> np.ndarray:
    bits = [int(b) for b in bits]
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int("".join(map(str, bits)), 2) if bits else 0] = 1.0
    return psi


def apply_gate(states: np.ndarray, u: np.ndarray, wires, n_qubits: int) -> np.ndarray:
    """Apply a 1- or 2-qubit gate on adjacent ``wires`` to ``(..., 2^N)`` states."""
    k = wires[0]
    dim = u.shape[0]
    span = dim.bit_length() - 1
    lead = states.shape[:-1]
    view = states.reshape(lead + (2 ** (k - 1), dim, 2 ** (n_qubits - k - span + 1)))
    out = np.einsum("ij,...ajb->...aib", u, view)
    return out.reshape(lead + (2 ** n_qubits,))


def _run(spec: CircuitSpec, angles, states: np.ndarray) -> np.ndarray:
    for wires, u in circuit_gates(spec, angles):
        states = apply_gate(states, u, wires, spec.n_qubits)
    return states


def simulate_state(spec: CircuitSpec, angles, initial_bits=None) -> np.ndarray:
    """``U|x>`` for the basis input ``x`` (all zeros by default)."""
    _guard(spec.n_qubits)
    bits = [0] * spec.n_qubits if initial_bits is None else list(initial_bits)
    if len(bits) != spec.n_qubits:
        raise ValueError(f"input has {len(bits)} bits for {spec.n_qubits} qubits")
    return _run(spec, angles, basis_state(bits))


def simulate_states(spec: CircuitSpec, params: EncodingParams, X) -> np.ndarray:
    """Encoded states ``U(x)|0>`` for every row of ``X``, shape ``(n, 2^N)``."""
    _guard(spec.n_qubits)
    angles = encode_angles(np.atleast_2d(X), params, spec)
    return _evolve_batch(spec, angles, list(range(1, spec.n_qubits + 1)))


def circuit_unitary(spec: CircuitSpec, angles) -> np.ndarray:
    """Full ``2^N x 2^N`` circuit matrix, built column by column."""
    _guard(spec.n_qubits, MAX_TRANSFER_QUBITS)
    dim = 2 ** spec.n_qubits
    # rows of the identity are evolved as a batch of states -> U^T
    return _run(spec, angles, np.eye(dim, dtype=complex)).T


def oracle_kernel(spec: CircuitSpec, params: EncodingParams, x, x_prime) -> float:
    """``|<psi(x')|psi(x)>|^2`` from dense statevectors."""
    psi = simulate_state(spec, encode_angles(x, params, spec))
    phi = simulate_state(spec, encode_angles(x_prime, params, spec))
    return float(abs(np.vdot(phi, psi)) ** 2)


def oracle_gram(spec: CircuitSpec, params: EncodingParams, X) -> np.ndarray:
    """Fidelity Gram matrix from dense states; diagonal set to exactly 1."""
    states = simulate_states(spec, params, X)
    K = np.abs(states.conj() @ states.T) ** 2
    np.fill_diagonal(K, 1.0)
    return K


def brute_force_transfer(spec: CircuitSpec, angles) -> np.ndarray:
    """``R_{mu nu} = 2^-N Tr[(U c_mu U^dag) c_nu]`` with full ``2^N``-dimensional matrices.

    ``Tr[c_mu c_nu] = 2^N delta_{mu nu}``, so the ``2^-N`` normalisation maps
    the identity circuit to the identity matrix.
    """
    n = spec.n_qubits
    _guard(n, MAX_TRANSFER_QUBITS)
    U = circuit_unitary(spec, angles)
    C = gates.majorana_matrices(n)
    conj = U @ C @ U.conj().T
    # traces of Hermitian products are real; the imaginary part is rounding noise
    return np.einsum("mij,nji->mn", conj, C).real / 2 ** n


def marginal_probability(state: np.ndarray, measured, outcomes) -> float:
    """Probability that 1-based qubits ``measured`` read ``outcomes``."""
    n = int(np.log2(state.size))
    probs = (np.abs(state) ** 2).reshape((2,) * n)
    keep = tuple(q - 1 for q in measured)
    others = tuple(i for i in range(n) if i not in keep)
    marg = probs.sum(axis=others) if others else probs
    # summed array keeps the measured axes in ascending qubit order
    order = np.argsort(keep)
    idx = tuple(int(outcomes[i]) for i in order)
    return float(marg[idx])


def _components(spec: CircuitSpec) -> list[list[int]]:
    """Contiguous wire groups coupled by at least one gate."""
    parent = list(range(spec.n_qubits + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in spec.layout:
        w = p.wires
        if len(w) == 2:
            parent[find(w[1])] = find(w[0])
    groups: dict[int, list[int]] = {}
    for q in range(1, spec.n_qubits + 1):
        groups.setdefault(find(q), []).append(q)
    return sorted(groups.values())


def _evolve_batch(spec: CircuitSpec, angles: np.ndarray, wires: list[int]) -> np.ndarray:
    """Propagate ``|0..0>`` on the contiguous register ``wires`` for each angle row."""
    lo, n_sub = wires[0], len(wires)
    _guard(n_sub)
    states = np.zeros((angles.shape[0], 2 ** n_sub), dtype=complex)
    states[:, 0] = 1.0
    for gw, u in batched_gates(spec, angles):
        if gw[0] in wires:
            states = _apply_batched(states, u, gw[0] - lo + 1, n_sub)
    return states


def _apply_batched(states, u, k, n_sub):
    # u carries the same leading batch axis as states
    dim = u.shape[-1]
    span = dim.bit_length() - 1
    b = states.shape[0]
    view = states.reshape(b, 2 ** (k - 1), dim, 2 ** (n_sub - k - span + 1))
    return np.einsum("zij,zajb->zaib", u, view).reshape(b, 2 ** n_sub)


def product_state_kernel(spec: CircuitSpec, params: EncodingParams, x, x_prime) -> float:
    """Kernel of an entangler-free circuit as a product of per-block overlaps.

    Wires never coupled by a two-qubit gate contribute single-qubit overlaps;
    wires coupled by matchgate rotation rows are simulated together.
    """
    return float(product_state_gram(spec, params, np.stack([x, x_prime]))[0, 1])


def product_state_gram(spec: CircuitSpec, params: EncodingParams, X) -> np.ndarray:
    if any(isinstance(p, Entangler) for p in spec.layout):
        raise ValueError(f"{spec.kind} circuit contains entanglers; not a product state")
    angles = encode_angles(np.atleast_2d(X), params, spec)
    K = np.ones((angles.shape[0],) * 2)
    for wires in _components(spec):
        states = _evolve_batch(spec, angles, wires)
        K *= np.abs(states.conj() @ states.T) ** 2
    np.fill_diagonal(K, 1.0)
    return K
