"""Wick contraction of dressed fermionic operators and fidelity kernels.

Probabilities are expectation values ``<0| phi_1 ... phi_2n |0>`` of operators
linear in the Majoranas. By Wick's theorem such a product equals ``Pf(M)``
with ``M_{kl} = <0|phi_k phi_l|0>`` for ``k < l``. Each ``phi`` is one of

* ``Annih(j)``: ``U^dag a_j U = sum_nu T_{j nu} c_nu``
* ``Creat(j)``: ``U^dag a_j^dag U = sum_nu T*_{j nu} c_nu``
* ``InputMajorana(p)``: ``c_{2p}``, used to prepare basis inputs from the vacuum.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import statevector
from .circuits import AnsatzKind, CircuitSpec, EncodingParams, encode_angles
from .pfaffian import pfaffian, pfaffian_batch
from .transfer import (adjoint_transfer, check_orthogonal, compile_transfer, compose,
                       contraction_basis, transition_matrix)

PROB_ATOL = 1e-8


class NumericalError(ArithmeticError):
    """A Pfaffian that should be a probability is complex or out of range."""


@dataclass(frozen=True)
class Annih:
    line: int


@dataclass(frozen=True)
class Creat:
    line: int


@dataclass(frozen=True)
class InputMajorana:
    position: int


def _operator_vectors(T: np.ndarray, ops) -> np.ndarray:
    n_lines, n_maj = T.shape
    V = np.zeros((len(ops), n_maj), dtype=complex)
    for r, op in enumerate(ops):
        if isinstance(op, (Annih, Creat)):
            if not 1 <= op.line <= n_lines:
                raise ValueError(f"qubit line {op.line} out of range 1..{n_lines}")
            V[r] = T[op.line - 1] if isinstance(op, Annih) else T[op.line - 1].conj()
        elif isinstance(op, InputMajorana):
            if not 1 <= op.position <= n_lines:
                raise ValueError(f"input position {op.position} out of range 1..{n_lines}")
            V[r, 2 * op.position - 1] = 1.0
        else:
            raise TypeError(f"not an operator tag: {op!r}")
    return V


def build_M(T: np.ndarray, B: np.ndarray, ops) -> np.ndarray:
    """Skew-symmetric contraction matrix for the ordered operator list ``ops``.

    The upper triangle holds the pairwise contractions (``TBT^T``, ``TBT^dag``,
    ``T*B T^T``, ``T*BT^dag``, ``TB`` ... of the lookup table, all of the form
    ``v_k B v_l^T``); the lower triangle follows by antisymmetry.
    """
    ops = list(ops)
    if len(ops) % 2:
        raise ValueError(f"need an even number of operators, got {len(ops)}")
    lines_a = sorted(op.line for op in ops if isinstance(op, Annih))
    lines_c = sorted(op.line for op in ops if isinstance(op, Creat))
    if lines_a != lines_c:
        raise ValueError("annihilation and creation tags must come in pairs on the same lines")
    V = _operator_vectors(np.asarray(T), ops)
    upper = np.triu(V @ np.asarray(B) @ V.T, 1)
    return upper - upper.T


def _as_probability(pf: complex) -> float:
    if abs(pf.imag) >= PROB_ATOL or not -PROB_ATOL <= pf.real <= 1 + PROB_ATOL:
        raise NumericalError(f"Pfaffian {pf:.6g} is not a probability")
    return min(max(pf.real, 0.0), 1.0)


def vacuum_ops(n_qubits: int) -> list:
    ops = []
    for j in range(1, n_qubits + 1):
        ops += [Annih(j), Creat(j)]
    return ops


def vacuum_probability(R: np.ndarray) -> float:
    """``|<0|U|0>|^2`` for the circuit with transfer matrix ``R``."""
    R = np.asarray(R, dtype=float)
    n = R.shape[0] // 2
    M = build_M(transition_matrix(R), contraction_basis(n), vacuum_ops(n))
    return _as_probability(complex(pfaffian(M)))


def marginal_probability(R: np.ndarray, input_ones, measured, outcomes) -> float:
    """Probability that qubits ``measured`` read ``outcomes`` after ``U`` acts on ``|x>``.

    ``input_ones`` lists the 1-based positions of the ones in ``x``.
    """
    R = np.asarray(R, dtype=float)
    n = R.shape[0] // 2
    inputs = list(input_ones)
    if inputs != sorted(set(inputs)):
        raise ValueError(f"input positions must be strictly ascending, got {inputs}")
    measured = list(measured)
    if len(set(measured)) != len(measured):
        raise ValueError(f"measured qubits must be distinct, got {measured}")
    if len(outcomes) != len(measured):
        raise ValueError("one outcome per measured qubit")
    ops = [InputMajorana(p) for p in reversed(inputs)]
    for j, bit in zip(measured, outcomes):
        if bit not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {bit}")
        ops += [Annih(j), Creat(j)] if bit == 0 else [Creat(j), Annih(j)]
    ops += [InputMajorana(p) for p in inputs]
    M = build_M(transition_matrix(R), contraction_basis(n), ops)
    return _as_probability(complex(pfaffian(M)))


def _check_pair(x, x_prime):
    x, x_prime = np.asarray(x, dtype=float), np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape:
        raise ValueError(f"feature vectors differ in shape: {x.shape} vs {x_prime.shape}")
    return x, x_prime


def _compiled(spec: CircuitSpec, params: EncodingParams, x) -> np.ndarray:
    if spec.num_params == 0:
        return np.eye(2 * spec.n_qubits)
    return compile_transfer(spec, encode_angles(x, params, spec))


def kernel_value(spec: CircuitSpec, params: EncodingParams, x, x_prime) -> float:
    """Fidelity kernel ``|<0|U^dag(x') U(x)|0>|^2``."""
    x, x_prime = _check_pair(x, x_prime)
    if spec.kind is AnsatzKind.TENSOR_PQC:
        return statevector.product_state_kernel(spec, params, x, x_prime)
    if not spec.fermionic:
        raise ValueError(f"{spec.kind} kernels are only available from the statevector oracle")
    R = compose(_compiled(spec, params, x), adjoint_transfer(_compiled(spec, params, x_prime)))
    return vacuum_probability(R)


# ----------------------------------------------------------------------------
# Gram matrices

_OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def majorana_covariance(R: np.ndarray) -> np.ndarray:
    """``R^T Omega R`` with ``Omega = -i <0|c c|0>`` off the diagonal; batched over leading axes."""
    n = R.shape[-1] // 2
    omega = np.kron(np.eye(n), _OMEGA_BLOCK)
    return adjoint_transfer(R) @ omega @ R


def _gram_rows(gammas, dets, rows, out, scale):
    for i in rows:
        stack = gammas[i] + gammas[i + 1:]
        pf = pfaffian_batch(stack, check=False) * dets[i + 1:] * scale
        bad = (pf < -PROB_ATOL) | (pf > 1 + PROB_ATOL)
        if bad.any():
            j = i + 1 + int(np.argmax(bad))
            raise NumericalError(f"kernel entry ({i}, {j}) = {pf[j - i - 1]:.6g} out of range")
        out[i, i + 1:] = np.clip(pf, 0.0, 1.0)


def kernel_row(spec: CircuitSpec, params: EncodingParams, x, X) -> np.ndarray:
    """Kernel values between ``x`` and every row of ``X`` (covariance route)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    x = np.asarray(x, dtype=float)
    if x.shape != X.shape[1:]:
        raise ValueError(f"feature vector shape {x.shape} does not match rows of shape {X.shape[1:]}")
    if spec.kind is AnsatzKind.TENSOR_PQC:
        return statevector.product_state_gram(spec, params, np.vstack([x, X]))[0, 1:]
    if not spec.fermionic:
        raise ValueError(f"{spec.kind} kernels are only available from the statevector oracle")
    if spec.num_params == 0:
        return np.ones(X.shape[0])
    Rs = compile_transfer(spec, encode_angles(np.vstack([x, X]), params, spec))
    check_orthogonal(Rs)
    gammas = majorana_covariance(Rs)
    dets = np.sign(np.linalg.det(Rs))
    out = np.zeros((1, X.shape[0] + 1))
    _gram_rows(gammas, dets, [0], out, 0.5 ** spec.n_qubits)
    return out[0, 1:]


def gram_matrix(spec: CircuitSpec, params: EncodingParams, X, method: str = "covariance",
                workers: int = 1) -> np.ndarray:
    """Symmetric matrix of pairwise kernel values with unit diagonal.

    Fermionic circuits are compiled once per data point. ``method="table"``
    evaluates every entry through :func:`kernel_value`. The default
    ``"covariance"`` evaluates the same Pfaffian in a real congruent form:
    with ``Gamma = R^T Omega R`` per point,
    ``Pf(M) = det(R_j) Pf(Gamma_i + Gamma_j) / 2^N``.
    ``tensor_PQC`` uses exact product states and ``PQC`` the dense oracle.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    if n == 0:
        raise ValueError("empty dataset")
    if spec.kind is AnsatzKind.TENSOR_PQC:
        return statevector.product_state_gram(spec, params, X)
    if spec.kind is AnsatzKind.PQC:
        return statevector.oracle_gram(spec, params, X)
    if method not in ("covariance", "table"):
        raise ValueError(f"unknown method {method!r}")

    K = np.eye(n)
    if spec.num_params == 0:
        return np.ones((n, n))
    Rs = compile_transfer(spec, encode_angles(X, params, spec))
    check_orthogonal(Rs)
    if method == "table":
        for i in range(n):
            for j in range(i + 1, n):
                K[i, j] = vacuum_probability(Rs[i] @ Rs[j].T)
    else:
        gammas = majorana_covariance(Rs)
        dets = np.sign(np.linalg.det(Rs))
        scale = 0.5 ** spec.n_qubits
        # interleaved rows keep per-worker cost balanced; every entry is computed in isolation
        chunks = [range(w, n, workers) for w in range(workers)]
        if workers == 1:
            _gram_rows(gammas, dets, chunks[0], K, scale)
        else:
            with ThreadPoolExecutor(workers) as pool:
                list(pool.map(lambda rows: _gram_rows(gammas, dets, rows, K, scale), chunks))
    iu = np.triu_indices(n, 1)
    K[(iu[1], iu[0])] = K[iu]
    return K
