"""Pfaffians of skew-symmetric matrices.

Parlett-Reid skew tridiagonalisation with partial pivoting, O(n^3) per
matrix. The elimination loop is compiled with numba and specialises on the
input dtype, so real inputs take the cheaper real arithmetic path.
"""
from __future__ import annotations

import numba
import numpy as np

SKEW_ATOL = 1e-10
PIVOT_RTOL = 1e-13


@numba.njit(cache=True, nogil=True)
def _pfaffian_inplace(A, floor):
    # only the strict upper triangle is read and written; A[i, j] = -A[j, i] below it
    n = A.shape[0]
    pf = A[0, 0] * 0 + 1
    for k in range(0, n - 1, 2):
        p = k + 1
        q = p
        best = abs(A[k, p])
        for i in range(p + 1, n):
            v = abs(A[k, i])
            if v > best:
                best = v
                q = i
        if q != p:
            # symmetric swap of indices p < q in upper-triangle storage
            t = A[k, p]
            A[k, p] = A[k, q]
            A[k, q] = t
            for j in range(q + 1, n):
                t = A[p, j]
                A[p, j] = A[q, j]
                A[q, j] = t
            for l in range(p + 1, q):
                t = A[p, l]
                A[p, l] = -A[l, q]
                A[l, q] = -t
            A[p, q] = -A[p, q]
            pf = -pf
        pivot = A[k, p]
        if abs(pivot) <= floor:
            return pf * 0
        pf *= pivot
        m = n - k - 2
        if m > 0:
            tau = A[k, k + 2:] * (1 / pivot)
            u = -A[p, k + 2:]
            for i in range(m - 1):
                ti = tau[i]
                ui = u[i]
                row = A[k + 2 + i]
                for j in range(i + 1, m):
                    row[k + 2 + j] += ti * u[j] - ui * tau[j]
    return pf


@numba.njit(cache=True, nogil=True)
def _pfaffian_stack(M, rtol):
    out = np.empty(M.shape[0], dtype=M.dtype)
    for b in range(M.shape[0]):
        A = M[b].copy()
        out[b] = _pfaffian_inplace(A, rtol * np.abs(A).max())
    return out


def check_skew(M: np.ndarray, atol: float = SKEW_ATOL) -> None:
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {M.shape}")
    if M.shape[-1] % 2:
        raise ValueError(f"Pfaffian undefined for odd dimension {M.shape[-1]}")
    if M.size:
        scale = max(1.0, float(np.abs(M).max()))
        err = float(np.abs(M + np.swapaxes(M, -1, -2)).max())
        if err > atol * scale:
            raise ValueError(f"matrix is not skew-symmetric (max |M + M^T| = {err:.3g})")


def pfaffian_batch(M, check: bool = True) -> np.ndarray:
    """Pfaffians of a ``(batch, 2m, 2m)`` stack; real input gives real output.

    A pivot below ``1e-13 * max|M|`` marks the matrix singular and its
    Pfaffian is returned as exactly zero.
    """
    M = np.asarray(M)
    if M.ndim != 3:
        raise ValueError(f"expected a (batch, n, n) stack, got shape {M.shape}")
    if check:
        check_skew(M)
    dtype = np.float64 if np.isrealobj(M) else np.complex128
    M = np.ascontiguousarray(M, dtype=dtype)
    if M.shape[-1] == 0 or M.shape[0] == 0:
        return np.ones(M.shape[0], dtype=dtype)
    return _pfaffian_stack(M, PIVOT_RTOL)


def pfaffian(M):
    """Sign-correct Pfaffian of one skew-symmetric matrix; ``Pf`` of the empty matrix is 1."""
    M = np.asarray(M)
    check_skew(M)
    return pfaffian_batch(M[None], check=False)[0].item()
