import itertools
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from matchkernel.circuits import AnsatzKind, CircuitSpec, Entangler, Rotation

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"
FERMIONIC = [AnsatzKind.FPQC, AnsatzKind.HFPQC, AnsatzKind.TENSOR_FPQC]


def haar_unitary(rng, n=2):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_matchgate_blocks(rng):
    """Haar ``A`` and a Haar ``W`` rephased so that ``det W = det A``."""
    A, W = haar_unitary(rng), haar_unitary(rng)
    W = W * np.sqrt(np.linalg.det(A) / np.linalg.det(W))
    return A, W


def random_layout_spec(rng, n_qubits, n_gates, kind=AnsatzKind.FPQC):
    """Fermionic spec with gates at random wires, mixing rotation and entangler placements."""
    layout, slot = [], 0
    for _ in range(n_gates):
        w = int(rng.integers(1, n_qubits))
        r = rng.random()
        if r < 0.35:
            layout.append(Rotation("Ry", w, (slot, slot + 1)))
            slot += 2
        elif r < 0.7:
            layout.append(Rotation("Rz", w, (slot, slot + 1)))
            slot += 2
        else:
            layout.append(Entangler("ZX" if rng.random() < 0.5 else "HH", w))
    return CircuitSpec(n_qubits, kind, 1, tuple(layout), slot)


def gaussian(A, B, gamma=1.0):
    d = ((A[:, None, :] - B[None, :, :]) ** 2).sum(-1)
    return np.exp(-gamma * d)


def brute_force_dual(K, y, C):
    """Exact box-constrained dual QP by enumerating which alphas sit at 0, C or strictly inside.

    For each assignment the free alphas solve the KKT linear system of the
    equality-constrained problem; the best feasible objective wins.
    """
    n = y.size
    Q = (y[:, None] * y[None, :]) * K
    best, best_alpha = -np.inf, None
    for states in itertools.product((0, 1, 2), repeat=n):
        states = np.array(states)
        free = np.flatnonzero(states == 1)
        alpha = np.where(states == 2, C, 0.0)
        if free.size:
            bound = np.flatnonzero(states != 1)
            m = free.size
            A = np.zeros((m + 1, m + 1))
            A[:m, :m] = Q[np.ix_(free, free)]
            A[:m, m] = y[free]
            A[m, :m] = y[free]
            rhs = np.concatenate([1 - Q[np.ix_(free, bound)] @ alpha[bound],
                                  [-(y[bound] @ alpha[bound])]])
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.abs(A @ sol - rhs).max() > 1e-9:
                continue
            alpha[free] = sol[:m]
        if alpha.min() < -1e-12 or alpha.max() > C + 1e-12 or abs(alpha @ y) > 1e-9:
            continue
        obj = alpha.sum() - 0.5 * alpha @ Q @ alpha
        if obj > best:
            best, best_alpha = obj, alpha
    return best, best_alpha


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def wbc_golden():
    from matchkernel import dataio
    return dataio.load_csv(FIXTURES / "wbc_golden.csv", "label")


@pytest.fixture(scope="session")
def digits_golden():
    from matchkernel import dataio
    return dataio.load_csv(FIXTURES / "digits_golden.csv", "label")


# acceptance criteria record one verdict line each; printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
