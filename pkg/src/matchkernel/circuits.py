"""Layered ansatz family and data-to-angle encoding.

Every layer pair is a row of parameterised ``Ry`` gates, an entangler row, a
row of ``Rz`` gates and another entangler row. Fermionic rotation rows place
``U(R(a), R(b))`` on the disjoint pairs ``(1,2), (3,4), ...`` only, so without
entanglers the register splits into independent two-qubit blocks. Entangler
rows are brick walls: the odd pairs ``(1,2), (3,4), ...`` then the even pairs
``(2,3), (4,5), ...``. The number of layer pairs is ``ceil(chi / N)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import gates

HALF_PI = math.pi / 2


class AnsatzKind(str, Enum):
    FPQC = "fPQC"
    HFPQC = "hfPQC"
    TENSOR_FPQC = "tensor_fPQC"
    PQC = "PQC"
    TENSOR_PQC = "tensor_PQC"

    @classmethod
    def parse(cls, value) -> "AnsatzKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name) or str(value).lower() == kind.value.lower():
                return kind
        raise ValueError(f"unknown ansatz kind {value!r}; "
                         f"choose from {', '.join(k.value for k in cls)}")

    @property
    def fermionic(self) -> bool:
        return self in (AnsatzKind.FPQC, AnsatzKind.HFPQC, AnsatzKind.TENSOR_FPQC)

    @property
    def entangled(self) -> bool:
        return self in (AnsatzKind.FPQC, AnsatzKind.HFPQC, AnsatzKind.PQC)

    def __str__(self):
        return self.value


_ENTANGLER_BLOCKS = {
    AnsatzKind.FPQC: "ZX",
    AnsatzKind.HFPQC: "HH",
    AnsatzKind.PQC: "CX",
}

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class Rotation:
    """Parameterised rotation row element.

    With two slots this is the matchgate ``U(R(a), R(b))`` on ``(wire, wire+1)``;
    with one slot it is a single-qubit ``R(a)`` on ``wire``.
    """

    rotation: str
    wire: int
    slots: tuple[int, ...]

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.wire, self.wire + 1) if len(self.slots) == 2 else (self.wire,)


@dataclass(frozen=True)
class Entangler:
    """Fixed two-qubit gate on ``(wire, wire+1)``: ``U(Z,X)``, ``U(H,H)`` or CNOT."""

    blocks: str
    wire: int

    @property
    def wires(self) -> tuple[int, int]:
        return (self.wire, self.wire + 1)


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    kind: AnsatzKind
    depth: int
    layout: tuple
    num_params: int

    @property
    def fermionic(self) -> bool:
        return self.kind.fermionic

    def to_dict(self) -> dict:
        gates_ = []
        for p in self.layout:
            if isinstance(p, Rotation):
                gates_.append({"type": "rotation", "rotation": p.rotation,
                               "wires": list(p.wires), "slots": list(p.slots)})
            else:
                gates_.append({"type": "entangler", "blocks": p.blocks,
                               "wires": list(p.wires)})
        return {"n_qubits": self.n_qubits, "kind": self.kind.value, "depth": self.depth,
                "num_params": self.num_params, "layout": gates_}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        layout = []
        for g in d["layout"]:
            if g["type"] == "rotation":
                layout.append(Rotation(g["rotation"], g["wires"][0], tuple(g["slots"])))
            else:
                layout.append(Entangler(g["blocks"], g["wires"][0]))
        return cls(d["n_qubits"], AnsatzKind.parse(d["kind"]), d["depth"],
                   tuple(layout), d["num_params"])


@dataclass(frozen=True, eq=False)
class EncodingParams:
    theta_r: np.ndarray
    seed: int
    c_theta: float = HALF_PI
    c_x: float = HALF_PI

    @classmethod
    def from_seed(cls, num_params: int, seed: int) -> "EncodingParams":
        rng = np.random.default_rng(seed)
        theta_r = rng.uniform(0.0, 1.0, size=num_params)
        theta_r.setflags(write=False)
        return cls(theta_r=theta_r, seed=seed)


def depth(chi: int, n_qubits: int) -> int:
    """Number of layer pairs, ``ceil(chi / N)``."""
    if chi < 1 or n_qubits < 2:
        raise ValueError(f"need chi >= 1 and N >= 2, got chi={chi}, N={n_qubits}")
    return -(-chi // n_qubits)


def disjoint_pairs(n_qubits: int) -> list[int]:
    """First wires of ``(1,2), (3,4), ...``; a trailing odd wire is left out."""
    return list(range(1, n_qubits, 2))


def brick_wall(n_qubits: int) -> list[int]:
    """First wires of the odd pairs followed by the even pairs."""
    return list(range(1, n_qubits, 2)) + list(range(2, n_qubits, 2))


def build_ansatz(n_qubits: int, chi: int, kind, seed: int) -> tuple[CircuitSpec, EncodingParams]:
    kind = AnsatzKind.parse(kind)
    if n_qubits < 2:
        raise ValueError(f"ansatz needs at least 2 qubits, got {n_qubits}")
    d = depth(chi, n_qubits)
    pairs = brick_wall(n_qubits)
    rotation_pairs = disjoint_pairs(n_qubits)
    entangler = _ENTANGLER_BLOCKS.get(kind)

    layout = []
    slot = 0
    for _ in range(d):
        for rotation in ("Ry", "Rz"):
            if kind.fermionic:
                for w in rotation_pairs:
                    layout.append(Rotation(rotation, w, (slot, slot + 1)))
                    slot += 2
            else:
                for w in range(1, n_qubits + 1):
                    layout.append(Rotation(rotation, w, (slot,)))
                    slot += 1
            if entangler is not None:
                layout.extend(Entangler(entangler, w) for w in pairs)

    spec = CircuitSpec(n_qubits, kind, d, tuple(layout), slot)
    return spec, EncodingParams.from_seed(slot, seed)


def encode_angles(x, params: EncodingParams, spec: CircuitSpec) -> np.ndarray:
    """``theta_j = c_theta * theta_r[j] + c_x * x[j mod chi]``.

    ``x`` may be a single feature vector or an ``(n, chi)`` batch.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] == 0:
        raise ValueError("empty feature vector")
    if len(params.theta_r) != spec.num_params:
        raise ValueError(f"{len(params.theta_r)} random offsets for {spec.num_params} slots")
    cyclic = x[..., np.arange(spec.num_params) % x.shape[-1]]
    return params.c_theta * params.theta_r + params.c_x * cyclic


_ENTANGLER_UNITARIES = {
    "ZX": gates.embed_blocks(gates.PAULI["Z"], gates.PAULI["X"]),
    "HH": gates.embed_blocks(gates.HADAMARD, gates.HADAMARD),
    "CX": CNOT,
}


def circuit_gates(spec: CircuitSpec, angles) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Concrete ``(wires, unitary)`` list in application order."""
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (spec.num_params,):
        raise ValueError(f"expected {spec.num_params} angles, got shape {angles.shape}")
    out = []
    for p in spec.layout:
        if isinstance(p, Rotation):
            blocks = [gates.rotation_block(p.rotation, angles[s]) for s in p.slots]
            u = gates.embed_blocks(*blocks) if len(blocks) == 2 else blocks[0]
        else:
            u = _ENTANGLER_UNITARIES[p.blocks]
        out.append((p.wires, u))
    return out


def matchgates(spec: CircuitSpec, angles) -> list[gates.Matchgate]:
    """Validated :class:`~matchkernel.gates.Matchgate` objects for a fermionic spec."""
    if not spec.fermionic:
        raise ValueError(f"{spec.kind} circuits are not built from matchgates")
    angles = np.asarray(angles, dtype=float)
    out = []
    for p in spec.layout:
        if isinstance(p, Rotation):
            a, w = (gates.rotation_block(p.rotation, angles[s]) for s in p.slots)
        else:
            a, w = (gates.rotation_block(b) for b in p.blocks)
        out.append(gates.make_matchgate(a, w, p.wire))
    return out


def batched_gates(spec: CircuitSpec, angles):
    """Yield ``(wires, (n, d, d) unitaries)`` per gate for an ``(n, P)`` angle batch."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    n = angles.shape[0]
    for p in spec.layout:
        if isinstance(p, Rotation):
            rot = gates.ry if p.rotation == "Ry" else gates.rz
            blocks = [rot(angles[:, s]) for s in p.slots]
            u = gates.embed_blocks(*blocks) if len(blocks) == 2 else blocks[0]
        else:
            u = np.broadcast_to(_ENTANGLER_UNITARIES[p.blocks], (n, 4, 4))
        yield p.wires, u


def matchgate_unitaries(spec: CircuitSpec, angles) -> np.ndarray:
    """``(..., L, 4, 4)`` stack of matchgate unitaries; ``angles`` may be batched."""
    if not spec.fermionic:
        raise ValueError(f"{spec.kind} circuits are not built from matchgates")
    angles = np.asarray(angles, dtype=float)
    batch = angles.shape[:-1]
    U = np.empty(batch + (len(spec.layout), 4, 4), dtype=complex)
    for i, p in enumerate(spec.layout):
        if isinstance(p, Rotation):
            rot = gates.ry if p.rotation == "Ry" else gates.rz
            s0, s1 = p.slots
            U[..., i, :, :] = gates.embed_blocks(rot(angles[..., s0]), rot(angles[..., s1]))
        else:
            U[..., i, :, :] = _ENTANGLER_UNITARIES[p.blocks]
    return U
