import numpy as np
import pytest

from matchkernel import gates, statevector
from matchkernel.circuits import (AnsatzKind, CircuitSpec, EncodingParams, Entangler, Rotation,
                                  build_ansatz, encode_angles)
from matchkernel.statevector import (ResourceError, brute_force_transfer, marginal_probability,
                                     oracle_gram, oracle_kernel, product_state_gram,
                                     product_state_kernel, simulate_state)

from conftest import random_layout_spec


def fixed(n, *placements):
    return CircuitSpec(n, AnsatzKind.FPQC, 1, tuple(placements), 0)


def test_empty_circuit_is_vacuum():
    assert np.array_equal(simulate_state(fixed(2), []), [1, 0, 0, 0])


def test_xx_flips_both():
    # Ry(pi) (x) Ry(pi) maps |00> to |11> up to sign
    bare = CircuitSpec(2, AnsatzKind.TENSOR_FPQC, 1, (Rotation("Ry", 1, (0, 1)),), 2)
    psi = simulate_state(bare, np.array([np.pi, np.pi]))
    assert np.allclose(np.abs(psi), [0, 0, 0, 1], atol=1e-15)


def test_hadamard_blocks():
    psi = simulate_state(fixed(2, Entangler("HH", 1)), [])
    u = gates.embed_blocks(gates.HADAMARD, gates.HADAMARD)
    assert np.allclose(psi, u[:, 0], atol=1e-15)
    assert np.allclose(psi, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], atol=1e-15)


def test_wire_ordering_msb():
    # a gate on wires (2, 3) of three qubits must leave qubit 1 alone
    psi = simulate_state(fixed(3, Entangler("HH", 2)), [], initial_bits=[1, 0, 0])
    assert np.allclose(np.abs(psi[4:]) ** 2, [0.5, 0, 0, 0.5])


def test_norm_preserved_every_gate(rng):
    spec = random_layout_spec(rng, 7, 40)
    angles = rng.uniform(0, np.pi, spec.num_params)
    psi = statevector.basis_state([0] * 7)
    from matchkernel.circuits import circuit_gates
    for wires, u in circuit_gates(spec, angles):
        psi = statevector.apply_gate(psi, u, wires, 7)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_pqc_norm_at_cap(rng):
    spec, params = build_ansatz(12, 20, "PQC", 1)
    psi = simulate_state(spec, encode_angles(rng.random(20), params, spec))
    assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_resource_guards():
    spec, params = build_ansatz(13, 4, "PQC", 0)
    with pytest.raises(ResourceError):
        simulate_state(spec, np.zeros(spec.num_params))
    big, _ = build_ansatz(7, 4, "fPQC", 0)
    with pytest.raises(ResourceError):
        brute_force_transfer(big, np.zeros(big.num_params))


def test_input_length_checked():
    with pytest.raises(ValueError):
        simulate_state(fixed(2), [], initial_bits=[0])


class TestOracleKernel:
    def test_identical(self, rng):
        spec, params = build_ansatz(5, 9, "hfPQC", 2)
        x = rng.random(9)
        assert oracle_kernel(spec, params, x, x) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states(self):
        # x = 2 encodes Ry(pi) on both wires, x = 0 the identity: <11|00> = 0
        spec = CircuitSpec(2, AnsatzKind.TENSOR_FPQC, 1, (Rotation("Ry", 1, (0, 1)),), 2)
        params = EncodingParams(np.zeros(2), seed=0)
        assert oracle_kernel(spec, params, np.zeros(2), np.full(2, 2.0)) == pytest.approx(0, abs=1e-30)

    def test_gram_matches_pairwise(self, rng):
        spec, params = build_ansatz(4, 6, "PQC", 3)
        X = rng.random((5, 6))
        K = oracle_gram(spec, params, X)
        for i in range(5):
            for j in range(5):
                expect = 1.0 if i == j else oracle_kernel(spec, params, X[i], X[j])
                assert abs(K[i, j] - expect) < 1e-12


def test_brute_force_identity():
    assert np.allclose(brute_force_transfer(fixed(3), []), np.eye(6), atol=1e-15)


def test_brute_force_single_gate_embeds_block():
    R = brute_force_transfer(fixed(3, Entangler("ZX", 2)), [])
    g = gates.make_matchgate(gates.PAULI["Z"], gates.PAULI["X"])
    expect = np.eye(6)
    expect[2:6, 2:6] = gates.single_gate_transfer(g)
    assert np.allclose(R, expect, atol=1e-14)


class TestMarginals:
    def test_full_register(self, rng):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        for idx in range(8):
            bits = [int(b) for b in format(idx, "03b")]
            assert marginal_probability(psi, [1, 2, 3], bits) == pytest.approx(abs(psi[idx]) ** 2)

    def test_unordered_subset(self, rng):
        psi = rng.normal(size=16) + 0j
        psi /= np.linalg.norm(psi)
        p = np.abs(psi.reshape(2, 2, 2, 2)) ** 2
        assert marginal_probability(psi, [3, 1], [1, 0]) == pytest.approx(p[0, :, 1, :].sum())

    def test_sums_to_one(self, rng):
        psi = rng.normal(size=32) + 1j * rng.normal(size=32)
        psi /= np.linalg.norm(psi)
        total = sum(marginal_probability(psi, [2, 5], [a, b]) for a in (0, 1) for b in (0, 1))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestProductState:
    def test_identical(self, rng):
        spec, params = build_ansatz(6, 6, "tensor_PQC", 0)
        x = rng.random(6)
        assert product_state_kernel(spec, params, x, x) == pytest.approx(1.0)

    def test_single_rotation_overlap(self):
        # Ry(pi/2)|0> vs |0>: cos^2(pi/4) = 1/2
        spec = CircuitSpec(1, AnsatzKind.TENSOR_PQC, 1, (Rotation("Ry", 1, (0,)),), 1)
        params = EncodingParams(np.zeros(1), seed=0)
        assert product_state_kernel(spec, params, [1.0], [0.0]) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("kind", ["tensor_PQC", "tensor_fPQC"])
    @pytest.mark.parametrize("n", [2, 5, 10])
    def test_matches_dense(self, rng, kind, n):
        spec, params = build_ansatz(n, 12, kind, n)
        X = rng.random((6, 12))
        assert np.abs(product_state_gram(spec, params, X) - oracle_gram(spec, params, X)).max() < 1e-10

    def test_rejects_entanglers(self, rng):
        spec, params = build_ansatz(4, 4, "fPQC", 0)
        with pytest.raises(ValueError, match="entanglers"):
            product_state_kernel(spec, params, rng.random(4), rng.random(4))

    def test_scales_past_dense_cap(self, rng):
        spec, params = build_ansatz(40, 64, "tensor_PQC", 0)
        K = product_state_gram(spec, params, rng.random((4, 64)))
        assert K.shape == (4, 4) and np.all((K >= 0) & (K <= 1))
