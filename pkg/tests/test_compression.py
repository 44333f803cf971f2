import numpy as np
import pytest

from magicroute.circuit import Circuit
from magicroute.compression import (CompressionResult, compress, compressed_unitary,
                                    conjugate_by_cnot_product, diagonal_clifford_gate,
                                    entangled_injection_circuit, injection_cap,
                                    left_multiply_diagonal_clifford, verify_compression)
from magicroute.dense import allclose_up_to_phase, unitary_of_circuit
from magicroute.diagonal import (DiagonalGate, from_pauli_exponential, named_gate, nullity,
                                 random_phase_polynomial)
from magicroute.errors import DimensionError
from magicroute.gadgets import circuit_cost
from magicroute.pauli import PauliString
from magicroute.tableau import Bipartition

from oracles import all_outcomes, applies_gate

ZZ8 = from_pauli_exponential(PauliString.from_label("ZZ"), (1, 3))


def dense_gate(n, ops):
    c = Circuit(n)
    for kind, *qubits in ops:
        c.append(kind, *qubits)
    return unitary_of_circuit(c)


def test_cnot_conjugation_matches_dense():
    rng = np.random.default_rng(0)
    d = random_phase_polynomial(3, rng)
    pairs = [(1, 0), (1, 2)]
    u = dense_gate(3, [("CNOT", 1, 0), ("CNOT", 1, 2)])
    got = np.diag(conjugate_by_cnot_product(d, pairs).phase_vector())
    assert allclose_up_to_phase(got, u @ np.diag(d.phase_vector()) @ u)
    with pytest.raises(ValueError):
        conjugate_by_cnot_product(d, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        conjugate_by_cnot_product(d, [(2, 2)])


def test_diagonal_clifford_matches_dense():
    ops = [("S", 0), ("CZ", 0, 2), ("SDG", 1), ("Z", 2)]
    got = np.diag(diagonal_clifford_gate(3, ops).phase_vector())
    assert np.allclose(got, dense_gate(3, ops))
    with pytest.raises(ValueError):
        diagonal_clifford_gate(1, [("H", 0)])
    d = named_gate("T").tensor(named_gate("T"))
    prod = left_multiply_diagonal_clifford(d, [("CZ", 0, 1)])
    assert np.allclose(prod.phase_vector(), d.phase_vector() * np.array([1, 1, 1, -1]))


@pytest.mark.parametrize("name,rounds", [
    ("I", 1), ("T", 0), ("S", 1), ("CS", 0), ("CCZ", 0), ("CCCZ", 0),
])
def test_named_gate_rounds(name, rounds):
    d = named_gate(name)
    res = compress(d)
    assert len(res.transcript) == rounds
    assert res.n_prime == nullity(d)
    assert verify_compression(res, d)


def test_s_gate_compresses_to_nothing():
    res = compress(named_gate("S"))
    assert res.n_prime == 0
    assert [op.kind for op in res.v.ops] == ["S", "Z"]
    assert len(res.v_prime) == 0


def test_zz_rotation_strips_one_qubit():
    res = compress(ZZ8)
    assert res.n_prime == 1
    assert [op.kind for op in res.v.ops] == ["CNOT"]
    assert [op.kind for op in res.v_prime.ops] == ["CNOT"]
    assert res.core == named_gate("TDG")
    assert verify_compression(res, ZZ8)


def test_tensor_with_identity_strips_identity():
    d = DiagonalGate.identity(2).tensor(named_gate("CCZ"))
    res = compress(d)
    assert (res.n_prime, len(res.transcript)) == (3, 2)
    assert verify_compression(res, d)


def test_random_compression_suite():
    rng = np.random.default_rng(1)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        d = random_phase_polynomial(n, rng, log2den=int(rng.integers(0, 4)))
        res = compress(d)
        assert res.n_prime == nullity(d)
        assert len(res.transcript) == n - res.n_prime
        got, expect = compressed_unitary(res, d)
        assert allclose_up_to_phase(got, expect)
        # the core has no remaining stabilizer
        assert nullity(res.core) == res.n_prime


def test_compression_json_round_trip():
    d = named_gate("CCZ").tensor(named_gate("S"))
    res = compress(d)
    back = CompressionResult.from_json(res.to_json())
    assert back.v.ops == res.v.ops and back.v_prime.ops == res.v_prime.ops
    assert back.core == res.core and back.n_prime == res.n_prime
    assert verify_compression(back, d)


def test_tampered_result_fails_verification():
    d = named_gate("CS").tensor(DiagonalGate.identity(1))
    res = compress(d)
    res.v.ops.pop()
    assert not verify_compression(res, d)
    with pytest.raises(DimensionError):
        compressed_unitary(res, named_gate("T"))


def cut_for(n_x, n_y):
    return Bipartition(tuple(range(n_x)), tuple(range(n_x, n_x + n_y)))


@pytest.mark.parametrize("gate", [named_gate("T"), named_gate("S"), named_gate("CS"),
                                  named_gate("CCZ"), ZZ8])
def test_entangled_injection_cost_is_nullity(gate):
    circ = entangled_injection_circuit(gate, cut_for(1, gate.n))
    assert circuit_cost(circ) == nullity(gate)
    diag_sites = {q for op in circ.ops if op.kind == "DIAG" for q in op.qubits}
    assert all(circ.regions[q] == "X" for q in diag_sites)


@pytest.mark.parametrize("gate", [named_gate("T"), named_gate("CS"), ZZ8, named_gate("CCZ")])
def test_entangled_injection_all_branches(gate):
    rng = np.random.default_rng(2)
    cut = cut_for(1, gate.n)
    circ = entangled_injection_circuit(gate, cut)
    cap = injection_cap(gate, 1)
    for outcomes in all_outcomes(circ):
        assert applies_gate(circ, gate, cut.right, rng, outcomes, n_inputs=2, cap=cap)


def test_entangled_injection_random_gates():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        d = random_phase_polynomial(n, rng, log2den=int(rng.integers(1, 4)))
        cut = Bipartition((n,), tuple(range(n)))
        circ = entangled_injection_circuit(d, cut)
        assert circuit_cost(circ) == nullity(d)
        outcomes = [int(b) for b in rng.integers(0, 2, size=circ.num_measurements())]
        assert applies_gate(circ, d, cut.right, rng, outcomes, cap=injection_cap(d, 1))


def test_entangled_injection_dimension_check():
    with pytest.raises(DimensionError):
        entangled_injection_circuit(named_gate("CS"), cut_for(1, 3))


def test_cnot_pair_reduces_zz_rotation():
    moved = conjugate_by_cnot_product(ZZ8, [(0, 1)])
    z1 = from_pauli_exponential(PauliString.from_label("IZ"), (1, 3))
    assert moved == z1
    assert np.allclose(moved.phase_vector(), np.kron(named_gate("TDG").phase_vector(), [1, 1]))
