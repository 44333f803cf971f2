import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicroute.dense import pauli_matrix, unitary_of_circuit
from magicroute.circuit import Circuit
from magicroute.errors import DimensionError, ParseError
from magicroute.pauli import (CLIFFORD_GATES, GATE_INVERSE, PauliString, conjugate_by_gate,
                              gf2_rank, inverse, multiply, symplectic_product)

P = PauliString.from_label


@st.composite
def paulis(draw, n=None):
    n = draw(st.integers(0, 5)) if n is None else n
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    return PauliString(n, x, z, draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 5))
    return draw(paulis(n)), draw(paulis(n))


@st.composite
def gate_and_pauli(draw):
    n = draw(st.integers(2, 5))
    gate = draw(st.sampled_from(sorted(CLIFFORD_GATES)))
    qubits = draw(st.permutations(range(n)))[: CLIFFORD_GATES[gate]]
    return gate, tuple(qubits), draw(paulis(n)), draw(paulis(n))


def test_symplectic_product_examples():
    assert symplectic_product(P("X"), P("Z")) == 1
    assert symplectic_product(P("XX"), P("ZZ")) == 0
    assert symplectic_product(P("XI"), P("XX")) == 0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        symplectic_product(P("X"), P("XX"))
    with pytest.raises(DimensionError):
        multiply(P("X"), P("XX"))


def test_multiply_examples():
    xz = multiply(P("X"), P("Z"))
    assert (xz.x, xz.z, xz.phase) == (1, 1, 0)
    assert multiply(P("X"), P("X")) == PauliString(1)
    zx = multiply(P("Z"), P("X"))
    assert (zx.x, zx.z, zx.phase) == (1, 1, 2)


def test_conjugation_examples():
    assert conjugate_by_gate("CNOT", (0, 1), P("IZ")) == P("ZZ")
    assert conjugate_by_gate("CNOT", (0, 1), P("XI")) == P("XX")
    # S X S^dagger in the X^b Z^c normal form is i X Z, printed as +Y
    sx = conjugate_by_gate("S", (0,), P("X"))
    assert (sx.x, sx.z, sx.phase) == (1, 1, 1)
    assert str(sx) == "+Y"
    assert conjugate_by_gate("CZ", (0, 1), P("XI")) == P("XZ")


def test_conjugation_index_error():
    with pytest.raises(IndexError):
        conjugate_by_gate("CNOT", (0, 3), P("XX"))


@pytest.mark.parametrize("label", ["+XZI", "-iYXZ", "+I", "-Y", "+iXX", "+"])
def test_text_round_trip(label):
    p = P(label)
    assert str(p) == label
    assert P(str(p)) == p


def test_parse_errors():
    with pytest.raises(ParseError):
        P("XQ")
    with pytest.raises(ParseError):
        P("--X")


def test_hermitian_and_sign():
    assert P("-Y").is_hermitian
    assert not P("iX").is_hermitian
    assert P("-XZ").sign() == -1
    assert P("+YY").sign() == 1


@given(paulis())
def test_inverse_gives_identity(p):
    assert multiply(p, inverse(p)) == PauliString(p.n)


@given(paulis())
def test_phase_reduced(p):
    assert 0 <= p.phase < 4


def test_multiply_matches_matrices_exhaustively():
    labels = ["".join(t) for t in itertools.product("IXYZ", repeat=2)]
    group = [PauliString(2, q.x, q.z, q.phase + e) for q in map(P, labels) for e in range(4)]
    mats = {g: pauli_matrix(g) for g in group}
    for a in group:
        for b in group:
            assert np.allclose(pauli_matrix(multiply(a, b)), mats[a] @ mats[b])
    a, b, c = group[5], group[22], group[47]
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(pauli_pairs(), pauli_pairs())
def test_associativity(pq, rs):
    p, q = pq
    r = rs[0] if rs[0].n == p.n else PauliString(p.n)
    assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))


@settings(max_examples=300)
@given(gate_and_pauli())
def test_conjugation_preserves_commutation(case):
    gate, qubits, p, q = case
    cp, cq = conjugate_by_gate(gate, qubits, p), conjugate_by_gate(gate, qubits, q)
    assert symplectic_product(p, q) == symplectic_product(cp, cq)


@settings(max_examples=300)
@given(gate_and_pauli())
def test_conjugation_inverse(case):
    gate, qubits, p, _ = case
    inv = GATE_INVERSE[gate]
    assert conjugate_by_gate(gate, qubits, conjugate_by_gate(inv, qubits, p)) == p


@settings(max_examples=100)
@given(gate_and_pauli())
def test_conjugation_matches_dense(case):
    gate, qubits, p, _ = case
    circ = Circuit(p.n)
    circ.append(gate, *qubits)
    u = unitary_of_circuit(circ)
    got = pauli_matrix(conjugate_by_gate(gate, qubits, p))
    assert np.allclose(got, u @ pauli_matrix(p) @ u.conj().T)


def test_embed_restrict_remove():
    p = P("XZ")
    e = p.embed([2, 0], 3)
    assert str(e) == "+ZIX"
    assert e.restrict([2, 0]) == p
    assert P("XIZ").remove_qubit(1) == P("XZ")


def test_gf2_rank():
    rows = [P(s).bits() for s in ["XX", "ZZ", "YY"]]
    assert gf2_rank(rows) == 2
    assert gf2_rank([]) == 0
