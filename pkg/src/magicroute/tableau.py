"""Stabilizer-state simulation and bipartite normal forms.

A :class:`StabilizerTableau` stores only stabilizer generators (no
destabilizers). Deterministic measurement signs are recovered by GF(2)
elimination, which keeps qubit removal after a destructive measurement
trivial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Op
from .errors import DimensionError, InvariantViolation, ZeroAmplitudeError
from .pauli import (GATE_INVERSE, PauliString, check_gate, conjugate_by_gate, gf2_rank,
                    multiply, symplectic_product)

_RNG = np.random.default_rng()


@dataclass(frozen=True)
class Bipartition:
    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(self.left)))
        object.__setattr__(self, "right", tuple(sorted(self.right)))

    @classmethod
    def from_regions(cls, regions, left_tag="X") -> "Bipartition":
        left = [q for q, r in enumerate(regions) if r == left_tag]
        right = [q for q, r in enumerate(regions) if r != left_tag]
        return cls(tuple(left), tuple(right))

    def validate(self, n: int) -> None:
        both = set(self.left) | set(self.right)
        if set(self.left) & set(self.right):
            raise ValueError("bipartition sides overlap")
        if both != set(range(n)) or len(self.left) + len(self.right) != n:
            raise ValueError(f"bipartition does not cover qubits 0..{n - 1}")

    def side_of(self, q: int) -> str:
        return "X" if q in self.left else "Y"


class StabilizerTableau:
    """Generators of the stabilizer group of a pure ``n``-qubit state."""

    def __init__(self, n: int, generators):
        self.n = n
        self.generators = list(generators)
        for g in self.generators:
            if g.n != n:
                raise DimensionError("generator length differs from n")

    @classmethod
    def zero(cls, n: int) -> "StabilizerTableau":
        return cls(n, [PauliString(n, 0, 1 << q) for q in range(n)])

    @classmethod
    def from_labels(cls, labels) -> "StabilizerTableau":
        gens = [PauliString.from_label(s) for s in labels]
        n = gens[0].n if gens else 0
        t = cls(n, gens)
        t.validate()
        return t

    def labels(self) -> list[str]:
        return [str(g) for g in self.generators]

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, self.generators)

    def __repr__(self) -> str:
        return f"StabilizerTableau({self.labels()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau) or other.n != self.n:
            return False
        return canonical_form(self).generators == canonical_form(other).generators

    def validate(self) -> None:
        gens = self.generators
        if len(gens) != self.n:
            raise InvariantViolation(f"{len(gens)} generators for {self.n} qubits")
        for g in gens:
            if not g.is_hermitian:
                raise InvariantViolation(f"generator {g} is not Hermitian")
        for i in range(len(gens)):
            for j in range(i):
                if symplectic_product(gens[i], gens[j]):
                    raise InvariantViolation(f"{gens[i]} and {gens[j]} anticommute")
        if gf2_rank(g.bits() for g in gens) != self.n:
            raise InvariantViolation("generators are not independent")

    # -- evolution -------------------------------------------------------

    def apply_gate(self, kind: str, qubits) -> "StabilizerTableau":
        check_gate(kind, tuple(qubits), self.n)
        self.generators = [conjugate_by_gate(kind, qubits, g) for g in self.generators]
        return self

    def _solve(self, target_bits: int):
        """Indices of generators whose product has symplectic bits ``target_bits``, or None."""
        basis = []  # (bits, combination mask)
        for i, g in enumerate(self.generators):
            v, combo = g.bits(), 1 << i
            for bv, bc in basis:
                if v ^ bv < v:
                    v, combo = v ^ bv, combo ^ bc
            if v:
                basis.append((v, combo))
        basis.sort(reverse=True)
        v, combo = target_bits, 0
        for bv, bc in basis:
            if v ^ bv < v:
                v, combo = v ^ bv, combo ^ bc
        if v:
            return None
        return [i for i in range(len(self.generators)) if (combo >> i) & 1]

    def measure(self, p: PauliString, forced: int | None = None, rng=None):
        """Measure Hermitian ``p``; returns ``(outcome, kind)`` with outcome +1/-1.

        ``kind`` is ``"deterministic"`` or ``"random"``. A ``forced`` outcome
        post-selects a random result and raises :class:`ZeroAmplitudeError`
        if it contradicts a deterministic one.
        """
        if p.n != self.n:
            raise DimensionError("measured Pauli has the wrong length")
        if not p.is_hermitian:
            raise ValueError(f"cannot measure non-Hermitian {p}")
        if forced is not None and forced not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        gens = self.generators
        anti = [i for i, g in enumerate(gens) if symplectic_product(g, p)]
        if not anti:
            combo = self._solve(p.bits())
            if combo is None:
                raise InvariantViolation("Pauli commutes with a full stabilizer group but is not in it")
            prod = PauliString(self.n)
            for i in combo:
                prod = multiply(prod, gens[i])
            outcome = 1 if prod.phase == p.phase else -1
            if forced is not None and forced != outcome:
                raise ZeroAmplitudeError(f"outcome {forced} of {p} has probability zero")
            return outcome, "deterministic"
        pivot = anti[0]
        for i in anti[1:]:
            gens[i] = multiply(gens[i], gens[pivot])
        if forced is None:
            rng = _RNG if rng is None else rng
            outcome = 1 if rng.random() < 0.5 else -1
        else:
            outcome = forced
        gens[pivot] = p if outcome == 1 else p.negate()
        return outcome, "random"

    def remove_qubit(self, q: int) -> "StabilizerTableau":
        """Drop qubit ``q``, which must be in a Z eigenstate (after a Z measurement)."""
        gens = self.generators
        combo = self._solve(PauliString(self.n, 0, 1 << q).bits())
        if combo is None:
            raise InvariantViolation(f"qubit {q} is not in a Z eigenstate")
        zq = PauliString(self.n)
        for i in combo:
            zq = multiply(zq, gens[i])
        # swap the signed Z_q in for one generator of the combination that touches q
        pivot = next(i for i in combo if (gens[i].z >> q) & 1)
        gens[pivot] = zq
        for i, g in enumerate(gens):
            if i != pivot and (g.z >> q) & 1:
                gens[i] = multiply(g, zq)
        self.generators = [g.remove_qubit(q) for i, g in enumerate(gens) if i != pivot]
        self.n -= 1
        return self

    def measure_z_destructive(self, q: int, forced: int | None = None, rng=None) -> int:
        outcome, _ = self.measure(PauliString(self.n, 0, 1 << q), forced, rng)
        self.remove_qubit(q)
        return outcome

    def tensor(self, other: "StabilizerTableau") -> "StabilizerTableau":
        """``self`` on the low qubits, ``other`` above them."""
        n = self.n + other.n
        gens = [PauliString(n, g.x, g.z, g.phase) for g in self.generators]
        gens += [PauliString(n, g.x << self.n, g.z << self.n, g.phase) for g in other.generators]
        return StabilizerTableau(n, gens)

    def to_json(self) -> dict:
        return {"n": self.n, "generators": self.labels()}

    @classmethod
    def from_json(cls, obj) -> "StabilizerTableau":
        gens = [PauliString.from_label(s) for s in obj["generators"]]
        t = cls(int(obj["n"]), gens)
        t.validate()
        return t


def new_zero_state(n: int) -> StabilizerTableau:
    return StabilizerTableau.zero(n)


def apply_clifford(state: StabilizerTableau, circuit: Circuit) -> StabilizerTableau:
    """New tableau after the measurement-free Clifford ``circuit``."""
    if circuit.n != state.n:
        raise DimensionError("circuit and state sizes differ")
    out = state.copy()
    for op in circuit.ops:
        if op.is_measurement or op.kind == "DIAG" or op.condition:
            raise ValueError(f"apply_clifford cannot run {op.kind}")
        out.apply_gate(op.kind, op.qubits)
    return out


def measure_pauli(state: StabilizerTableau, p: PauliString, forced: int | None = None,
                  rng=None):
    """``(outcome, kind, new_state)``; the input tableau is left unchanged."""
    out = state.copy()
    outcome, kind = out.measure(p, forced, rng)
    return outcome, kind, out


def run_circuit(state: StabilizerTableau, circuit: Circuit, outcomes=None, rng=None,
                kinds=None):
    """Run a stabilizer circuit, post-selecting on ``outcomes`` bits when given.

    Returns ``(tableau, record, live)``: the final state, the outcome bit of
    every measurement, and the circuit qubits that survive (in tableau order).
    The input ``state`` covers all ``circuit.n`` qubits. If ``kinds`` is a
    list, the kind of every measurement is appended to it.
    """
    if state.n != circuit.n:
        raise DimensionError("circuit and state sizes differ")
    tab = state.copy()
    live = list(range(circuit.n))
    record = []
    for op in circuit.ops:
        if op.kind == "DIAG":
            raise ValueError("stabilizer simulation cannot apply a DIAG gate")
        if op.is_measurement:
            forced = None
            if outcomes is not None:
                forced = 1 - 2 * outcomes[len(record)]
            pos = [live.index(q) for q in op.qubits]
            if op.kind == "MZ":
                p = PauliString(tab.n, 0, 1 << pos[0])
            else:
                p = op.pauli.embed(pos, tab.n)
            out, kind = tab.measure(p, forced, rng)
            if op.kind == "MZ":
                tab.remove_qubit(pos[0])
                live.remove(op.qubits[0])
            if kinds is not None:
                kinds.append(kind)
            record.append(0 if out == 1 else 1)
            continue
        if op.condition:
            par = 0
            for k in op.condition:
                par ^= record[k]
            if not par:
                continue
        tab.apply_gate(op.kind, [live.index(q) for q in op.qubits])
    return tab, record, live


def _pauli_bit(p: PauliString, col) -> int:
    kind, q = col
    return ((p.x if kind == "x" else p.z) >> q) & 1


def _rref(rows: list, columns) -> int:
    """In-place row reduction over ``columns``; returns the rank.

    Rows past the rank are zero on every listed column.
    """
    r = 0
    for col in columns:
        piv = next((i for i in range(r, len(rows)) if _pauli_bit(rows[i], col)), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for j in range(len(rows)):
            if j != r and _pauli_bit(rows[j], col):
                rows[j] = multiply(rows[j], rows[r])
        r += 1
    return r


def canonical_form(state: StabilizerTableau) -> StabilizerTableau:
    """Reduced row echelon generators; pivot columns X_0..X_{n-1} then Z_0..Z_{n-1}."""
    rows = list(state.generators)
    cols = [("x", q) for q in range(state.n)] + [("z", q) for q in range(state.n)]
    _rref(rows, cols)
    return StabilizerTableau(state.n, rows)


def distillable_entanglement(state: StabilizerTableau, cut: Bipartition) -> int:
    """Ebits across ``cut``: rank of the generators restricted to the left, minus its size."""
    cut.validate(state.n)
    mask = 0
    for q in cut.left:
        mask |= 1 << q
    full = mask | (mask << state.n)
    return gf2_rank(g.bits() & full for g in state.generators) - len(cut.left)


@dataclass
class BellNormalForm:
    """``state = (c_left (x) c_right) |0>^n1 |Psi+>^k |0>^n2``.

    Reference layout: the first ``n1`` left qubits (sorted) are ``|0>``, left
    qubit ``n1 + i`` shares a Bell pair with right qubit ``i``, and the last
    ``n2`` right qubits are ``|0>``.
    """

    k: int
    n1: int
    n2: int
    c_left: Circuit
    c_right: Circuit
    cut: Bipartition

    @property
    def bell_pairs(self) -> list:
        return [(self.cut.left[self.n1 + i], self.cut.right[i]) for i in range(self.k)]

    def reference_state(self) -> StabilizerTableau:
        n = self.c_left.n
        tab = StabilizerTableau.zero(n)
        for a, b in self.bell_pairs:
            tab.apply_gate("H", (a,))
            tab.apply_gate("CNOT", (a, b))
        return tab

    def reconstruct(self) -> StabilizerTableau:
        return apply_clifford(apply_clifford(self.reference_state(), self.c_left), self.c_right)


def _cancel_inverses(ops: list) -> list:
    out: list = []
    for op in ops:
        j = len(out) - 1
        while j >= 0 and not set(out[j].qubits) & set(op.qubits):
            j -= 1
        if j >= 0:
            prev = out[j]
            same = prev.qubits == op.qubits or (
                op.kind in ("CZ", "SWAP") and set(prev.qubits) == set(op.qubits))
            if same and GATE_INVERSE[op.kind] == prev.kind:
                del out[j]
                continue
        out.append(op)
    return out


class _Reducer:
    """Local-Clifford reduction of a bipartite stabilizer state to Bell normal form."""

    def __init__(self, state: StabilizerTableau):
        self.n = state.n
        self.rows = list(state.generators)
        self.gates: list = []

    def apply(self, kind: str, *qubits) -> None:
        self.gates.append(Op(kind, tuple(qubits)))
        self.rows = [conjugate_by_gate(kind, qubits, r) for r in self.rows]

    def letter(self, i: int, q: int) -> str:
        r = self.rows[i]
        return "IXZY"[((r.x >> q) & 1) | (((r.z >> q) & 1) << 1)]

    def to_single(self, i: int, qubits, target_letter: str) -> None:
        """Rotate row ``i`` on each of ``qubits`` to ``target_letter`` (or I)."""
        for q in qubits:
            cur = self.letter(i, q)
            if cur == "I" or cur == target_letter:
                continue
            if cur == "Y":
                self.apply("S", q)
                cur = "X"
            if cur != target_letter:
                self.apply("H", q)

    def support(self, i: int, qubits) -> list:
        return [q for q in qubits if self.letter(i, q) != "I"]

    def clear_qubits(self, keep, qubits) -> None:
        """Multiply non-``keep`` rows by ``keep`` rows so none touches ``qubits``."""
        cols = [(t, q) for q in qubits for t in ("x", "z")]
        for col in cols:
            piv = next((i for i in keep if _pauli_bit(self.rows[i], col)), None)
            if piv is None:
                continue
            for j in range(len(self.rows)):
                if j not in keep and _pauli_bit(self.rows[j], col):
                    self.rows[j] = multiply(self.rows[j], self.rows[piv])
        for j in range(len(self.rows)):
            if j not in keep and any(_pauli_bit(self.rows[j], c) for c in cols):
                raise InvariantViolation("failed to decouple factored qubits")
        self.rows = [r for j, r in enumerate(self.rows) if j not in keep]

    def peel_local(self, side: list, other: list):
        """Factor one ``|0>`` off ``side`` if some stabilizer is local to it."""
        if not side:
            return None
        cols = [(t, q) for q in other for t in ("x", "z")]
        rank = _rref(self.rows, cols)
        if rank >= len(self.rows):
            return None
        i = rank
        sup = self.support(i, side)
        if not sup:
            raise InvariantViolation("identity row in stabilizer generators")
        self.to_single(i, sup, "Z")
        q = sup[0]
        for j in sup[1:]:
            self.apply("CNOT", j, q)
        if self.rows[i].sign() < 0:
            self.apply("X", q)
        if self.rows[i] != PauliString(self.n, 0, 1 << q):
            raise InvariantViolation("local stabilizer did not reduce to Z")
        self.clear_qubits({i}, [q])
        side.remove(q)
        return q

    def peel_pair(self, left: list, right: list):
        a = left[0]
        cols = [("x", a), ("z", a)] + [(t, q) for q in left[1:] for t in ("x", "z")]
        rank = _rref(self.rows, cols)
        if rank != 2 * len(left) or len(self.rows) != 2 * len(left) or len(right) != len(left):
            raise InvariantViolation("state without local stabilizers is not maximally entangled")
        ix, iz = 0, 1
        sup = self.support(ix, right)
        b = sup[0]
        self.to_single(ix, sup, "Z")
        for j in sup[1:]:
            self.apply("CNOT", j, b)
        if self.letter(iz, b) == "Y":
            self.apply("S", b)
        others = [q for q in self.support(iz, right) if q != b]
        self.to_single(iz, others, "X")
        for j in others:
            self.apply("CNOT", b, j)
        self.apply("H", b)
        if self.rows[ix].sign() < 0:
            self.apply("Z", b)
        if self.rows[iz].sign() < 0:
            self.apply("X", b)
        xx = PauliString(self.n, (1 << a) | (1 << b), 0)
        zz = PauliString(self.n, 0, (1 << a) | (1 << b))
        if self.rows[ix] != xx or self.rows[iz] != zz:
            raise InvariantViolation("pair reduction did not reach XX, ZZ")
        self.clear_qubits({ix, iz}, [a, b])
        left.remove(a)
        right.remove(b)
        return a, b


def _permute_into(reducer: _Reducer, placement: dict) -> None:
    """SWAP contents so that content at qubit ``s`` ends at ``placement[s]``."""
    where = {s: s for s in placement}  # content label -> current qubit
    at = {s: s for s in placement}  # qubit -> content label
    for src, dst in placement.items():
        cur = where[src]
        if cur == dst:
            continue
        displaced = at[dst]
        reducer.apply("SWAP", cur, dst)
        where[src], where[displaced] = dst, cur
        at[dst], at[cur] = src, displaced


def bipartite_decompose(state: StabilizerTableau, cut: Bipartition) -> BellNormalForm:
    """Local Cliffords and ebit count bringing ``state`` to Bell normal form."""
    cut.validate(state.n)
    red = _Reducer(state)
    left, right = list(cut.left), list(cut.right)
    zeros_l, zeros_r, pairs = [], [], []
    while left or right:
        q = red.peel_local(left, right)
        if q is not None:
            zeros_l.append(q)
            continue
        q = red.peel_local(right, left)
        if q is not None:
            zeros_r.append(q)
            continue
        pairs.append(red.peel_pair(left, right))
    n1, k, n2 = len(zeros_l), len(pairs), len(zeros_r)
    L, R = cut.left, cut.right
    placement = {}
    for i, q in enumerate(zeros_l):
        placement[q] = L[i]
    for i, (a, b) in enumerate(pairs):
        placement[a] = L[n1 + i]
        placement[b] = R[i]
    for i, q in enumerate(zeros_r):
        placement[q] = R[k + i]
    _permute_into(red, placement)
    undo = [Op(GATE_INVERSE[op.kind], op.qubits) for op in reversed(red.gates)]
    left_set = set(L)
    c_left = Circuit(state.n, _cancel_inverses([op for op in undo if op.qubits[0] in left_set]))
    c_right = Circuit(state.n, _cancel_inverses([op for op in undo if op.qubits[0] not in left_set]))
    form = BellNormalForm(k, n1, n2, c_left, c_right, cut)
    if form.reconstruct() != state:
        raise InvariantViolation("Bell normal form does not reconstruct the input state")
    return form
