"""Gate-list circuits shared by the tableau engine, the dense oracle and the gadgets.

Operation kinds:

* Clifford gates ``H S SDG X Z CNOT CZ SWAP`` (CNOT is control, target);
* ``MPP``: projective measurement of ``pauli`` on ``qubits``;
* ``MZ``: destructive Z-basis measurement of one qubit;
* ``DIAG``: a :class:`~magicroute.diagonal.DiagonalGate` on ``qubits``.

Measurements are numbered in program order. An operation with a non-empty
``condition`` runs only when the XOR of those measurement outcome bits is 1
(outcome bit 0 means eigenvalue +1). Qubits listed in ``ancillas`` start in
``|0>``; every other qubit is an input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParseError
from .pauli import CLIFFORD_GATES, GATE_INVERSE, PauliString, check_gate

MEASUREMENTS = ("MPP", "MZ")


@dataclass(frozen=True)
class Op:
    kind: str
    qubits: tuple
    pauli: PauliString | None = None
    gate: object | None = None
    condition: tuple = ()

    @property
    def is_measurement(self) -> bool:
        return self.kind in MEASUREMENTS

    def to_json(self) -> dict:
        out = {"op": self.kind, "qubits": list(self.qubits)}
        if self.pauli is not None:
            out["pauli"] = str(self.pauli)
        if self.gate is not None:
            out["gate"] = self.gate.to_spec()
        if self.condition:
            out["if"] = list(self.condition)
        return out

    @classmethod
    def from_json(cls, obj) -> "Op":
        from .diagonal import gate_from_spec

        try:
            kind = obj["op"].upper()
            qubits = tuple(int(q) for q in obj["qubits"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"bad op {obj!r}") from exc
        pauli = PauliString.from_label(obj["pauli"]) if "pauli" in obj else None
        gate = gate_from_spec(obj["gate"]) if "gate" in obj else None
        return cls(kind, qubits, pauli, gate, tuple(int(k) for k in obj.get("if", ())))


@dataclass
class Circuit:
    n: int
    ops: list = field(default_factory=list)
    regions: list | None = None
    ancillas: tuple = ()

    def __post_init__(self):
        self.ancillas = tuple(sorted(set(self.ancillas)))
        if self.regions is not None:
            self.regions = list(self.regions)
            if len(self.regions) != self.n:
                raise DimensionError("one region tag per qubit is required")
        seen = 0
        for op in self.ops:
            self._validate(op, seen)
            seen += op.is_measurement

    def _validate(self, op: Op, n_meas: int) -> None:
        for q in op.qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for n={self.n}")
        if op.kind in CLIFFORD_GATES:
            check_gate(op.kind, op.qubits, self.n)
        elif op.kind == "MPP":
            if op.pauli is None or op.pauli.n != len(op.qubits):
                raise DimensionError("MPP needs a Pauli matching its qubit list")
            if not op.pauli.is_hermitian:
                raise ValueError(f"cannot measure non-Hermitian {op.pauli}")
        elif op.kind == "MZ":
            if len(op.qubits) != 1:
                raise DimensionError("MZ acts on one qubit")
        elif op.kind == "DIAG":
            if op.gate is None or op.gate.n != len(op.qubits):
                raise DimensionError("DIAG gate size differs from its qubit list")
        else:
            raise ParseError(f"unknown operation kind {op.kind!r}")
        if any(not 0 <= k < n_meas for k in op.condition):
            raise ValueError(f"condition {op.condition} refers to a later or missing measurement")

    def append(self, kind: str, *qubits, pauli=None, gate=None, condition=()) -> "Circuit":
        if isinstance(pauli, str):
            pauli = PauliString.from_label(pauli)
        op = Op(kind.upper(), tuple(qubits), pauli, gate, tuple(condition))
        self._validate(op, self.num_measurements())
        self.ops.append(op)
        return self

    def measure(self, pauli, *qubits) -> int:
        """Append an ``MPP`` and return its measurement index."""
        self.append("MPP", *qubits, pauli=pauli)
        return self.num_measurements() - 1

    def measure_z(self, qubit: int) -> int:
        self.append("MZ", qubit)
        return self.num_measurements() - 1

    def measure_x(self, qubit: int) -> int:
        """X-basis destructive measurement as ``H`` then ``MZ``."""
        self.append("H", qubit)
        return self.measure_z(qubit)

    def diag(self, gate, *qubits) -> "Circuit":
        return self.append("DIAG", *qubits, gate=gate)

    def inputs(self) -> list[int]:
        anc = set(self.ancillas)
        return [q for q in range(self.n) if q not in anc]

    def num_measurements(self) -> int:
        return sum(1 for op in self.ops if op.is_measurement)

    def is_unitary(self) -> bool:
        return all(not op.is_measurement and not op.condition for op in self.ops)

    def is_clifford(self) -> bool:
        return all(op.kind != "DIAG" for op in self.ops)

    def gate_kinds(self) -> set:
        return {op.kind for op in self.ops}

    def inverse(self) -> "Circuit":
        if not self.is_unitary():
            raise ValueError("only measurement-free circuits can be inverted")
        ops = []
        for op in reversed(self.ops):
            if op.kind == "DIAG":
                ops.append(Op("DIAG", op.qubits, gate=op.gate.dagger()))
            else:
                ops.append(Op(GATE_INVERSE[op.kind], op.qubits))
        return Circuit(self.n, ops, self.regions, self.ancillas)

    def extended(self, other: "Circuit") -> "Circuit":
        """``self`` followed by ``other`` (measurement indices of ``other`` are shifted)."""
        if other.n != self.n:
            raise DimensionError("circuits act on different registers")
        shift = self.num_measurements()
        ops = list(self.ops)
        for op in other.ops:
            cond = tuple(k + shift for k in op.condition)
            ops.append(Op(op.kind, op.qubits, op.pauli, op.gate, cond))
        return Circuit(self.n, ops, self.regions, self.ancillas)

    def remapped(self, mapping, n: int) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]`` on an ``n``-qubit register."""
        ops = [Op(op.kind, tuple(mapping[q] for q in op.qubits), op.pauli, op.gate,
                  op.condition) for op in self.ops]
        return Circuit(n, ops, None, tuple(mapping[q] for q in self.ancillas))

    def to_json(self) -> dict:
        out = {"n": self.n, "ops": [op.to_json() for op in self.ops]}
        if self.regions is not None:
            out["regions"] = list(self.regions)
        if self.ancillas:
            out["ancillas"] = list(self.ancillas)
        return out

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        try:
            n = int(obj["n"])
            ops = [Op.from_json(o) for o in obj.get("ops", [])]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad circuit: {exc}") from exc
        return cls(n, ops, obj.get("regions"), tuple(obj.get("ancillas", ())))

    def __len__(self) -> int:
        return len(self.ops)


def depth(circuit: Circuit) -> int:
    """ASAP layer count over qubit wires (classical wires ignored)."""
    level = [0] * circuit.n
    for op in circuit.ops:
        t = max(level[q] for q in op.qubits) + 1
        for q in op.qubits:
            level[q] = t
    return max(level, default=0)


_ONE = ("H", "S", "SDG", "X", "Z")
_TWO = ("CNOT", "CZ", "SWAP")


def random_clifford_circuit(n: int, n_gates: int, rng: np.random.Generator,
                            kinds=None) -> Circuit:
    circ = Circuit(n)
    one = [k for k in _ONE if kinds is None or k in kinds]
    two = [k for k in _TWO if kinds is None or k in kinds]
    for _ in range(n_gates):
        if n >= 2 and two and (not one or rng.random() < 0.5):
            a, b = rng.choice(n, size=2, replace=False)
            circ.append(two[rng.integers(len(two))], int(a), int(b))
        elif one:
            circ.append(one[rng.integers(len(one))], int(rng.integers(n)))
    return circ


def random_pauli(n: int, rng: np.random.Generator, hermitian: bool = True) -> PauliString:
    x = int(rng.integers(1 << n)) if n else 0
    z = int(rng.integers(1 << n)) if n else 0
    p = PauliString(n, x, z, int(rng.integers(4)))
    if hermitian:
        p = p.unsigned() if rng.random() < 0.5 else p.unsigned().negate()
    return p


def random_stabilizer_circuit(n: int, n_ops: int, rng: np.random.Generator,
                              measure_prob: float = 0.2, destroy_prob: float = 0.0) -> Circuit:
    """Random Clifford gates interleaved with Pauli measurements.

    Joint measurements act on one or two qubits. With ``destroy_prob`` a
    destructive ``MZ`` is drawn instead, and that qubit is never used again.
    """
    circ = Circuit(n)
    alive = list(range(n))
    for _ in range(n_ops):
        if not alive:
            break
        u = rng.random()
        if u < destroy_prob and len(alive) > 1:
            q = alive.pop(int(rng.integers(len(alive))))
            circ.append("MZ", q)
        elif u < destroy_prob + measure_prob:
            k = 2 if len(alive) >= 2 and rng.random() < 0.6 else 1
            qubits = [alive[i] for i in rng.choice(len(alive), size=k, replace=False)]
            p = random_pauli(k, rng)
            while p.weight() == 0:
                p = random_pauli(k, rng)
            circ.append("MPP", *qubits, pauli=p)
        else:
            sub = random_clifford_circuit(len(alive), 1, rng)
            for op in sub.ops:
                circ.append(op.kind, *(alive[q] for q in op.qubits))
    return circ
