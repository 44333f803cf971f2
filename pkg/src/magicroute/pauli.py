"""Phased Pauli operators over GF(2).

A Pauli string on ``n`` qubits is stored in the normal form
``i**phase * X**x * Z**z`` where ``x`` and ``z`` are integer bit masks
(bit ``q`` belongs to qubit ``q``). The text form lists qubit 0 first,
e.g. ``"+XZI"`` or ``"-iYXZ"``; the letter ``Y`` stands for ``i*X*Z``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, ParseError

CLIFFORD_GATES = {
    "H": 1,
    "S": 1,
    "SDG": 1,
    "X": 1,
    "Z": 1,
    "CNOT": 2,
    "CZ": 2,
    "SWAP": 2,
}

GATE_INVERSE = {"H": "H", "S": "SDG", "SDG": "S", "X": "X", "Z": "Z",
                "CNOT": "CNOT", "CZ": "CZ", "SWAP": "SWAP"}

_PREFIX = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PREFIX_OUT = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative qubit count")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"bit rows do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        """One-qubit Pauli ``letter`` on ``qubit`` of an ``n``-qubit register."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for n={n}")
        bit = 1 << qubit
        letter = letter.upper()
        if letter == "I":
            return cls(n)
        if letter == "X":
            return cls(n, bit, 0)
        if letter == "Z":
            return cls(n, 0, bit)
        if letter == "Y":
            return cls(n, bit, bit, 1)
        raise ParseError(f"unknown Pauli letter {letter!r}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        label = label.strip()
        i = 0
        while i < len(label) and label[i] in "+-i":
            i += 1
        prefix, body = label[:i], label[i:]
        if prefix not in _PREFIX:
            raise ParseError(f"bad phase prefix in {label!r}")
        phase = _PREFIX[prefix]
        x = z = 0
        for q, ch in enumerate(body):
            if ch in "I_.":
                continue
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
                phase += 1
            else:
                raise ParseError(f"bad Pauli letter {ch!r} in {label!r}")
        return cls(len(body), x, z, phase)

    def letters(self) -> str:
        out = []
        for q in range(self.n):
            bx, bz = (self.x >> q) & 1, (self.z >> q) & 1
            out.append("IXZY"[bx | (bz << 1)])
        return "".join(out)

    def __str__(self) -> str:
        n_y = _popcount(self.x & self.z)
        return _PREFIX_OUT[(self.phase - n_y) % 4] + self.letters()

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    @property
    def is_hermitian(self) -> bool:
        # (i^e X^b Z^c)^dagger = i^-e (-1)^{b.c} X^b Z^c
        return (2 * self.phase + 2 * _popcount(self.x & self.z)) % 4 == 0

    @property
    def support(self) -> int:
        return self.x | self.z

    def weight(self) -> int:
        return _popcount(self.support)

    def bits(self) -> int:
        """Symplectic row ``x | z << n`` packed into one integer."""
        return self.x | (self.z << self.n)

    def negate(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def unsigned(self) -> "PauliString":
        """The Hermitian representative with sign +1 (same bit rows)."""
        return PauliString(self.n, self.x, self.z, _popcount(self.x & self.z))

    def sign(self) -> int:
        """+1 or -1 relative to :meth:`unsigned`; raises for non-Hermitian."""
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == self.unsigned().phase else -1

    def embed(self, qubits, n: int) -> "PauliString":
        """Place this Pauli (on ``len(qubits)`` qubits) onto positions ``qubits`` of ``n``."""
        if len(qubits) != self.n:
            raise DimensionError("qubit list length differs from Pauli length")
        x = z = 0
        for i, q in enumerate(qubits):
            if not 0 <= q < n:
                raise DimensionError(f"qubit {q} out of range for n={n}")
            x |= ((self.x >> i) & 1) << q
            z |= ((self.z >> i) & 1) << q
        return PauliString(n, x, z, self.phase)

    def restrict(self, qubits) -> "PauliString":
        """Tensor factor on ``qubits`` with the phase kept."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliString(len(qubits), x, z, self.phase)

    def remove_qubit(self, q: int) -> "PauliString":
        """Drop column ``q`` (assumed trivial or irrelevant) and shift higher qubits down."""
        low = (1 << q) - 1

        def squeeze(v):
            return (v & low) | ((v >> (q + 1)) << q)

        return PauliString(self.n - 1, squeeze(self.x), squeeze(self.z), self.phase)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)


def _check_dims(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise DimensionError(f"Pauli lengths differ: {p.n} vs {q.n}")


def symplectic_product(p: PauliString, q: PauliString) -> int:
    """0 if ``p`` and ``q`` commute, 1 if they anticommute."""
    _check_dims(p, q)
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) & 1


def multiply(p: PauliString, q: PauliString) -> PauliString:
    _check_dims(p, q)
    # Z^c1 X^b2 = (-1)^{c1.b2} X^b2 Z^c1
    phase = p.phase + q.phase + 2 * _popcount(p.z & q.x)
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z, phase)


def inverse(p: PauliString) -> PauliString:
    # p * p = i^{2e} (-1)^{b.c}
    return PauliString(p.n, p.x, p.z, -p.phase + 2 * _popcount(p.x & p.z))


def _images(gate: str, qubits, n: int):
    """Conjugation images ``g P g^dagger`` for X_q and Z_q on the gate's qubits."""
    P = PauliString
    if gate in ("H", "S", "SDG", "X", "Z"):
        (a,) = qubits
        ba = 1 << a
        xa, za = P(n, ba, 0), P(n, 0, ba)
        if gate == "H":
            return {("X", a): za, ("Z", a): xa}
        if gate == "S":
            return {("X", a): P(n, ba, ba, 1), ("Z", a): za}
        if gate == "SDG":
            return {("X", a): P(n, ba, ba, 3), ("Z", a): za}
        if gate == "X":
            return {("X", a): xa, ("Z", a): za.negate()}
        return {("X", a): xa.negate(), ("Z", a): za}
    a, b = qubits
    ba, bb = 1 << a, 1 << b
    if gate == "CNOT":
        return {("X", a): P(n, ba | bb, 0), ("X", b): P(n, bb, 0),
                ("Z", a): P(n, 0, ba), ("Z", b): P(n, 0, ba | bb)}
    if gate == "CZ":
        return {("X", a): P(n, ba, bb), ("X", b): P(n, bb, ba),
                ("Z", a): P(n, 0, ba), ("Z", b): P(n, 0, bb)}
    if gate == "SWAP":
        return {("X", a): P(n, bb, 0), ("X", b): P(n, ba, 0),
                ("Z", a): P(n, 0, bb), ("Z", b): P(n, 0, ba)}
    raise ValueError(f"unsupported gate {gate!r}")


def check_gate(gate: str, qubits, n: int) -> None:
    if gate not in CLIFFORD_GATES:
        raise ValueError(f"unsupported gate {gate!r}")
    if len(qubits) != CLIFFORD_GATES[gate]:
        raise DimensionError(f"{gate} takes {CLIFFORD_GATES[gate]} qubit(s)")
    if len(set(qubits)) != len(qubits):
        raise DimensionError(f"{gate} applied to repeated qubit {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for n={n}")


def conjugate_by_gate(gate: str, qubits, p: PauliString) -> PauliString:
    """Return ``g p g^dagger`` for Clifford gate ``gate`` on ``qubits``."""
    qubits = tuple(qubits)
    check_gate(gate, qubits, p.n)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    if not (p.support & mask):
        return p
    images = _images(gate, qubits, p.n)
    # supports are disjoint, so splitting the untouched part off costs no phase
    result = PauliString(p.n, p.x & ~mask, p.z & ~mask, p.phase)
    for q in qubits:
        if (p.x >> q) & 1:
            result = multiply(result, images[("X", q)])
    for q in qubits:
        if (p.z >> q) & 1:
            result = multiply(result, images[("Z", q)])
    return result


def gf2_rank(rows) -> int:
    """Rank over GF(2) of integer-packed bit rows."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)
