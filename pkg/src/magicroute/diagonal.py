"""Diagonal gates, their magic states, and stabilizer nullity.

A diagonal gate acts as ``D|x> = exp(i phi(x)) |x>``. The phase table is
stored densely (``2**n`` entries, little-endian basis index) with the
global phase fixed by ``phi(0) = 0``. Exact tables hold integers ``k``
meaning ``k * pi / 2**log2den`` reduced mod ``2*pi``; approximate tables
hold radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .dense import DenseState, check_cap
from .errors import DimensionError, InvariantViolation, OracleCapExceeded, ParseError
from .pauli import PauliString

SEARCH_CAP = 14
ANGLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PhaseAngle:
    """``num * pi / 2**log2den`` when exact, otherwise ``radians``."""

    num: int | None = None
    log2den: int = 0
    value: float | None = None

    def __post_init__(self):
        if self.num is None:
            if self.value is None:
                raise ValueError("PhaseAngle needs an exact numerator or radians")
            return
        num, k = self.num, self.log2den
        if k < 0:
            num, k = num << -k, 0
        num %= 2 << k
        while k > 0 and num % 2 == 0:
            num //= 2
            k -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "log2den", k)

    @classmethod
    def exact(cls, num: int, log2den: int = 0) -> "PhaseAngle":
        return cls(num=num, log2den=log2den)

    @classmethod
    def approx(cls, radians: float) -> "PhaseAngle":
        return cls(value=float(radians))

    @classmethod
    def coerce(cls, angle) -> "PhaseAngle":
        if isinstance(angle, PhaseAngle):
            return angle
        if isinstance(angle, tuple):
            return cls.exact(*angle)
        if isinstance(angle, str):
            return parse_angle(angle)
        return cls.approx(angle)

    @property
    def is_exact(self) -> bool:
        return self.num is not None

    @property
    def radians(self) -> float:
        if self.num is None:
            return self.value
        return self.num * math.pi / (1 << self.log2den)

    def __add__(self, other: "PhaseAngle") -> "PhaseAngle":
        other = PhaseAngle.coerce(other)
        if self.is_exact and other.is_exact:
            k = max(self.log2den, other.log2den)
            return PhaseAngle.exact(
                (self.num << (k - self.log2den)) + (other.num << (k - other.log2den)), k
            )
        return PhaseAngle.approx(self.radians + other.radians)

    def __neg__(self) -> "PhaseAngle":
        if self.is_exact:
            return PhaseAngle.exact(-self.num, self.log2den)
        return PhaseAngle.approx(-self.value)

    def scale(self, factor: int) -> "PhaseAngle":
        if self.is_exact:
            return PhaseAngle.exact(self.num * factor, self.log2den)
        return PhaseAngle.approx(self.value * factor)

    def to_json(self):
        if self.is_exact:
            return {"num": self.num, "log2den": self.log2den}
        return {"radians": self.value}

    @classmethod
    def from_json(cls, obj) -> "PhaseAngle":
        if isinstance(obj, (int, float)):
            return cls.approx(obj)
        if isinstance(obj, str):
            return parse_angle(obj)
        if "num" in obj:
            return cls.exact(int(obj["num"]), int(obj.get("log2den", 0)))
        if "radians" in obj:
            return cls.approx(float(obj["radians"]))
        raise ParseError(f"bad angle {obj!r}")


_ANGLE_RE = re.compile(r"^\s*([+-]?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(text: str) -> PhaseAngle:
    """Parse ``"pi/8"``, ``"-3pi/4"``, ``"3*pi/2"`` exactly, or a float in radians."""
    m = _ANGLE_RE.match(text.replace(" ", ""))
    if m:
        coef = m.group(1)
        num = int(coef) if coef not in ("", "+", "-") else (-1 if coef == "-" else 1)
        den = int(m.group(2) or 1)
        k = den.bit_length() - 1
        if den != 1 << k:
            return PhaseAngle.approx(num * math.pi / den)
        return PhaseAngle.exact(num, k)
    try:
        return PhaseAngle.approx(float(text))
    except ValueError as exc:
        raise ParseError(f"cannot parse angle {text!r}") from exc


def _parity_vector(n: int, mask: int) -> np.ndarray:
    idx = np.arange(1 << n)
    par = np.zeros_like(idx)
    for q in range(n):
        if (mask >> q) & 1:
            par ^= (idx >> q) & 1
    return par


class DiagonalGate:
    """Diagonal unitary given by its phase table."""

    __slots__ = ("n", "table", "log2den", "source_polynomial")

    def __init__(self, n: int, table, log2den: int | None, source_polynomial=None):
        table = np.asarray(table)
        if table.shape != (1 << n,):
            raise DimensionError(f"phase table must have {1 << n} entries")
        if log2den is None:
            rad = np.mod(table.astype(float) - float(table[0]), 2 * math.pi)
            self.table, self.log2den = rad, None
        else:
            mod = 2 << log2den
            t = np.mod(table.astype(np.int64) - int(table[0]), mod)
            k = log2den
            while k > 0 and not np.any(t % 2):
                t //= 2
                k -= 1
            self.table, self.log2den = t, k
        self.n = n
        self.source_polynomial = source_polynomial

    @property
    def is_exact(self) -> bool:
        return self.log2den is not None

    @classmethod
    def identity(cls, n: int) -> "DiagonalGate":
        return cls(n, np.zeros(1 << n, dtype=np.int64), 0)

    def radians(self) -> np.ndarray:
        if self.is_exact:
            return self.table * (math.pi / (1 << self.log2den))
        return self.table.copy()

    def phase_vector(self) -> np.ndarray:
        return np.exp(1j * self.radians())

    def matrix(self) -> np.ndarray:
        return np.diag(self.phase_vector())

    def phase(self, x: int) -> PhaseAngle:
        if self.is_exact:
            return PhaseAngle.exact(int(self.table[x]), self.log2den)
        return PhaseAngle.approx(float(self.table[x]))

    def _lifted(self, k: int) -> np.ndarray:
        return self.table.astype(np.int64) << (k - self.log2den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagonalGate) or other.n != self.n:
            return False
        if self.is_exact and other.is_exact:
            return self.log2den == other.log2den and bool(np.all(self.table == other.table))
        diff = np.mod(self.radians() - other.radians() + math.pi, 2 * math.pi) - math.pi
        return bool(np.all(np.abs(diff) < ANGLE_TOLERANCE))

    def __hash__(self):
        return hash((self.n, self.log2den, self.table.tobytes()))

    def __repr__(self) -> str:
        if self.is_exact:
            return f"DiagonalGate(n={self.n}, pi/2^{self.log2den} * {self.table.tolist()})"
        return f"DiagonalGate(n={self.n}, radians={np.round(self.table, 6).tolist()})"

    def multiply(self, other: "DiagonalGate") -> "DiagonalGate":
        """Pointwise phase addition (the product of two diagonal gates)."""
        if other.n != self.n:
            raise DimensionError("diagonal gates act on different qubit counts")
        if self.is_exact and other.is_exact:
            k = max(self.log2den, other.log2den)
            return DiagonalGate(self.n, self._lifted(k) + other._lifted(k), k)
        return DiagonalGate(self.n, self.radians() + other.radians(), None)

    def tensor(self, other: "DiagonalGate") -> "DiagonalGate":
        """``self`` on the low qubits, ``other`` on the next ``other.n`` qubits."""
        n = self.n + other.n
        idx = np.arange(1 << n)
        lo, hi = idx & ((1 << self.n) - 1), idx >> self.n
        if self.is_exact and other.is_exact:
            k = max(self.log2den, other.log2den)
            return DiagonalGate(n, self._lifted(k)[lo] + other._lifted(k)[hi], k)
        return DiagonalGate(n, self.radians()[lo] + other.radians()[hi], None)

    def reindexed(self, index_map: np.ndarray) -> "DiagonalGate":
        """Gate with ``phi'(y) = phi(index_map[y])``."""
        return DiagonalGate(self.n, self.table[index_map], self.log2den)

    def permute_qubits(self, perm) -> "DiagonalGate":
        """New gate whose qubit ``perm[i]`` plays the role of old qubit ``i``."""
        idx = np.arange(1 << self.n)
        old = np.zeros_like(idx)
        for i, q in enumerate(perm):
            old |= ((idx >> q) & 1) << i
        return self.reindexed(old)

    def dagger(self) -> "DiagonalGate":
        if self.is_exact:
            return DiagonalGate(self.n, -self.table.astype(np.int64), self.log2den)
        return DiagonalGate(self.n, -self.table, None)

    def factor_first_qubit(self) -> "DiagonalGate":
        """Return ``D'`` with ``self = 1 (x) D'`` on qubit 0; raises if not factorable."""
        even, odd = self.table[0::2], self.table[1::2]
        if self.is_exact:
            ok = np.all(even == odd)
        else:
            diff = np.mod(even - odd + math.pi, 2 * math.pi) - math.pi
            ok = np.all(np.abs(diff) < ANGLE_TOLERANCE)
        if not ok:
            raise InvariantViolation("gate does not act trivially on qubit 0")
        return DiagonalGate(self.n - 1, even, self.log2den)

    def to_phase_polynomial(self):
        """Coefficients ``{subset_mask: PhaseAngle}`` by Moebius inversion."""
        coef = self.table.astype(np.int64 if self.is_exact else float).copy()
        for q in range(self.n):
            bit = 1 << q
            for x in range(1 << self.n):
                if x & bit:
                    coef[x] -= coef[x ^ bit]
        terms = {}
        for s in range(1, 1 << self.n):
            if self.is_exact:
                a = PhaseAngle.exact(int(coef[s]), self.log2den)
                if a.num:
                    terms[s] = a
            else:
                v = float(np.mod(coef[s], 2 * math.pi))
                if min(v, 2 * math.pi - v) > ANGLE_TOLERANCE:
                    terms[s] = PhaseAngle.approx(v)
        return terms

    def to_spec(self) -> dict:
        terms = []
        for s, a in self.to_phase_polynomial().items():
            qubits = [q for q in range(self.n) if (s >> q) & 1]
            terms.append({"qubits": qubits, "angle": a.to_json()})
        return {"n": self.n, "terms": terms}


def from_phase_polynomial(n: int, terms) -> DiagonalGate:
    """``phi(x) = sum_S c_S prod_{i in S} x_i``.

    ``terms`` is an iterable of ``(qubits, angle)`` pairs where ``angle`` is a
    :class:`PhaseAngle`, a ``(num, log2den)`` tuple, an angle string, or radians.
    """
    terms = [(tuple(q), PhaseAngle.coerce(a)) for q, a in terms]
    idx = np.arange(1 << n)
    exact = all(a.is_exact for _, a in terms)
    k = max([a.log2den for _, a in terms if a.is_exact], default=0)
    table = np.zeros(1 << n, dtype=np.int64 if exact else float)
    for qubits, a in terms:
        on = np.ones_like(idx)
        for q in qubits:
            if not 0 <= q < n:
                raise DimensionError(f"term qubit {q} out of range for n={n}")
            on &= (idx >> q) & 1
        if exact:
            table += on * (a.num << (k - a.log2den))
        else:
            table += on * a.radians
    return DiagonalGate(n, table, k if exact else None, source_polynomial=terms)


def random_phase_polynomial(n: int, rng: np.random.Generator, n_terms: int | None = None,
                            log2den: int = 3, max_degree: int | None = None) -> DiagonalGate:
    """Random exact-angle phase polynomial with angles in multiples of pi/2^log2den."""
    if n_terms is None:
        n_terms = int(rng.integers(1, 2 * n + 2))
    max_degree = n if max_degree is None else min(max_degree, n)
    terms = []
    for _ in range(n_terms):
        size = int(rng.integers(1, max_degree + 1))
        qubits = sorted(int(q) for q in rng.choice(n, size=size, replace=False))
        terms.append((qubits, (int(rng.integers(1, 2 << log2den)), log2den)))
    return from_phase_polynomial(n, terms)


def from_pauli_exponential(p: PauliString, theta) -> DiagonalGate:
    """The diagonal gate ``exp(i theta P)`` for a Z-type Hermitian Pauli ``P``."""
    if p.x:
        raise ValueError(f"{p} is not diagonal; only Z-type exponentials are supported")
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian")
    theta = PhaseAngle.coerce(theta).scale(p.sign())
    par = _parity_vector(p.n, p.z)
    # theta*(-1)^{c.x} - theta = -2 theta [c.x odd]
    step = theta.scale(-2)
    if step.is_exact:
        return DiagonalGate(p.n, par * step.num, step.log2den)
    return DiagonalGate(p.n, par * step.value, None)


def multi_controlled_z(n: int) -> DiagonalGate:
    return from_phase_polynomial(n, [(range(n), (1, 0))])


_NAMED = {
    "I": (1, []),
    "Z": (1, [((0,), (1, 0))]),
    "S": (1, [((0,), (1, 1))]),
    "SDG": (1, [((0,), (-1, 1))]),
    "T": (1, [((0,), (1, 2))]),
    "TDG": (1, [((0,), (-1, 2))]),
    "CZ": (2, [((0, 1), (1, 0))]),
    "CS": (2, [((0, 1), (1, 1))]),
    "CCZ": (3, [((0, 1, 2), (1, 0))]),
    "CCCZ": (4, [((0, 1, 2, 3), (1, 0))]),
}

_CALL_RE = re.compile(r"^([A-Z]+)\((.*)\)$")


def named_gate(name: str) -> DiagonalGate:
    """Shorthands: T, TDG, S, SDG, Z, CZ, CS, CCZ, CCCZ, C<k>Z, RZ(angle), EXPZ(angle), EXPZZ(angle)."""
    key = name.strip().upper().replace(" ", "")
    if key in _NAMED:
        n, terms = _NAMED[key]
        return from_phase_polynomial(n, terms)
    m = re.match(r"^C(\d+)Z$", key)
    if m:
        return multi_controlled_z(int(m.group(1)) + 1)
    m = _CALL_RE.match(key)
    if m:
        func, arg = m.group(1), parse_angle(m.group(2).lower())
        if func == "RZ":
            return from_phase_polynomial(1, [((0,), arg)])
        if func.startswith("EXP") and set(func[3:]) == {"Z"}:
            k = len(func) - 3
            return from_pauli_exponential(PauliString(k, 0, (1 << k) - 1), arg)
    raise ParseError(f"unknown gate name {name!r}")


def gate_from_spec(spec) -> DiagonalGate:
    """Parse gate-spec JSON (dict) or a named shorthand (str)."""
    if isinstance(spec, str):
        return named_gate(spec)
    if not isinstance(spec, dict):
        raise ParseError(f"bad gate spec {spec!r}")
    if "name" in spec:
        return named_gate(spec["name"])
    try:
        n = int(spec["n"])
        terms = [(t["qubits"], PhaseAngle.from_json(t["angle"])) for t in spec.get("terms", [])]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad gate spec: {exc}") from exc
    return from_phase_polynomial(n, terms)


def magic_state(d: DiagonalGate, cap: int | None = None) -> DenseState:
    check_cap(d.n, cap)
    return DenseState(d.n, d.phase_vector() / math.sqrt(1 << d.n))


def _as_mask(bits, n: int) -> int:
    if isinstance(bits, (int, np.integer)):
        if not 0 <= bits < (1 << n):
            raise DimensionError(f"bit mask {bits} does not fit {n} qubits")
        return int(bits)
    bits = list(bits)
    if len(bits) != n:
        raise DimensionError(f"bitstring has length {len(bits)}, expected {n}")
    return sum(int(b) << q for q, b in enumerate(bits))


def pauli_expectation(d: DiagonalGate, b, c) -> complex:
    """``<D| X^b Z^c |D>``; exact fourth root of unity when the magnitude is 1."""
    b, c = _as_mask(b, d.n), _as_mask(c, d.n)
    hit = find_stabilizer(d, b)
    if hit is not None and hit[0] == c:
        return 1j ** (-hit[1])
    idx = np.arange(1 << d.n)
    rad = d.radians()
    sign = 1 - 2 * _parity_vector(d.n, c)
    return complex(np.mean(sign * np.exp(1j * (rad - rad[idx ^ b]))))


def find_stabilizer(d: DiagonalGate, b: int):
    """Find ``(c, e)`` with ``i^e X^b Z^c |D> = |D>``, or ``None``.

    For fixed ``b`` the phase difference ``phi(x) - phi(x^b)`` must be a
    constant plus ``pi`` times a linear function ``c.x``; ``c`` is then
    unique and the constant is a multiple of ``pi/2``.
    """
    n = d.n
    idx = np.arange(1 << n)
    if d.is_exact:
        mod = 2 << d.log2den
        half = 1 << d.log2den
        g = np.mod(d.table - d.table[idx ^ b], mod)
        g0 = int(g[0])
        delta = np.mod(g - g0, mod)
        if np.any((delta != 0) & (delta != half)):
            return None
        c = 0
        for q in range(n):
            if delta[1 << q] == half:
                c |= 1 << q
        if np.any(delta != half * _parity_vector(n, c)):
            return None
        if (4 * g0) % mod:
            raise InvariantViolation("stabilizer eigenvalue is not a fourth root of unity")
        quarter = 4 * g0 // mod
    else:
        rad = d.table
        g = rad - rad[idx ^ b]
        g0 = float(g[0])
        delta = np.mod(g - g0 + math.pi / 2, 2 * math.pi) - math.pi / 2
        near0 = np.abs(delta) < ANGLE_TOLERANCE
        nearpi = np.abs(delta - math.pi) < ANGLE_TOLERANCE
        if not np.all(near0 | nearpi):
            return None
        c = 0
        for q in range(n):
            if nearpi[1 << q]:
                c |= 1 << q
        if np.any(nearpi != (_parity_vector(n, c) == 1)):
            return None
        qf = g0 / (math.pi / 2)
        if abs(qf - round(qf)) > 1e-6:
            raise InvariantViolation("stabilizer eigenvalue is not a fourth root of unity")
        quarter = int(round(qf))
    # X^b Z^c |D> = e^{i g0} |D>, so the stabilizer carries phase e^{-i g0}
    return c, (-quarter) % 4


@dataclass(frozen=True)
class PhasedStabilizer:
    pauli: PauliString
    b: int
    c: int
    phase: int


def stabilizer_group(d: DiagonalGate, cap: int = SEARCH_CAP) -> list[PhasedStabilizer]:
    """Every Pauli stabilizer of ``|D>`` by exhaustive search over X-parts."""
    if d.n > cap:
        raise OracleCapExceeded(f"{d.n} qubits exceeds the stabilizer search cap of {cap}")
    group = []
    for b in range(1 << d.n):
        hit = find_stabilizer(d, b)
        if hit is not None:
            c, e = hit
            group.append(PhasedStabilizer(PauliString(d.n, b, c, e), b, c, e))
    return group


def stabilizer_generators(d: DiagonalGate, cap: int = SEARCH_CAP) -> list[PauliString]:
    """An independent generating set of the stabilizer group."""
    gens, basis = [], []
    for s in stabilizer_group(d, cap):
        v = s.b
        for w in basis:
            v = min(v, v ^ w)
        if v:
            basis.append(v)
            gens.append(s.pauli)
    return gens


def nullity(d: DiagonalGate, cap: int = SEARCH_CAP) -> int:
    size = len(stabilizer_group(d, cap))
    log = size.bit_length() - 1
    if size != 1 << log:
        raise InvariantViolation(f"stabilizer group size {size} is not a power of two")
    return d.n - log
