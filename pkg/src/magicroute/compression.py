"""Compression of a diagonal gate onto its non-Clifford core.

:func:`compress` finds Clifford circuits ``V`` and ``V'`` with
``V . D . V' = 1 (x) D'`` where ``D'`` acts on ``nullity(D)`` qubits. Each
round strips one qubit: a stabilizer ``X^b Z^c`` of ``D|+>`` is rotated to
``X_0`` by CNOTs, diagonal Cliffords and a SWAP, after which the gate no
longer depends on qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Op
from .dense import DEFAULT_CAP, TOLERANCE, allclose_up_to_phase, check_cap, unitary_of_circuit
from .diagonal import DiagonalGate, find_stabilizer, gate_from_spec
from .errors import DimensionError, InvariantViolation
from .tableau import Bipartition

# phase of each diagonal Clifford in units of pi/2, as (local table over its qubits)
_DIAG_CLIFFORD = {"S": [0, 1], "SDG": [0, 3], "Z": [0, 2], "CZ": [0, 0, 0, 2]}


def conjugate_by_cnot_product(d: DiagonalGate, pairs) -> DiagonalGate:
    """``V D V`` for ``V`` a product of CNOTs sharing one control.

    ``V`` permutes basis states, ``y -> y ^ (y_x * mask)``, so the result is
    ``d`` reindexed by that involution.
    """
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        return d
    controls = {c for c, _ in pairs}
    if len(controls) != 1:
        raise ValueError("CNOT pairs must share a single control")
    (x,) = controls
    mask = 0
    for c, t in pairs:
        if t == c:
            raise ValueError(f"CNOT pair ({c}, {t}) has control equal to target")
        if not (0 <= t < d.n and 0 <= c < d.n):
            raise DimensionError(f"CNOT pair ({c}, {t}) out of range")
        mask ^= 1 << t
    idx = np.arange(1 << d.n)
    return d.reindexed(idx ^ (((idx >> x) & 1) * mask))


def diagonal_clifford_gate(n: int, ops) -> DiagonalGate:
    """Phase table of a product of ``S``, ``SDG``, ``Z`` and ``CZ`` gates."""
    idx = np.arange(1 << n)
    table = np.zeros(1 << n, dtype=np.int64)
    for op in ops:
        kind, qubits = (op.kind, op.qubits) if isinstance(op, Op) else (op[0], tuple(op[1:]))
        if kind not in _DIAG_CLIFFORD:
            raise ValueError(f"{kind} is not a diagonal Clifford gate")
        sub = np.zeros_like(idx)
        for i, q in enumerate(qubits):
            sub |= ((idx >> q) & 1) << i
        table += np.asarray(_DIAG_CLIFFORD[kind])[sub]
    return DiagonalGate(n, table, 1)


def left_multiply_diagonal_clifford(d: DiagonalGate, v_z) -> DiagonalGate:
    """``V_Z . D`` for a diagonal Clifford ``V_Z`` (a :class:`Circuit` or op list)."""
    ops = v_z.ops if isinstance(v_z, Circuit) else v_z
    return diagonal_clifford_gate(d.n, ops).multiply(d)


@dataclass
class CompressionResult:
    v: Circuit
    v_prime: Circuit
    core: DiagonalGate
    n_prime: int
    transcript: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.v.n

    @property
    def core_qubits(self) -> list[int]:
        return list(range(self.n - self.n_prime, self.n))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "n_prime": self.n_prime,
            "v": self.v.to_json(),
            "v_prime": self.v_prime.to_json(),
            "core": self.core.to_spec(),
            "transcript": self.transcript,
        }

    @classmethod
    def from_json(cls, obj) -> "CompressionResult":
        return cls(Circuit.from_json(obj["v"]), Circuit.from_json(obj["v_prime"]),
                   gate_from_spec(obj["core"]), int(obj["n_prime"]),
                   list(obj.get("transcript", [])))


def _first_stabilizer(d: DiagonalGate):
    for b in range(1, 1 << d.n):
        hit = find_stabilizer(d, b)
        if hit is not None:
            return b, hit
    return None


def compress(d: DiagonalGate) -> CompressionResult:
    n = d.n
    active = list(range(n))  # local index -> original qubit
    v_rounds, vp_rounds, transcript = [], [], []
    cur = d
    while cur.n:
        found = _first_stabilizer(cur)
        if found is None:
            break
        b, (c, _) = found
        x = (b & -b).bit_length() - 1
        targets = [j for j in range(cur.n) if (b >> j) & 1 and j != x]
        v_x = [Op("CNOT", (x, j)) for j in targets]
        cur = conjugate_by_cnot_product(cur, [(x, j) for j in targets])

        hit = find_stabilizer(cur, 1 << x)
        if hit is None:
            raise InvariantViolation("CNOT conjugation lost the stabilizer")
        c_prime = hit[0]
        v_z = []
        if (c_prime >> x) & 1:
            v_z.append(Op("S", (x,)))
        v_z += [Op("CZ", (x, j)) for j in range(cur.n) if j != x and (c_prime >> j) & 1]
        cur = left_multiply_diagonal_clifford(cur, v_z)

        v_s = []
        if x != 0:
            v_s.append(Op("SWAP", (0, x)))
            perm = list(range(cur.n))
            perm[0], perm[x] = x, 0
            cur = cur.permute_qubits(perm)

        hit = find_stabilizer(cur, 1)
        if hit is None or hit[0] != 0 or hit[1] % 2:
            raise InvariantViolation("round did not reach an X_0 stabilizer")
        v_plus = []
        if hit[1] == 2:
            v_plus.append(Op("Z", (0,)))
            cur = left_multiply_diagonal_clifford(cur, v_plus)
        cur = cur.factor_first_qubit()

        def lift(ops):
            return [Op(op.kind, tuple(active[q] for q in op.qubits)) for op in ops]

        v_rounds.append(lift(v_x) + lift(v_z) + lift(v_s) + lift(v_plus))
        vp_rounds.append(lift(v_s) + lift(v_x))
        transcript.append({
            "b": b,
            "c": c,
            "pivot": active[x],
            "v_x": [[active[x], active[j]] for j in targets],
            "c_prime": c_prime,
            "v_z": [op.to_json() for op in lift(v_z)],
            "swap": [active[0], active[x]] if v_s else None,
            "sign_fix": bool(v_plus),
        })
        active = active[1:]
    v = Circuit(n, [op for ops in v_rounds for op in ops])
    v_prime = Circuit(n, [op for ops in reversed(vp_rounds) for op in ops])
    return CompressionResult(v, v_prime, cur, cur.n, transcript)


def compressed_unitary(result: CompressionResult, d: DiagonalGate, cap: int | None = None):
    """Dense ``V . D . V'`` and the expected ``1 (x) core``."""
    check_cap(d.n, cap)
    if d.n != result.n:
        raise DimensionError("result and gate sizes differ")
    uv = unitary_of_circuit(result.v, cap)
    uvp = unitary_of_circuit(result.v_prime, cap)
    got = uv @ (d.phase_vector()[:, None] * uvp)
    expect = DiagonalGate.identity(d.n - result.n_prime).tensor(result.core)
    return got, np.diag(expect.phase_vector())


def verify_compression(result: CompressionResult, d: DiagonalGate, cap: int | None = None,
                       tol: float = TOLERANCE) -> bool:
    got, expect = compressed_unitary(result, d, cap)
    return allclose_up_to_phase(got, expect, tol)


def entangled_injection_circuit(d: DiagonalGate, cut: Bipartition) -> Circuit:
    """Circuit applying ``d`` to the Y side of ``cut`` using ``nullity(d)`` ebits.

    ``d`` acts on ``cut.right`` in sorted order. Two ancillas are appended per
    core qubit: ``f_i`` on Y and ``e_i`` on X. A Bell pair ``(e_i, f_i)`` is
    the only cross-cut operation; the core runs on the X side via a remote
    gate gadget and the Clifford frame ``V``, ``V'`` is undone on Y.
    Outcome bits all 0 need no correction; other outcomes are corrected.
    """
    data = list(cut.right)
    if len(data) != d.n:
        raise DimensionError(f"gate acts on {d.n} qubits but the Y side has {len(data)}")
    n0 = len(cut.left) + len(cut.right)
    cut.validate(n0)
    res = compress(d)
    k = res.n_prime
    n = n0 + 2 * k
    f = [n0 + 2 * i for i in range(k)]
    e = [n0 + 2 * i + 1 for i in range(k)]
    regions = ["X" if q in set(cut.left) else "Y" for q in range(n0)]
    regions += ["Y", "X"] * k
    circ = Circuit(n, regions=regions, ancillas=tuple(f + e))
    circ.ops.extend(res.v_prime.inverse().remapped(data, n).ops)
    core_data = [data[q] for q in res.core_qubits]
    for i in range(k):
        circ.append("H", e[i])
        circ.append("CNOT", e[i], f[i])
    for i in range(k):
        circ.append("CNOT", core_data[i], f[i])
        m = circ.measure_z(f[i])
        circ.append("X", e[i], condition=(m,))
    if k:
        circ.diag(res.core, *e)
    for i in range(k):
        m = circ.measure_x(e[i])
        circ.append("Z", core_data[i], condition=(m,))
    circ.ops.extend(res.v.inverse().remapped(data, n).ops)
    return circ


def injection_cap(d: DiagonalGate, n_x: int = 0) -> int:
    """Dense cap needed to simulate :func:`entangled_injection_circuit` for ``d``."""
    return max(DEFAULT_CAP, d.n + n_x + 2 * d.n)
