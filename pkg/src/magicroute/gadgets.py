"""Injection gadgets, Choi states of stabilizer circuits and local simulation cost.

Region tags are ``"X"`` (factory side, where non-Clifford gates may act)
and ``"Y"`` (computational side).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Op
from .dense import DenseState, TOLERANCE, proportional, stabilizer_state_vector
from .diagonal import DiagonalGate
from .errors import DimensionError, ZeroAmplitudeError
from .tableau import Bipartition, StabilizerTableau, distillable_entanglement, run_circuit


@dataclass
class InjectionCircuit(Circuit):
    """A :class:`Circuit` with mandatory region tags."""

    postselected_only: bool = False

    def __post_init__(self):
        super().__post_init__()
        if self.regions is None:
            raise ValueError("injection circuits need a region tag per qubit")
        for r in self.regions:
            if r not in ("X", "Y"):
                raise ValueError(f"unknown region tag {r!r}")

    @classmethod
    def wrap(cls, circuit: Circuit, regions=None, postselected_only=False) -> "InjectionCircuit":
        regions = circuit.regions if regions is None else regions
        return cls(circuit.n, list(circuit.ops), regions, circuit.ancillas, postselected_only)

    def bipartition(self) -> Bipartition:
        return Bipartition.from_regions(self.regions)

    def non_clifford_sites(self) -> list[int]:
        return sorted({q for op in self.ops if op.kind == "DIAG" for q in op.qubits})

    def is_factory_local(self, side: str = "X") -> bool:
        """True when every diagonal gate acts only on ``side``."""
        return all(self.regions[q] == side for q in self.non_clifford_sites())

    def to_json(self) -> dict:
        out = super().to_json()
        if self.postselected_only:
            out["postselected_only"] = True
        return out

    @classmethod
    def from_json(cls, obj) -> "InjectionCircuit":
        base = Circuit.from_json(obj)
        return cls.wrap(base, postselected_only=bool(obj.get("postselected_only", False)))


def _register(data_qubits, other_qubits, n, regions, other_tag):
    data_qubits, other_qubits = list(data_qubits), list(other_qubits)
    if len(set(data_qubits) | set(other_qubits)) != len(data_qubits) + len(other_qubits):
        raise DimensionError("data and ancilla qubits overlap")
    if n is None:
        n = max(data_qubits + other_qubits) + 1
    if regions is None:
        regions = ["Y"] * n
        for q in other_qubits:
            regions[q] = other_tag
    return data_qubits, other_qubits, n, regions


def remote_gate_gadget(d: DiagonalGate, data_qubits, ancilla_qubits, n=None,
                       regions=None) -> InjectionCircuit:
    """Apply ``d`` to the data through fresh ancillas.

    Each data qubit is copied into its ``|0>`` ancilla by a CNOT, ``d`` acts on
    the ancillas, which are then measured in the X basis; outcome bit 1 is
    undone by a Z on the matching data qubit.
    """
    data, anc, n, regions = _register(data_qubits, ancilla_qubits, n, regions, "X")
    if not len(data) == len(anc) == d.n:
        raise DimensionError("need one ancilla per data qubit and per gate qubit")
    circ = InjectionCircuit(n, regions=regions, ancillas=tuple(anc))
    for q, a in zip(data, anc):
        circ.append("CNOT", q, a)
    circ.diag(d, *anc)
    for q, a in zip(data, anc):
        m = circ.measure_x(a)
        circ.append("Z", q, condition=(m,))
    return circ


_DIAGONAL_CLIFFORDS = {0: [], 1: ["S"], 2: ["Z"], 3: ["SDG"]}


def _single_qubit_correction(d: DiagonalGate):
    """Diagonal Clifford ``C`` (as gate names) with ``C X D X ~ D``, or None."""
    flipped = d.phase_vector()[::-1]
    for power, names in _DIAGONAL_CLIFFORDS.items():
        c = np.array([1.0, 1j**power])
        if proportional(c * flipped, d.phase_vector()):
            return names
    return None


def resource_injection_gadget(d: DiagonalGate, data_qubits, resource_qubits, n=None,
                              regions=None) -> InjectionCircuit:
    """Apply ``d`` by consuming the magic state ``d|+>`` on the resource register.

    The resource is prepared in the circuit (``H`` then ``d``). Each data qubit
    controls a CNOT onto its resource qubit, which is then measured in Z.
    Outcome ``m`` leaves ``X^m d X^m`` on the data. For single-qubit gates a
    diagonal Clifford correction is attached when one exists; otherwise only
    the all-zero branch is correct and ``postselected_only`` is set.
    """
    data, res, n, regions = _register(data_qubits, resource_qubits, n, regions, "X")
    if not len(data) == len(res) == d.n:
        raise DimensionError("need one resource qubit per data qubit and per gate qubit")
    circ = InjectionCircuit(n, regions=regions, ancillas=tuple(res))
    for r in res:
        circ.append("H", r)
    circ.diag(d, *res)
    for q, r in zip(data, res):
        circ.append("CNOT", q, r)
    fix = _single_qubit_correction(d) if d.n == 1 else None
    for q, r in zip(data, res):
        m = circ.measure_z(r)
        for name in fix or []:
            circ.append(name, q, condition=(m,))
    circ.postselected_only = fix is None
    return circ


def _choi(circuit: Circuit, outcomes=None, rng=None):
    """Choi tableau plus the side tag of each surviving qubit.

    Layout: references of the X inputs, the X qubits, the Y qubits, then
    references of the Y inputs. Ancillas get no reference copy.
    """
    if circuit.regions is None:
        raise ValueError("Choi state requires region tags")
    if not circuit.is_clifford():
        raise ValueError("Choi state requires a circuit without diagonal gates")
    regions = circuit.regions
    inputs = set(circuit.inputs())
    xs = [q for q in range(circuit.n) if regions[q] == "X"]
    ys = [q for q in range(circuit.n) if regions[q] != "X"]
    ref_x = [q for q in xs if q in inputs]
    ref_y = [q for q in ys if q in inputs]
    N = len(ref_x) + circuit.n + len(ref_y)
    pos = {q: len(ref_x) + i for i, q in enumerate(xs + ys)}
    refs = {q: i for i, q in enumerate(ref_x)}
    refs.update({q: len(ref_x) + circuit.n + i for i, q in enumerate(ref_y)})
    sides = ["X"] * (len(ref_x) + len(xs)) + ["Y"] * (len(ys) + len(ref_y))
    tab = StabilizerTableau.zero(N)
    for q, r in refs.items():
        tab.apply_gate("H", (r,))
        tab.apply_gate("CNOT", (r, pos[q]))
    mapped = Circuit(N, [Op(op.kind, tuple(pos[q] for q in op.qubits), op.pauli, op.gate,
                            op.condition) for op in circuit.ops])
    if outcomes is None:
        outcomes = [0] * mapped.num_measurements()
    tab, _, live = run_circuit(tab, mapped, outcomes, rng)
    return tab, [sides[q] for q in live]


def choi_state(circuit: Circuit, outcomes=None, with_sides: bool = False):
    """Tableau of the normalized Choi state (outcome bits default to all 0, i.e. +1).

    With ``with_sides`` the side tag of every tableau qubit is returned too.
    """
    tab, sides = _choi(circuit, outcomes)
    return (tab, sides) if with_sides else tab


def choi_cut(sides) -> Bipartition:
    return Bipartition.from_regions(sides)


def operation_cost(op: Op, cut: Bipartition) -> int:
    """Ebits in the Choi state of ``op`` across ``cut`` (measurements at outcome +1).

    A classical condition is treated as satisfied; diagonal gates cost 0.
    """
    if op.kind == "DIAG":
        return 0
    sides = {q: "X" for q in cut.left}
    sides.update({q: "Y" for q in cut.right})
    if len({sides[q] for q in op.qubits}) < 2:
        return 0
    local = Op(op.kind, tuple(range(len(op.qubits))), op.pauli, op.gate)
    sub = Circuit(len(op.qubits), [local], regions=[sides[q] for q in op.qubits])
    tab, tags = _choi(sub)
    return distillable_entanglement(tab, choi_cut(tags))


def circuit_cost(circuit: Circuit, cut: Bipartition | None = None) -> int:
    """Sum of :func:`operation_cost` over the circuit."""
    if cut is None:
        if circuit.regions is None:
            raise ValueError("circuit_cost needs a cut or region tags")
        cut = Bipartition.from_regions(circuit.regions)
    cut.validate(circuit.n)
    return sum(operation_cost(op, cut) for op in circuit.ops)


def choi_vector(choi, cap: int | None = None) -> DenseState:
    if isinstance(choi, StabilizerTableau):
        return stabilizer_state_vector(choi.generators, choi.n, cap)
    return choi


def choi_layout(circuit: Circuit) -> tuple[int, int]:
    """Number of X-side and Y-side reference qubits in the Choi layout."""
    inputs = set(circuit.inputs())
    ref_x = sum(1 for q in inputs if circuit.regions[q] == "X")
    return ref_x, len(inputs) - ref_x


def theta_injection(choi, state: DenseState, ref_x: int, cap: int | None = None) -> DenseState:
    """Post-selected teleportation of ``state`` through a Choi state.

    ``state`` lives on the circuit inputs, X inputs in the low qubits. Its X
    part is projected with the ``ref_x`` leading reference qubits onto
    ``|Psi+>`` and its Y part with the trailing references, leaving the
    circuit output (X qubits then Y qubits) proportional to ``C|state>``.
    """
    vec = choi_vector(choi, cap).amplitudes
    n_total = int(np.log2(vec.size))
    ref_y = state.n - ref_x
    n_out = n_total - state.n
    if ref_y < 0 or n_out < 0:
        raise DimensionError("input does not fit the Choi state")
    # C-order reshape puts the most significant block first
    tensor = vec.reshape(1 << ref_y, 1 << n_out, 1 << ref_x)
    psi = state.amplitudes.reshape(1 << ref_y, 1 << ref_x)
    out = np.einsum("boa,ba->o", tensor, psi)
    if np.linalg.norm(out) < TOLERANCE:
        raise ZeroAmplitudeError("post-selected teleportation has zero amplitude")
    return DenseState(n_out, out)
