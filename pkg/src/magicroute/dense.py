"""Brute-force statevector oracle for small registers.

Basis index ``x`` is little-endian: bit ``q`` of ``x`` is the value of
qubit ``q``. Everything here is exponential in the qubit count and is
meant for verification only; operations refuse registers above the cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, OracleCapExceeded, ZeroAmplitudeError
from .pauli import PauliString

DEFAULT_CAP = 12
TOLERANCE = 1e-9


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n,):
            raise DimensionError(
                f"expected {1 << self.n} amplitudes, got {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, n: int, cap: int | None = None) -> "DenseState":
        check_cap(n, cap)
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
        return cls(n, psi)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "DenseState":
        psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return cls(n, psi / np.linalg.norm(psi))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "DenseState":
        nrm = self.norm()
        if nrm < TOLERANCE:
            raise ZeroAmplitudeError("cannot normalize a zero vector")
        return DenseState(self.n, self.amplitudes / nrm)

    def tensor(self, other: "DenseState") -> "DenseState":
        """``self`` on the low qubits, ``other`` on the high qubits."""
        return DenseState(self.n + other.n, np.kron(other.amplitudes, self.amplitudes))


def check_cap(n: int, cap: int | None = None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if n > cap:
        raise OracleCapExceeded(f"{n} qubits exceeds the dense oracle cap of {cap}")


def _col(v: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return v.reshape(v.shape + (1,) * (psi.ndim - 1))


def _bit(idx: np.ndarray, q: int) -> np.ndarray:
    return (idx >> q) & 1


def _parity(idx: np.ndarray, mask: int) -> np.ndarray:
    par = np.zeros_like(idx)
    q = 0
    while mask:
        if mask & 1:
            par ^= _bit(idx, q)
        mask >>= 1
        q += 1
    return par


def apply_pauli(p: PauliString, psi: np.ndarray) -> np.ndarray:
    """Apply ``i^e X^b Z^c`` along axis 0 of ``psi``."""
    idx = np.arange(psi.shape[0])
    out = psi * _col(1 - 2 * _parity(idx, p.z), psi)
    out = out[idx ^ p.x]
    return out * (1j ** p.phase)


def pauli_matrix(p: PauliString) -> np.ndarray:
    return apply_pauli(p, np.eye(1 << p.n, dtype=complex))


def apply_gate(kind: str, qubits, psi: np.ndarray) -> np.ndarray:
    """Apply one Clifford gate along axis 0 of ``psi`` (vector or matrix)."""
    idx = np.arange(psi.shape[0])
    if kind == "X":
        return psi[idx ^ (1 << qubits[0])]
    if kind in ("Z", "S", "SDG"):
        b = _bit(idx, qubits[0])
        factor = {"Z": -1.0, "S": 1j, "SDG": -1j}[kind]
        return psi * _col(np.where(b == 1, factor, 1.0), psi)
    if kind == "H":
        m = 1 << qubits[0]
        sign = 1 - 2 * _bit(idx, qubits[0])
        return (psi[idx & ~m] + _col(sign, psi) * psi[idx | m]) / np.sqrt(2)
    if kind == "CNOT":
        c, t = qubits
        return psi[idx ^ (_bit(idx, c) << t)]
    if kind == "CZ":
        a, b = qubits
        return psi * _col(1 - 2 * (_bit(idx, a) & _bit(idx, b)), psi)
    if kind == "SWAP":
        a, b = qubits
        diff = _bit(idx, a) ^ _bit(idx, b)
        return psi[idx ^ (diff << a) ^ (diff << b)]
    raise ValueError(f"unsupported gate {kind!r}")


def apply_diagonal(gate, qubits, psi: np.ndarray) -> np.ndarray:
    idx = np.arange(psi.shape[0])
    sub = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        sub |= _bit(idx, q) << i
    return psi * _col(gate.phase_vector()[sub], psi)


def _condition_met(op, record) -> bool:
    if not op.condition:
        return True
    par = 0
    for k in op.condition:
        par ^= record[k]
    return bool(par)


def _embed_input(circuit, state: DenseState | None, cap) -> np.ndarray:
    n = circuit.n
    check_cap(n, cap)
    if state is None:
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
        return psi
    if state.n == n:
        return state.amplitudes.copy()
    inputs = circuit.inputs()
    if state.n != len(inputs):
        raise DimensionError(
            f"input has {state.n} qubits, circuit expects {len(inputs)} or {n}"
        )
    psi = np.zeros(1 << n, dtype=complex)
    sub = np.arange(1 << state.n)
    full = np.zeros_like(sub)
    for i, q in enumerate(inputs):
        full |= _bit(sub, i) << q
    psi[full] = state.amplitudes
    return psi


def run_ops(circuit, psi: np.ndarray, outcomes=None) -> np.ndarray:
    """Apply the post-selected linear map of ``circuit`` along axis 0 of ``psi``."""
    record = []
    n_meas = circuit.num_measurements()
    outcomes = list(outcomes) if outcomes is not None else [0] * n_meas
    if len(outcomes) != n_meas:
        raise DimensionError(f"need {n_meas} outcomes, got {len(outcomes)}")
    idx = np.arange(psi.shape[0])
    for op in circuit.ops:
        if op.kind in ("MPP", "MZ"):
            m = outcomes[len(record)]
            record.append(m)
            if op.kind == "MZ":
                keep = _bit(idx, op.qubits[0]) == m
                psi = psi * _col(keep.astype(float), psi)
            else:
                p = op.pauli.embed(op.qubits, circuit.n)
                psi = (psi + (-1) ** m * apply_pauli(p, psi)) / 2
            continue
        if not _condition_met(op, record):
            continue
        if op.kind == "DIAG":
            psi = apply_diagonal(op.gate, op.qubits, psi)
        else:
            psi = apply_gate(op.kind, op.qubits, psi)
    return psi


def simulate_circuit(circuit, state: DenseState | None = None, outcomes=None,
                     cap: int | None = None) -> DenseState:
    """Dense post-selected simulation.

    ``state`` is either a full ``circuit.n``-qubit state or a state on the
    circuit's input qubits (ancillas are then started in ``|0>``).
    ``outcomes`` fixes every measurement outcome bit in order (default all 0).
    """
    psi = _embed_input(circuit, state, cap)
    return DenseState(circuit.n, run_ops(circuit, psi, outcomes))


def unitary_of_circuit(circuit, cap: int | None = None) -> np.ndarray:
    check_cap(circuit.n, cap)
    for op in circuit.ops:
        if op.kind in ("MPP", "MZ") or op.condition:
            raise ValueError("unitary_of_circuit requires a measurement-free circuit")
    return run_ops(circuit, np.eye(1 << circuit.n, dtype=complex))


def entanglement_entropy(state: DenseState, left) -> float:
    """Base-2 von Neumann entropy of the reduced state on qubits ``left``."""
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValueError("entanglement_entropy requires a normalized state")
    left = sorted(left)
    right = [q for q in range(state.n) if q not in set(left)]
    idx = np.arange(1 << state.n)
    li = np.zeros_like(idx)
    ri = np.zeros_like(idx)
    for i, q in enumerate(left):
        li |= _bit(idx, q) << i
    for i, q in enumerate(right):
        ri |= _bit(idx, q) << i
    mat = np.zeros((1 << len(left), 1 << len(right)), dtype=complex)
    mat[li, ri] = state.amplitudes
    s = np.linalg.svd(mat, compute_uv=False)
    p = s**2
    p = p[p > 1e-15]
    return float(-(p * np.log2(p)).sum())


def allclose_up_to_phase(a, b, tol: float = TOLERANCE) -> bool:
    """Max-norm equality after aligning the phase of b's largest entry."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < tol:
        return float(np.max(np.abs(a), initial=0.0)) < tol
    if abs(a[k]) < tol:
        return False
    phase = a[k] / b[k]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b))) <= tol


def proportional(a, b, tol: float = TOLERANCE) -> bool:
    """Projective equality of two (unnormalized) vectors."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return False
    return allclose_up_to_phase(a / na, b / nb, tol)


def extract_subsystem(state: DenseState, keep, tol: float = TOLERANCE) -> DenseState:
    """State of qubits ``keep`` when every other qubit is in a basis state.

    Raises ``ValueError`` when the discarded qubits are not in a product
    computational-basis state.
    """
    keep = list(keep)
    psi = state.amplitudes
    k = int(np.argmax(np.abs(psi)))
    mask = 0
    for q in keep:
        mask |= 1 << q
    fixed = k & ~mask
    sub = np.arange(1 << len(keep))
    full = np.full_like(sub, fixed)
    for i, q in enumerate(keep):
        full |= ((sub >> i) & 1) << q
    out = psi[full]
    if abs(np.linalg.norm(out) - state.norm()) > tol * max(1.0, state.norm()):
        raise ValueError("discarded qubits are not in a computational basis state")
    return DenseState(len(keep), out)


def stabilizer_state_vector(generators, n: int, cap: int | None = None) -> DenseState:
    """Normalized state stabilized by ``generators`` (projector method)."""
    check_cap(n, cap)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    for g in generators:
        psi = (psi + apply_pauli(g, psi)) / 2
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise ZeroAmplitudeError("generators stabilize no state")
    return DenseState(n, psi / nrm)


def is_stabilized(p: PauliString, state: DenseState, tol: float = TOLERANCE) -> bool:
    psi = state.amplitudes
    return float(np.max(np.abs(apply_pauli(p, psi) - psi))) <= tol
