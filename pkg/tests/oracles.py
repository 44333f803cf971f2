"""Independent checks shared by the test modules."""

import numpy as np

from magicroute.dense import DenseState, extract_subsystem, is_stabilized, run_ops
from magicroute.errors import ZeroAmplitudeError
from magicroute.tableau import StabilizerTableau, run_circuit


def engine_agrees_with_dense(circuit, rng, tol=1e-9):
    """Run ``circuit`` from |0..0> in both engines and compare.

    The tableau run samples outcomes; the dense run post-selects on the same
    outcomes. The surviving dense state must be stabilized by every final
    generator and carry squared norm 2^-(number of random outcomes).
    """
    kinds = []
    tab, record, live = run_circuit(StabilizerTableau.zero(circuit.n), circuit, rng=rng,
                                    kinds=kinds)
    psi0 = np.zeros(1 << circuit.n, dtype=complex)
    psi0[0] = 1.0
    psi = DenseState(circuit.n, run_ops(circuit, psi0, record))
    expected = 2.0 ** -kinds.count("random")
    if abs(psi.norm() ** 2 - expected) > tol:
        return False
    sub = extract_subsystem(psi, live).normalized()
    return all(is_stabilized(g, sub, 1e-8) for g in tab.generators)


def forced_contradiction_is_zero(circuit, outcomes):
    """A ZeroAmplitudeError in the engine must match a zero dense amplitude."""
    psi0 = np.zeros(1 << circuit.n, dtype=complex)
    psi0[0] = 1.0
    dense_zero = np.linalg.norm(run_ops(circuit, psi0, outcomes)) < 1e-9
    try:
        run_circuit(StabilizerTableau.zero(circuit.n), circuit, outcomes)
    except ZeroAmplitudeError:
        return dense_zero
    return not dense_zero


def applies_gate(circuit, gate, data, rng, outcomes=None, n_inputs=3, cap=None, tol=1e-9):
    """``circuit`` maps a random input to ``gate`` on ``data`` (up to scale).

    The input lives on ``circuit.inputs()``; ``data`` lists the qubits the gate
    should act on. Every branch checked must have nonzero amplitude.
    """
    from magicroute.dense import apply_diagonal, proportional, simulate_circuit

    inputs = circuit.inputs()
    for _ in range(n_inputs):
        psi = DenseState.random(len(inputs), rng)
        out = simulate_circuit(circuit, psi, outcomes, cap=cap)
        if out.norm() < tol:
            return False
        got = extract_subsystem(out, inputs).amplitudes
        want = apply_diagonal(gate, [inputs.index(q) for q in data], psi.amplitudes)
        if not proportional(got, want, tol):
            return False
    return True


def all_outcomes(circuit):
    """Every outcome bit string of ``circuit`` (use only for few measurements)."""
    import itertools

    return [list(b) for b in itertools.product((0, 1), repeat=circuit.num_measurements())]


def dense_nullity(psi, n):
    """Nullity from a state vector: n - log2 of the number of Paulis with |<P>| = 1."""
    from magicroute.dense import apply_pauli
    from magicroute.pauli import PauliString

    count = 0
    for x in range(1 << n):
        for z in range(1 << n):
            val = np.vdot(psi, apply_pauli(PauliString(n, x, z), psi))
            count += abs(abs(val) - 1) < 1e-9
    return n - int(round(np.log2(count)))
