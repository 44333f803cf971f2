"""Magic-state injection costs, diagonal-gate compression and factory routing."""

from .circuit import Circuit, Op, depth
from .compression import (CompressionResult, compress, entangled_injection_circuit,
                          verify_compression)
from .dense import DenseState, simulate_circuit, unitary_of_circuit
from .diagonal import DiagonalGate, PhaseAngle, gate_from_spec, named_gate, nullity
from .errors import (DimensionError, InvariantViolation, MagicRouteError, OracleCapExceeded,
                     ParseError, ZeroAmplitudeError)
from .gadgets import (InjectionCircuit, choi_state, circuit_cost, operation_cost,
                      remote_gate_gadget, resource_injection_gadget, theta_injection)
from .pauli import PauliString
from .router import (ArchitectureGraph, CompiledSchedule, GateRequest, compile_injections,
                     depth_lower_bound, edp_route, long_range_cnot, min_cut)
from .tableau import (BellNormalForm, Bipartition, StabilizerTableau, bipartite_decompose,
                      canonical_form, distillable_entanglement, new_zero_state)

__version__ = "0.1.0"
