"""Command-line front end.

Every command prints JSON (or a short text report with ``--human``).
Exit codes: 0 success, 2 bad input, 3 invariant violation or failed
verification, 4 dense oracle cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circuit import Circuit
from .compression import CompressionResult, compress, verify_compression
from .dense import (DEFAULT_CAP, TOLERANCE, DenseState, extract_subsystem, proportional,
                    simulate_circuit)
from .diagonal import gate_from_spec, nullity, stabilizer_generators
from .errors import InvariantViolation, OracleCapExceeded, ParseError
from .gadgets import circuit_cost
from .router import (ROUND_DEPTH, UNBOUNDED, ArchitectureGraph, CompiledSchedule,
                     GateRequest, compile_injections, depth_lower_bound)
from .tableau import Bipartition

COMMANDS = ("nullity", "compress", "cost", "lowerbound", "route", "verify")
MAX_CAP = 14

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_CAP = 0, 2, 3, 4


@dataclass
class JobConfig:
    command: str
    gate: str | None = None
    graph: str | None = None
    circuit: str | None = None
    requests: str | None = None
    result: str | None = None
    cut: str | None = None
    output: str | None = None
    seed: int = 0
    oracle_cap: int = DEFAULT_CAP
    tolerance: float = TOLERANCE
    human: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if not 0 <= self.oracle_cap <= MAX_CAP:
            raise ParseError(f"oracle cap must be between 0 and {MAX_CAP}")
        if not self.tolerance > 0:
            raise ParseError("tolerance must be positive")


def _load(path: str | None, what: str):
    if path is None:
        raise ParseError(f"--{what} is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _load_gate(arg: str | None):
    if arg is not None and not os.path.exists(arg):
        return gate_from_spec(arg)
    return gate_from_spec(_load(arg, "gate"))


def parse_cut(text: str, n: int) -> Bipartition:
    """``"0,1|2,3"`` -> left {0, 1}, right {2, 3}."""
    try:
        left, right = text.split("|")
        side = [[int(q) for q in part.split(",") if q.strip()] for part in (left, right)]
    except ValueError as exc:
        raise ParseError(f"bad cut {text!r}; expected e.g. '0,1|2,3'") from exc
    cut = Bipartition(tuple(side[0]), tuple(side[1]))
    try:
        cut.validate(n)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return cut


def _load_requests(path):
    obj = _load(path, "requests")
    if isinstance(obj, dict):
        obj = obj.get("requests", [])
    return [GateRequest.from_json(r) for r in obj]


def _bound_json(lb):
    if lb is UNBOUNDED:
        return "unbounded"
    return str(lb) if lb.denominator != 1 else lb.numerator


def _nullity(cfg: JobConfig):
    d = _load_gate(cfg.gate)
    nu = nullity(d)
    gens = [str(p) for p in stabilizer_generators(d)]
    return {"n": d.n, "nullity": nu, "generators": gens}, f"nullity: {nu}"


def _compress(cfg: JobConfig):
    d = _load_gate(cfg.gate)
    res = compress(d)
    out = {"gate": d.to_spec(), **res.to_json()}
    return out, f"rounds: {len(res.transcript)}\ncore qubits: {res.n_prime}"


def _cost(cfg: JobConfig):
    circ = Circuit.from_json(_load(cfg.circuit, "circuit"))
    if cfg.cut is not None:
        cut = parse_cut(cfg.cut, circ.n)
    elif circ.regions is not None:
        cut = Bipartition.from_regions(circ.regions)
    else:
        raise ParseError("--cut is required when the circuit has no region tags")
    cost = circuit_cost(circ, cut)
    return {"cost": cost, "left": list(cut.left), "right": list(cut.right)}, f"cost: {cost}"


def _lowerbound(cfg: JobConfig):
    g = ArchitectureGraph.from_json(_load(cfg.graph, "graph"))
    lb = depth_lower_bound(_load_requests(cfg.requests), g)
    return {"lower_bound": _bound_json(lb)}, str(_bound_json(lb))


def _route(cfg: JobConfig):
    g = ArchitectureGraph.from_json(_load(cfg.graph, "graph"))
    sched = compile_injections(_load_requests(cfg.requests), g)
    text = (f"rounds: {len(sched.rounds)}\ntotal depth: {sched.total_depth}\n"
            f"lower bound: {_bound_json(sched.lower_bound)}\nmincut: {sched.mincut}")
    return sched.to_json(), text


def _verify_compression(obj, cfg: JobConfig, rng):
    failures = []
    if "gate" not in obj:
        raise ParseError("compression result lacks the input gate")
    d = gate_from_spec(obj["gate"])
    if d.n > cfg.oracle_cap:
        raise OracleCapExceeded(f"{d.n} qubits exceeds the oracle cap {cfg.oracle_cap}")
    try:
        res = CompressionResult.from_json(obj)
        if res.n_prime != nullity(d):
            failures.append("core size differs from nullity")
        if len(res.transcript) != d.n - res.n_prime:
            failures.append("round count differs from n - n'")
        if not verify_compression(res, d, cfg.oracle_cap, cfg.tolerance):
            failures.append("V D V' differs from 1 (x) core")
    except OracleCapExceeded:
        raise
    except (ValueError, KeyError, IndexError, InvariantViolation) as exc:
        failures.append(f"malformed result: {exc}")
    return failures


def _verify_schedule(obj, cfg: JobConfig, rng):
    failures = []
    try:
        sched = CompiledSchedule.from_json(obj)
        for k, rnd in enumerate(sched.rounds):
            used = set()
            for p in rnd.paths:
                for u, v in zip(p, p[1:]):
                    e = frozenset((u, v))
                    if e in used:
                        failures.append(f"round {k} reuses edge {sorted(map(str, e))}")
                    used.add(e)
            for circ in rnd.circuits:
                if circ.n > cfg.oracle_cap:
                    raise OracleCapExceeded(f"gadget on {circ.n} qubits exceeds the oracle cap")
                gates = [op.gate for op in circ.ops if op.kind == "DIAG"]
                if len(gates) != 1:
                    failures.append(f"round {k} gadget has {len(gates)} diagonal gates")
                    continue
                psi = DenseState.random(1, rng)
                out = simulate_circuit(circ, psi, cap=cfg.oracle_cap)
                got = extract_subsystem(out, [0]).amplitudes
                if not proportional(got, gates[0].phase_vector() * psi.amplitudes, cfg.tolerance):
                    failures.append(f"round {k} gadget does not apply its gate")
        if sched.total_depth != ROUND_DEPTH * len(sched.rounds):
            failures.append("total depth differs from 4 per round")
        lb = sched.lower_bound
        if lb is not UNBOUNDED and Fraction(sched.total_depth) < lb:
            failures.append("total depth is below the lower bound")
    except OracleCapExceeded:
        raise
    except (ValueError, KeyError, IndexError, TypeError, InvariantViolation) as exc:
        failures.append(f"malformed schedule: {exc}")
    return failures


def _verify(cfg: JobConfig):
    obj = _load(cfg.result, "result")
    rng = np.random.default_rng(cfg.seed)
    if isinstance(obj, dict) and "v" in obj:
        kind, failures = "compression", _verify_compression(obj, cfg, rng)
    elif isinstance(obj, dict) and "rounds" in obj:
        kind, failures = "schedule", _verify_schedule(obj, cfg, rng)
    else:
        raise ParseError("result is neither a compression result nor a schedule")
    if failures:
        raise InvariantViolation("; ".join(failures))
    return {"kind": kind, "ok": True}, f"{kind}: ok"


_HANDLERS = {"nullity": _nullity, "compress": _compress, "cost": _cost,
             "lowerbound": _lowerbound, "route": _route, "verify": _verify}


def _execute(cfg: JobConfig):
    try:
        cfg.validate()
        report, text = _HANDLERS[cfg.command](cfg)
        return EXIT_OK, report, text
    except OracleCapExceeded as exc:
        return EXIT_CAP, {"error": str(exc), "code": "oracle_cap"}, None
    except InvariantViolation as exc:
        return EXIT_INVARIANT, {"error": str(exc), "code": "invariant"}, None
    except (ParseError, ValueError, KeyError, TypeError) as exc:
        return EXIT_PARSE, {"error": str(exc), "code": "parse"}, None


def run(cfg: JobConfig):
    """Run one job; returns ``(exit_status, report)``.

    ``report`` is the JSON object on success and ``{"error", "code"}`` on failure.
    """
    status, report, _ = _execute(cfg)
    return status, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magicroute", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--gate", help="gate spec file (JSON) or a gate name such as CCZ")
    parser.add_argument("--graph", help="architecture graph JSON")
    parser.add_argument("--circuit", help="circuit JSON")
    parser.add_argument("--requests", help="gate request list JSON")
    parser.add_argument("--result", help="compression result or schedule JSON to verify")
    parser.add_argument("--cut", help="bipartition such as '0,1|2,3'")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    parser.add_argument("--tolerance", type=float, default=TOLERANCE)
    parser.add_argument("--human", action="store_true", help="print a short text report")
    parser.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = JobConfig(args.command, args.gate, args.graph, args.circuit, args.requests,
                    args.result, args.cut, args.output, args.seed, args.oracle_cap,
                    args.tolerance, args.human)
    status, report, text = _execute(cfg)
    if status != EXIT_OK:
        print(json.dumps(report), file=sys.stderr)
        return status
    payload = json.dumps(report, indent=2)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(payload + "\n")
    if cfg.human:
        print(text)
    elif not cfg.output:
        print(payload)
    return status


if __name__ == "__main__":
    sys.exit(main())
