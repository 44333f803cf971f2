"""Routing magic-state injections from factories to targets on a qubit graph.

Factories sit on ``region_x`` and targets on ``region_y``. A round routes
one gate to each of a set of distinct targets along edge-disjoint paths;
each path carries a long-range CNOT followed by a remote gate gadget on the
factory vertex. Max-flow is unit-capacity Edmonds-Karp.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuit import Circuit
from .diagonal import DiagonalGate, gate_from_spec, nullity
from .errors import InvariantViolation, ParseError

ROUND_DEPTH = 4


class Unbounded:
    """Depth bound when factories cannot reach pending non-Clifford work."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"

    def to_json(self) -> str:
        return "unbounded"


UNBOUNDED = Unbounded()


def _vertex(v):
    return tuple(v) if isinstance(v, list) else v


class ArchitectureGraph:
    def __init__(self, vertices, edges, region_x, region_y):
        self.vertices = [_vertex(v) for v in vertices]
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex")
        seen = set()
        self.edges = []
        for u, v in edges:
            u, v = _vertex(u), _vertex(v)
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in self.index or v not in self.index:
                raise ValueError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"parallel edge ({u!r}, {v!r})")
            seen.add(key)
            self.edges.append((u, v))
        self.region_x = [_vertex(v) for v in region_x]
        self.region_y = [_vertex(v) for v in region_y]
        for v in self.region_x + self.region_y:
            if v not in self.index:
                raise ValueError(f"region vertex {v!r} is not in the graph")
        if set(self.region_x) & set(self.region_y):
            raise ValueError("regions X and Y overlap")
        self.adj = [[] for _ in self.vertices]
        for u, v in self.edges:
            self.adj[self.index[u]].append(self.index[v])
            self.adj[self.index[v]].append(self.index[u])
        for nbrs in self.adj:
            nbrs.sort()

    def __len__(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        def out(v):
            return list(v) if isinstance(v, tuple) else v

        return {
            "vertices": [out(v) for v in self.vertices],
            "edges": [[out(u), out(v)] for u, v in self.edges],
            "region_x": [out(v) for v in self.region_x],
            "region_y": [out(v) for v in self.region_y],
        }

    @classmethod
    def from_json(cls, obj) -> "ArchitectureGraph":
        try:
            return cls(obj["vertices"], obj["edges"], obj["region_x"], obj["region_y"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad graph: {exc}") from exc

    def distances_from_x(self) -> list:
        dist = [math.inf] * len(self)
        queue = deque()
        for v in self.region_x:
            dist[self.index[v]] = 0
            queue.append(self.index[v])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if dist[w] == math.inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist


def grid_graph(rows: int, cols: int, factory_columns=(0,)) -> ArchitectureGraph:
    """Grid with vertices ``(r, c)``; the given columns are factories, the rest targets."""
    verts = [(r, c) for r in range(rows) for c in range(cols)]
    edges = [((r, c), (r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [((r, c), (r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    xs = [v for v in verts if v[1] in factory_columns]
    ys = [v for v in verts if v[1] not in factory_columns]
    return ArchitectureGraph(verts, edges, xs, ys)


def random_graph(n: int, p: float, rng: np.random.Generator) -> ArchitectureGraph:
    """Erdos-Renyi graph with random disjoint non-empty regions."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    labels = rng.integers(0, 3, size=n)
    labels[0], labels[n - 1] = 0, 1
    xs = [v for v in range(n) if labels[v] == 0]
    ys = [v for v in range(n) if labels[v] == 1]
    return ArchitectureGraph(range(n), edges, xs, ys)


class _FlowNetwork:
    """Residual network of ``g`` plus a super source and super sink."""

    def __init__(self, g: ArchitectureGraph):
        self.g = g
        self.source = len(g)
        self.sink = len(g) + 1
        self.cap = [dict() for _ in range(len(g) + 2)]
        for u, v in g.edges:
            a, b = g.index[u], g.index[v]
            self.cap[a][b] = 1
            self.cap[b][a] = 1
        big = len(g.edges) + 1
        for v in g.region_x:
            self._arc(self.source, g.index[v], big)
        self.big = big
        self.value = 0

    def _arc(self, a: int, b: int, c: int) -> None:
        self.cap[a][b] = self.cap[a].get(b, 0) + c
        self.cap[b].setdefault(a, 0)

    def add_sink(self, v: int, c: int) -> None:
        self._arc(v, self.sink, c)

    def _neighbors(self, u: int):
        return sorted(self.cap[u])

    def augment(self) -> bool:
        parent = {self.source: None}
        queue = deque([self.source])
        while queue and self.sink not in parent:
            u = queue.popleft()
            for w in self._neighbors(u):
                if w not in parent and self.cap[u][w] > 0:
                    parent[w] = u
                    queue.append(w)
        if self.sink not in parent:
            return False
        w = self.sink
        while parent[w] is not None:
            u = parent[w]
            self.cap[u][w] -= 1
            self.cap[w][u] += 1
            w = u
        self.value += 1
        return True

    def saturate(self) -> int:
        while self.augment():
            pass
        return self.value

    def reachable(self) -> set:
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for w, c in self.cap[u].items():
                if c > 0 and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    def edge_flow(self) -> dict:
        """Net unit flow on graph arcs: ``{(a, b): 1}`` for a -> b."""
        flow = {}
        for u, v in self.g.edges:
            a, b = self.g.index[u], self.g.index[v]
            # both arcs started at 1; residual a->b of 0 means a->b carries flow
            if self.cap[a][b] == 0:
                flow[(a, b)] = 1
            elif self.cap[b][a] == 0:
                flow[(b, a)] = 1
        return flow


def max_flow(g: ArchitectureGraph) -> int:
    """Number of edge-disjoint X-to-Y paths."""
    net = _FlowNetwork(g)
    for v in g.region_y:
        net.add_sink(g.index[v], net.big)
    return net.saturate()


def min_cut(g: ArchitectureGraph):
    """``(value, cut_edges)`` of a minimum edge cut separating X from Y."""
    if not g.region_x or not g.region_y:
        raise ValueError("both regions must be non-empty")
    net = _FlowNetwork(g)
    for v in g.region_y:
        net.add_sink(g.index[v], net.big)
    value = net.saturate()
    side = net.reachable()
    cut = [(u, v) for u, v in g.edges if (g.index[u] in side) != (g.index[v] in side)]
    if len(cut) != value:
        raise InvariantViolation("cut size differs from max-flow value")
    return value, cut


@dataclass
class GateRequest:
    gate: DiagonalGate
    targets: tuple
    nullity: int | None = None

    def __post_init__(self):
        self.targets = tuple(_vertex(t) for t in self.targets)
        if len(self.targets) != self.gate.n:
            raise ValueError("one target per gate qubit is required")
        if self.nullity is None:
            self.nullity = nullity(self.gate)

    def to_json(self) -> dict:
        def out(v):
            return list(v) if isinstance(v, tuple) else v

        return {"gate": self.gate.to_spec(), "targets": [out(t) for t in self.targets],
                "nullity": self.nullity}

    @classmethod
    def from_json(cls, obj) -> "GateRequest":
        try:
            return cls(gate_from_spec(obj["gate"]), tuple(obj["targets"]), obj.get("nullity"))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad gate request: {exc}") from exc


def _check_targets(requests, g: ArchitectureGraph) -> None:
    ys = set(g.region_y)
    for r in requests:
        for t in r.targets:
            if t not in ys:
                raise ValueError(f"target {t!r} is not in region Y")


def depth_lower_bound(requests, g: ArchitectureGraph):
    """Total nullity over the min cut, or :data:`UNBOUNDED`."""
    _check_targets(requests, g)
    total = sum(r.nullity for r in requests)
    if total == 0:
        return Fraction(0)
    value, _ = min_cut(g)
    if value == 0:
        return UNBOUNDED
    return Fraction(total, value)


def depth_upper_bound(requests, g: ArchitectureGraph):
    total = sum(r.nullity for r in requests)
    if total == 0:
        return 0
    value, _ = min_cut(g)
    if value == 0:
        return UNBOUNDED
    return ROUND_DEPTH * math.ceil(total / value)


def _decompose(net: _FlowNetwork, g: ArchitectureGraph) -> list:
    flow = net.edge_flow()
    out_arcs = {}
    for a, b in sorted(flow):
        out_arcs.setdefault(a, []).append(b)
    targets = sorted(v for v, c in net.cap[net.sink].items() if c > 0 and v < len(g))
    is_x = {g.index[v] for v in g.region_x}
    paths = []
    incoming = {}
    for a, bs in out_arcs.items():
        for b in bs:
            incoming.setdefault(b, []).append(a)
    for t in targets:
        # walk the flow backwards from t until an X vertex is reached
        path = [t]
        where = {t: 0}
        while path[-1] not in is_x:
            u = path[-1]
            preds = incoming.get(u)
            if not preds:
                raise InvariantViolation("flow decomposition lost a path")
            a = preds.pop(0)
            out_arcs[a].remove(u)
            if a in where:
                # drop the cycle
                for w in path[where[a] + 1:]:
                    del where[w]
                del path[where[a] + 1:]
                continue
            where[a] = len(path)
            path.append(a)
        path.reverse()
        paths.append([g.vertices[i] for i in path])
    return paths


def edp_route(g: ArchitectureGraph, targets) -> list:
    """Maximum set of edge-disjoint paths from X to distinct ``targets``.

    Targets are offered to the flow one at a time, farthest from X first
    (ties by index), then the flow is saturated. Each path starts at the
    X vertex closest to its target along the flow.
    """
    targets = [_vertex(t) for t in targets]
    ys = set(g.region_y)
    for t in targets:
        if t not in ys:
            raise ValueError(f"target {t!r} is not in region Y")
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct")
    if not targets or not g.region_x:
        return []
    dist = g.distances_from_x()
    order = sorted(targets, key=lambda t: (-dist[g.index[t]], g.index[t]))
    net = _FlowNetwork(g)
    for t in order:
        net.add_sink(g.index[t], 1)
        net.augment()
    net.saturate()
    paths = _decompose(net, g)
    if len(paths) != net.value:
        raise InvariantViolation("path count differs from flow value")
    return paths


def long_range_cnot(path) -> Circuit:
    """CNOT from qubit 0 to qubit ``L`` along a path of ``L`` edges.

    Qubit ``i`` of the returned circuit is the ``i``-th path vertex; interior
    qubits are ``|0>`` ancillas. For ``L >= 3`` the interior is turned into a
    GHZ chain by ZZ measurements, collapsed to one Bell pair between its ends
    by X measurements, and the CNOT is teleported through it.
    """
    L = len(path) - 1
    if L < 1:
        raise ValueError("path needs at least one edge")
    if len(set(map(_vertex, path))) != len(path):
        raise ValueError("path must be simple")
    c, t = 0, L
    circ = Circuit(L + 1, ancillas=tuple(range(1, L)))
    if L == 1:
        return circ.append("CNOT", c, t)
    if L == 2:
        circ.append("CNOT", c, 1)
        circ.append("CNOT", 1, t)
        m = circ.measure_x(1)
        return circ.append("Z", c, condition=(m,))
    first, last = 1, L - 1
    for a in range(first, last + 1):
        circ.append("H", a)
    zz = [circ.measure("ZZ", a, a + 1) for a in range(first, last)]
    for j in range(first + 1, last + 1):
        circ.append("X", j, condition=tuple(zz[: j - first]))
    xs = [circ.measure_x(a) for a in range(first + 1, last)]
    if xs:
        circ.append("Z", first, condition=tuple(xs))
    circ.append("CNOT", c, first)
    m = circ.measure_z(first)
    circ.append("X", last, condition=(m,))
    circ.append("CNOT", last, t)
    m = circ.measure_x(last)
    return circ.append("Z", c, condition=(m,))


def long_range_cnot_depth(path) -> int:
    return 1 if len(path) == 2 else ROUND_DEPTH


def injection_round_gadget(path, gate: DiagonalGate, regions=None) -> Circuit:
    """Remote gate gadget through ``path`` (factory first, target last).

    The factory qubit starts in ``|0>``, receives a copy of the target by a
    long-range CNOT, gets the gate, and is measured in X with a Z fix on the
    target.
    """
    if gate.n != 1:
        raise ValueError("round gadgets carry single-qubit gates")
    cnot = long_range_cnot(list(reversed(path)))
    L = len(path) - 1
    factory = L
    body = Circuit(L + 1)
    body.diag(gate, factory)
    m = body.measure_x(factory)
    body.append("Z", 0, condition=(m,))
    circ = cnot.extended(Circuit(L + 1, body.ops))
    # local index i is path[L - i]: the target is 0 and the factory is L
    return Circuit(L + 1, circ.ops, regions, tuple(range(1, L + 1)))


@dataclass
class Round:
    paths: list
    circuits: list
    requests: list

    def to_json(self) -> dict:
        def out(v):
            return list(v) if isinstance(v, tuple) else v

        return {"paths": [[out(v) for v in p] for p in self.paths],
                "requests": list(self.requests),
                "circuits": [c.to_json() for c in self.circuits]}


@dataclass
class CompiledSchedule:
    rounds: list
    total_depth: int
    lower_bound: object
    mincut: int
    direct: list = field(default_factory=list)

    def to_json(self) -> dict:
        lb = self.lower_bound
        lb = lb.to_json() if lb is UNBOUNDED else [lb.numerator, lb.denominator]
        return {"rounds": [r.to_json() for r in self.rounds], "total_depth": self.total_depth,
                "lower_bound": lb, "mincut": self.mincut, "direct": list(self.direct)}

    @classmethod
    def from_json(cls, obj) -> "CompiledSchedule":
        lb = obj["lower_bound"]
        lb = UNBOUNDED if lb == "unbounded" else Fraction(lb[0], lb[1])
        rounds = [Round([[_vertex(v) for v in p] for p in r["paths"]],
                        [Circuit.from_json(c) for c in r["circuits"]], list(r["requests"]))
                  for r in obj["rounds"]]
        return cls(rounds, int(obj["total_depth"]), lb, int(obj["mincut"]),
                   list(obj.get("direct", [])))


def merge_requests(requests) -> list:
    """Multiply together the single-qubit requests that share a target."""
    merged = {}
    for r in requests:
        t = r.targets
        merged[t] = r.gate if t not in merged else merged[t].multiply(r.gate)
    return [GateRequest(gate, t) for t, gate in merged.items()]


def compile_injections(requests, g: ArchitectureGraph, strict: bool = False,
                       merge: bool = False) -> CompiledSchedule:
    """Round-by-round schedule of single-qubit diagonal requests.

    Clifford requests (nullity 0) are applied directly and take no rounds.
    Each round routes one pending request per distinct target; a target
    with several requests appears in successive rounds.
    """
    requests = list(requests)
    for r in requests:
        if r.gate.n != 1:
            raise ValueError("only single-qubit requests can be compiled; compress first")
    _check_targets(requests, g)
    if merge:
        requests = merge_requests(requests)
    lower = depth_lower_bound(requests, g)
    value = min_cut(g)[0] if g.region_x and g.region_y else 0
    direct = [i for i, r in enumerate(requests) if r.nullity == 0]
    pending = [i for i, r in enumerate(requests) if r.nullity > 0]
    tags = {v: "X" for v in g.region_x}
    rounds = []
    while pending:
        wanted = {}
        for i in pending:
            wanted.setdefault(requests[i].targets[0], i)
        paths = edp_route(g, list(wanted))
        if not paths:
            raise ValueError("pending non-Clifford requests cannot reach a factory")
        circuits, served = [], []
        for p in paths:
            i = wanted[p[-1]]
            regions = [tags.get(v, "Y") for v in reversed(p)]
            circuits.append(injection_round_gadget(p, requests[i].gate, regions))
            served.append(i)
        for i in served:
            pending.remove(i)
        rounds.append(Round(paths, circuits, served))
    total = ROUND_DEPTH * len(rounds)
    sched = CompiledSchedule(rounds, total, lower, value, direct)
    if strict:
        upper = depth_upper_bound(requests, g)
        if upper is not UNBOUNDED and total > upper:
            raise InvariantViolation(f"depth {total} exceeds the bound {upper}")
    return sched
