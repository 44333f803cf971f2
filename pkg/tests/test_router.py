import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from magicroute.dense import DenseState, extract_subsystem, proportional, simulate_circuit
from magicroute.diagonal import named_gate
from magicroute.errors import InvariantViolation, ParseError
from magicroute.router import (ROUND_DEPTH, UNBOUNDED, ArchitectureGraph, CompiledSchedule,
                               GateRequest, compile_injections, depth_lower_bound,
                               depth_upper_bound, edp_route, grid_graph, injection_round_gadget,
                               long_range_cnot, long_range_cnot_depth, max_flow, merge_requests,
                               min_cut, random_graph)

from oracles import all_outcomes, applies_gate

T = named_gate("T")


def t_requests(targets, gate=T):
    return [GateRequest(gate, (t,)) for t in targets]


def networkx_flow(g):
    h = nx.DiGraph()
    for u, v in g.edges:
        h.add_edge(u, v, capacity=1)
        h.add_edge(v, u, capacity=1)
    for x in g.region_x:
        h.add_edge("source", x, capacity=len(g.edges) + 1)
    for y in g.region_y:
        h.add_edge(y, "sink", capacity=len(g.edges) + 1)
    if "source" not in h or "sink" not in h:
        return 0
    return nx.maximum_flow_value(h, "source", "sink")


def test_graph_validation():
    with pytest.raises(ValueError):
        ArchitectureGraph([0, 1], [(0, 0)], [0], [1])
    with pytest.raises(ValueError):
        ArchitectureGraph([0, 1], [(0, 1), (1, 0)], [0], [1])
    with pytest.raises(ValueError):
        ArchitectureGraph([0, 1], [(0, 2)], [0], [1])
    with pytest.raises(ValueError):
        ArchitectureGraph([0, 1], [(0, 1)], [0], [0, 1])
    with pytest.raises(ParseError):
        ArchitectureGraph.from_json({"vertices": [0]})


def test_graph_json_round_trip():
    g = grid_graph(3, 3)
    back = ArchitectureGraph.from_json(g.to_json())
    assert back.vertices == g.vertices and back.edges == g.edges
    assert back.region_x == g.region_x


def test_grid_min_cut_examples():
    value, cut = min_cut(grid_graph(4, 4))
    assert value == 4 and len(cut) == 4
    corner = ArchitectureGraph(*_corner(3))
    assert min_cut(corner)[0] == 2


def _corner(k):
    g = grid_graph(k, k)
    return g.vertices, g.edges, [(0, 0)], [v for v in g.vertices if v != (0, 0)]


def test_disconnected_graph():
    g = ArchitectureGraph([0, 1, 2], [(1, 2)], [0], [1, 2])
    assert max_flow(g) == 0
    assert depth_lower_bound(t_requests([1]), g) is UNBOUNDED
    assert depth_upper_bound(t_requests([1]), g) is UNBOUNDED
    assert edp_route(g, [1]) == []
    with pytest.raises(ValueError):
        compile_injections(t_requests([1]), g)


def test_max_flow_matches_networkx():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 41))
        g = random_graph(n, float(rng.uniform(0.03, 0.3)), rng)
        value, cut = min_cut(g)
        assert value == max_flow(g) == networkx_flow(g) == len(cut)


def test_lower_bound_examples():
    g = grid_graph(4, 4)
    assert depth_lower_bound(t_requests([(r, 3) for r in range(4)]), g) == 1
    assert depth_lower_bound(t_requests([(0, 1)] * 6), g) == Fraction(3, 2)
    assert depth_lower_bound(t_requests([(0, 1)], named_gate("S")), g) == 0
    with pytest.raises(ValueError):
        depth_lower_bound(t_requests([(0, 0)]), g)


def edge_disjoint(paths):
    edges = [frozenset(e) for p in paths for e in zip(p, p[1:])]
    return len(edges) == len(set(edges))


def test_edp_route_rows():
    g = grid_graph(4, 4)
    paths = edp_route(g, [(r, 3) for r in range(4)])
    assert len(paths) == 4 and edge_disjoint(paths)
    for p in paths:
        assert p[0] in g.region_x and p[-1][1] == 3
        assert all(frozenset(e) in {frozenset(x) for x in g.edges} for e in zip(p, p[1:]))


def test_edp_route_bottleneck():
    g = ArchitectureGraph(*_corner(3))
    paths = edp_route(g, [(2, 2), (1, 1), (0, 2)])
    assert len(paths) == 2 and edge_disjoint(paths)
    with pytest.raises(ValueError):
        edp_route(g, [(1, 1), (1, 1)])


def test_edp_route_random_graphs():
    rng = np.random.default_rng(1)
    for _ in range(40):
        g = random_graph(int(rng.integers(4, 20)), 0.25, rng)
        targets = list(g.region_y)
        paths = edp_route(g, targets)
        assert edge_disjoint(paths)
        assert len({p[-1] for p in paths}) == len(paths)
        assert len(paths) <= min_cut(g)[0]
        for p in paths:
            assert p[0] in g.region_x and len(set(p)) == len(p)


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_long_range_cnot_all_branches(L):
    circ = long_range_cnot(list(range(L + 1)))
    assert circ.inputs() == [0, L]
    rng = np.random.default_rng(L)
    branches = all_outcomes(circ)
    for outcomes in branches[:: max(1, len(branches) // 16)]:
        for _ in range(2):
            psi = DenseState.random(2, rng)
            out = extract_subsystem(simulate_circuit(circ, psi, outcomes), [0, L])
            a = psi.amplitudes
            want = np.array([a[0], a[3], a[2], a[1]])
            assert proportional(out.amplitudes, want)
    assert long_range_cnot_depth(list(range(L + 1))) == (1 if L == 1 else ROUND_DEPTH)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_round_gadget_applies_gate(L):
    circ = injection_round_gadget(list(range(L + 1)), T)
    rng = np.random.default_rng(L)
    for outcomes in all_outcomes(circ):
        assert applies_gate(circ, T, [0], rng, outcomes, n_inputs=1)
    with pytest.raises(ValueError):
        injection_round_gadget([0, 1], named_gate("CS"))


def check_schedule(sched, g, requests):
    served = sorted(i for r in sched.rounds for i in r.requests)
    assert served == sorted(i for i, r in enumerate(requests) if r.nullity)
    assert sched.total_depth == ROUND_DEPTH * len(sched.rounds)
    for rnd in sched.rounds:
        assert edge_disjoint(rnd.paths)
        assert len(rnd.paths) <= sched.mincut


@pytest.mark.parametrize("size", [4, 6])
def test_grid_sweep_within_bounds(size):
    g = grid_graph(size, size)
    rng = np.random.default_rng(size)
    ys = g.region_y
    for m in range(4, 13):
        for _ in range(5):
            picks = [ys[int(i)] for i in rng.choice(len(ys), size=m, replace=False)]
            reqs = t_requests(picks)
            sched = compile_injections(reqs, g, strict=True)
            check_schedule(sched, g, reqs)
            assert sched.lower_bound <= sched.total_depth
            assert sched.total_depth <= ROUND_DEPTH * math.ceil(m / sched.mincut)


def test_repeated_targets_merged_within_bounds():
    g = grid_graph(4, 4)
    rng = np.random.default_rng(7)
    ys = g.region_y
    for _ in range(20):
        picks = [ys[int(i)] for i in rng.integers(0, len(ys), size=int(rng.integers(4, 13)))]
        sched = compile_injections(t_requests(picks), g, strict=True, merge=True)
        total = sum(r.nullity for r in merge_requests(t_requests(picks)))
        assert sched.lower_bound <= sched.total_depth
        assert sched.total_depth <= ROUND_DEPTH * math.ceil(total / sched.mincut)


def test_clifford_requests_are_direct():
    g = grid_graph(3, 3)
    reqs = t_requests([(0, 1)], named_gate("S")) + t_requests([(1, 2)])
    sched = compile_injections(reqs, g)
    assert sched.direct == [0]
    assert len(sched.rounds) == 1 and sched.total_depth == ROUND_DEPTH


def test_compile_rejects_multi_qubit():
    g = grid_graph(3, 3)
    with pytest.raises(ValueError):
        compile_injections([GateRequest(named_gate("CS"), ((0, 1), (0, 2)))], g)


def test_merge_requests():
    merged = merge_requests(t_requests([(0, 1), (0, 1), (1, 1)]))
    assert len(merged) == 2
    assert merged[0].gate == named_gate("S") and merged[0].nullity == 0
    sched = compile_injections(t_requests([(0, 1), (0, 1)]), grid_graph(2, 2), merge=True)
    assert sched.rounds == [] and sched.total_depth == 0


def test_schedule_json_round_trip():
    g = grid_graph(3, 3)
    sched = compile_injections(t_requests([(0, 2), (1, 2), (2, 2), (0, 1)]), g)
    back = CompiledSchedule.from_json(sched.to_json())
    assert back.total_depth == sched.total_depth and back.lower_bound == sched.lower_bound
    assert [r.paths for r in back.rounds] == [r.paths for r in sched.rounds]
    req = GateRequest.from_json(t_requests([(0, 1)])[0].to_json())
    assert req.targets == ((0, 1),) and req.nullity == 1


def test_strict_mode_flags_bad_bound(monkeypatch):
    import magicroute.router as router

    g = grid_graph(3, 3)
    monkeypatch.setattr(router, "depth_upper_bound", lambda reqs, graph: 0)
    with pytest.raises(InvariantViolation):
        compile_injections(t_requests([(0, 1)]), g, strict=True)


def brute_force_min_cut(g):
    """Smallest edge subset whose removal separates X from Y (exhaustive)."""
    import itertools

    for size in range(len(g.edges) + 1):
        for cut in itertools.combinations(g.edges, size):
            removed = set(cut)
            seen, stack = set(g.region_x), list(g.region_x)
            while stack:
                u = stack.pop()
                for a, b in g.edges:
                    if (a, b) in removed or u not in (a, b):
                        continue
                    w = b if u == a else a
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if not seen & set(g.region_y):
                return size


def test_corner_to_corner_min_cut():
    g = grid_graph(3, 3)
    g = ArchitectureGraph(g.vertices, g.edges, [(0, 0)], [(2, 2)])
    assert min_cut(g)[0] == brute_force_min_cut(g) == 2


def test_sixteen_requests_four_rounds():
    g = grid_graph(4, 4)
    reqs = t_requests([(r, 3) for r in range(4)] * 4)
    sched = compile_injections(reqs, g, strict=True)
    assert len(sched.rounds) == 4 and sched.total_depth == 16
    assert all(len(r.paths) == 4 for r in sched.rounds)
    assert sched.lower_bound == 4
    circ = sched.rounds[0].circuits[0]
    assert applies_gate(circ, T, [0], np.random.default_rng(0), n_inputs=2)
