"""Bucket/pairing dynamic programming over nice tree decompositions.

A state is a tuple aligned with the sorted bag.  Each entry encodes one bag
vertex: ``0`` for degree 0, ``-1`` for degree 2 and a positive vertex id for
degree 1, where the id is the other endpoint of the same path.  Storing the
partner as a vertex id (not a bag index) keeps states stable when the bag
grows or shrinks.

Witnesses are persistent trees so that each transition costs O(1) per state:
``None`` is the empty edge set, ``(0, edge, rest)`` adds one edge and
``(1, left, right)`` is the union of two disjoint witnesses.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Optional

from .decomposition import Kind, NiceDecomposition
from .graph import Graph

DEG2 = -1


class SolverError(RuntimeError):
    pass


def degree(x: int) -> int:
    return 0 if x == 0 else (2 if x < 0 else 1)


def bucket_of(state: tuple) -> tuple:
    return tuple(0 if x == 0 else (2 if x < 0 else 1) for x in state)


def pairing_of(state: tuple, bag: tuple) -> tuple:
    """Canonical pairing: sorted tuple of ordered pairs of bag vertices."""
    return tuple(sorted((v, x) for v, x in zip(bag, state) if x > 0 and v < x))


def make_state(bag: tuple, degrees: dict, pairs) -> tuple:
    """Build a state from a degree map and a pairing given as vertex pairs."""
    partner = {}
    for a, b in pairs:
        partner[a] = b
        partner[b] = a
    ones = {v for v in bag if degrees.get(v, 0) == 1}
    if set(partner) != ones:
        raise ValueError("pairing must be a perfect matching on the degree-1 vertices")
    state = []
    for v in bag:
        d = degrees.get(v, 0)
        if d == 1:
            state.append(partner[v])
        else:
            state.append(DEG2 if d == 2 else 0)
    return tuple(state)


def witness_edges(w) -> list:
    out = []
    stack = [w]
    while stack:
        w = stack.pop()
        if w is None:
            continue
        if w[0] == 0:
            out.append(w[1])
            stack.append(w[2])
        else:
            stack.append(w[1])
            stack.append(w[2])
    return out


@dataclass
class PartialTable:
    bag: tuple = ()
    entries: dict = field(default_factory=dict)  # state -> witness (None in decision mode)
    witness: bool = True
    found: object = None  # frozenset of cycle edges, or True in decision mode

    def __len__(self):
        return len(self.entries)

    def states(self) -> list:
        return list(self.entries)


def count_pairings(ell: int) -> int:
    """Number of perfect matchings of an ``ell``-element set, (ell-1)!!."""
    if ell < 0 or ell % 2:
        raise ValueError(f"pairings exist only for even non-negative sizes, got {ell}")
    out = 1
    for k in range(ell - 1, 0, -2):
        out *= k
    return out


# --- node transitions ------------------------------------------------------------


def transition_leaf(witness: bool = True) -> PartialTable:
    return PartialTable((), {(): None}, witness)


def transition_introduce_vertex(tbl: PartialTable, v: int) -> PartialTable:
    if v in tbl.bag:
        raise ValueError(f"vertex {v} already in bag")
    i = bisect_left(tbl.bag, v)
    bag = tbl.bag[:i] + (v,) + tbl.bag[i:]
    entries = {s[:i] + (0,) + s[i:]: w for s, w in tbl.entries.items()}
    return PartialTable(bag, entries, tbl.witness, tbl.found)


def transition_introduce_edge(tbl: PartialTable, u: int, v: int, n: int,
                              subtree_count: int) -> PartialTable:
    bag = tbl.bag
    pos = {x: i for i, x in enumerate(bag)}
    iu, iv = pos[u], pos[v]
    edge = (u, v) if u < v else (v, u)
    witness = tbl.witness
    out = dict(tbl.entries)
    found = tbl.found
    for s, w in tbl.entries.items():
        a = s[iu]
        b = s[iv]
        if a < 0 or b < 0:
            continue
        t = list(s)
        if a == 0 and b == 0:
            t[iu] = v
            t[iv] = u
        elif a == 0:
            t[iu] = b
            t[iv] = DEG2
            t[pos[b]] = u
        elif b == 0:
            t[iv] = a
            t[iu] = DEG2
            t[pos[a]] = v
        elif a == v:
            # closing the path u..v into a cycle
            if found is None and subtree_count == n and \
                    all(x < 0 for i, x in enumerate(s) if i != iu and i != iv):
                found = frozenset(witness_edges(w)) | {edge} if witness else True
            continue
        else:
            t[iu] = DEG2
            t[iv] = DEG2
            t[pos[a]] = b
            t[pos[b]] = a
        t = tuple(t)
        if t not in out:
            out[t] = (0, edge, w) if witness else None
    return PartialTable(bag, out, witness, found)


def transition_forget(tbl: PartialTable, v: int) -> PartialTable:
    i = tbl.bag.index(v)
    bag = tbl.bag[:i] + tbl.bag[i + 1:]
    out: dict = {}
    for s, w in tbl.entries.items():
        if s[i] < 0:
            t = s[:i] + s[i + 1:]
            if t not in out:
                out[t] = w
    return PartialTable(bag, out, tbl.witness, tbl.found)


def _merge(sa: tuple, sb: tuple, bag: tuple, pos: dict):
    """Combine two states on the same bag.

    Returns ``(state, closed)``: ``state`` is None when the combination is
    invalid; ``closed`` is True when the union is exactly one cycle through
    every degree-1 vertex on both sides with all bag degrees equal to 2.
    """
    k = len(bag)
    deg = [0] * k
    res = [0] * k
    doubles = 0
    ends = []
    for i in range(k):
        d = degree(sa[i]) + degree(sb[i])
        if d > 2:
            return None, False
        deg[i] = d
        if d == 2:
            res[i] = DEG2
            if sa[i] > 0:
                doubles += 1
        elif d == 1:
            ends.append(i)
    if not doubles:
        for i in ends:
            res[i] = sa[i] or sb[i]
        return tuple(res), False
    seen = 0
    for i in ends:
        if res[i]:
            continue
        side_a = sa[i] > 0
        cur = i
        while True:
            j = pos[sa[cur] if side_a else sb[cur]]
            if deg[j] == 1:
                res[i] = bag[j]
                res[j] = bag[i]
                break
            seen += 1
            side_a = not side_a
            cur = j
    if seen == doubles:
        return tuple(res), False
    if ends or any(d != 2 for d in deg):
        return None, False
    # no endpoints left: check the alternating structure is a single cycle
    start = next(i for i in range(k) if sa[i] > 0)
    cur, side_a, length = start, True, 0
    while True:
        cur = pos[sa[cur] if side_a else sb[cur]]
        side_a = not side_a
        length += 1
        if cur == start and side_a:
            break
    return None, length == 2 * doubles or length == doubles


def transition_join(ta: PartialTable, tb: PartialTable, n: int,
                    subtree_count: int) -> PartialTable:
    if ta.bag != tb.bag:
        raise ValueError("join children must share the bag")
    bag = ta.bag
    pos = {x: i for i, x in enumerate(bag)}
    witness = ta.witness
    found = ta.found if ta.found is not None else tb.found
    ga = defaultdict(list)
    gb = defaultdict(list)
    for s, w in ta.entries.items():
        ga[bucket_of(s)].append((s, w))
    for s, w in tb.entries.items():
        gb[bucket_of(s)].append((s, w))
    out: dict = {}
    for ba, la in ga.items():
        for bb, lb in gb.items():
            if any(x + y > 2 for x, y in zip(ba, bb)):
                continue
            for sa, wa in la:
                for sb, wb in lb:
                    t, closed = _merge(sa, sb, bag, pos)
                    if t is None:
                        if closed and found is None and subtree_count == n:
                            found = frozenset(witness_edges(wa)) | frozenset(witness_edges(wb)) \
                                if witness else True
                        continue
                    if t not in out:
                        out[t] = (1, wa, wb) if witness else None
    return PartialTable(bag, out, witness, found)


def dedupe(entries) -> list:
    """Sort ``(state, witness)`` pairs and keep the first of each state."""
    ordered = sorted(entries, key=lambda sw: sw[0])
    out = []
    for s, w in ordered:
        if out and out[-1][0] == s:
            continue
        out.append((s, w))
    return out


def dedupe_table(tbl: PartialTable) -> PartialTable:
    return PartialTable(tbl.bag, dict(dedupe(tbl.entries.items())), tbl.witness, tbl.found)


# --- driver ------------------------------------------------------------------------


@dataclass
class Outcome:
    hamiltonian: bool
    cycle: Optional[list] = None
    peak_table: int = 0
    decision_calls: int = 0
    seconds: float = 0.0
    note: str = ""


def trivially_non_hamiltonian(g: Graph) -> Optional[str]:
    if g.n < 3:
        return "fewer than 3 vertices"
    if any(len(a) < 2 for a in g.adjacency[1:]):
        return "vertex of degree < 2"
    if not g.is_connected():
        return "disconnected"
    return None


def run_dp(g: Graph, nice: NiceDecomposition, witness: bool,
           reducer: Optional[Callable[[PartialTable], PartialTable]] = None,
           stats: Optional[dict] = None):
    """Evaluate the DP bottom-up; returns the ``found`` value (None if absent).

    Introduce-edge nodes whose edge is not in ``g`` are skipped, so a
    decomposition built for a supergraph on the same vertices can be reused.
    """
    if nice.n != g.n:
        raise SolverError("decomposition built for a different vertex count")
    nodes = nice.nodes
    tables: dict[int, PartialTable] = {}
    n = g.n
    peak = 0
    edges = g.edges
    for i, node in enumerate(nodes):
        kind = node.kind
        if kind is Kind.LEAF:
            tbl = transition_leaf(witness)
        elif kind is Kind.INTRODUCE_VERTEX:
            tbl = transition_introduce_vertex(tables.pop(node.children[0]), node.vertex)
        elif kind is Kind.INTRODUCE_EDGE:
            tbl = tables.pop(node.children[0])
            if node.edge in edges:
                tbl = transition_introduce_edge(tbl, node.edge[0], node.edge[1], n,
                                                node.subtree_count)
        elif kind is Kind.FORGET:
            tbl = transition_forget(tables.pop(node.children[0]), node.vertex)
        else:
            a, b = node.children
            tbl = transition_join(tables.pop(a), tables.pop(b), n, node.subtree_count)
        if tbl.found is not None:
            if stats is not None:
                stats["peak_table"] = max(peak, len(tbl))
            return tbl.found
        if reducer is not None:
            tbl = reducer(tbl)
        peak = max(peak, len(tbl))
        tables[i] = tbl
    if stats is not None:
        stats["peak_table"] = peak
    return None


def finish(g: Graph, found, witness: bool, started: float, stats: dict) -> Outcome:
    from .extraction import extract_from_witness

    cycle = None
    if found is not None and witness:
        cycle = extract_from_witness(found, g)
    return Outcome(found is not None, cycle, stats.get("peak_table", 0),
                   seconds=time.perf_counter() - started)


def solve_naive(g: Graph, nice: NiceDecomposition, mode: str = "witness") -> Outcome:
    if mode not in ("witness", "decision"):
        raise ValueError(f"unknown mode {mode!r}")
    started = time.perf_counter()
    reason = trivially_non_hamiltonian(g)
    if reason:
        return Outcome(False, note=reason)
    stats: dict = {}
    found = run_dp(g, nice, mode == "witness", stats=stats)
    return finish(g, found, mode == "witness", started, stats)
